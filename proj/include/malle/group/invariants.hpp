#pragma once

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "../error.hpp"
#include "algorithms.hpp"
#include "lgroup.hpp"
#include "nilpotent.hpp"

namespace malle::group {

// ---------------------------------------------------------------------------
// Extensions, commutator pairing, stability, breaks

/// The extension (F_l x G_i, *_theta) as an LGroup; the fiber is the top coordinate.
inline LGroup extension(const LGroup& Gi, const CocycleTable& theta) {
  AdmissibleSequence s = Gi.seq();
  s.name = Gi.name() + "+theta";
  s.cocycles.push_back(theta);
  return LGroup::build_unchecked(std::move(s));
}

/// Lift of x in G_i to the extension E, fiber coordinate a.
inline Elem lift(const LGroup& E, Elem x, std::uint32_t a = 0) { return x + a * E.level_order(E.r() - 1); }

/// [x, h]_theta computed in an already-built extension E of G_i = E.prefix(r-1).
inline std::uint32_t commutator_pairing_in(const LGroup& E, Elem h, Elem x) {
  const LGroup& Gi = E.prefix(E.r() - 1);
  if (Gi.mul(x, h) != Gi.mul(h, x)) throw Error("NotInCentralizer", Gi.format(x) + " does not commute with " + Gi.format(h));
  Elem xl = lift(E, x), hl = lift(E, h);
  Elem c = E.mul(E.mul(xl, hl), E.mul(E.inv(xl), E.inv(hl)));
  return E.coord(c, E.r() - 1);
}

inline std::uint32_t commutator_pairing(const LGroup& Gi, Elem h, const CocycleTable& theta, Elem x) {
  return commutator_pairing_in(extension(Gi, theta), h, x);
}

struct TildeCentralizer {
  std::vector<Elem> elements;  // preimage in Cent(h) of the kernel (contains <h>)
  std::uint32_t index = 1;     // [Cent(h) : kernel], always 1 or l
};

inline TildeCentralizer tilde_centralizer_in(const LGroup& E, Elem h) {
  const LGroup& Gi = E.prefix(E.r() - 1);
  auto cent = centralizer(Gi, h);
  TildeCentralizer t;
  for (Elem x : cent)
    if (commutator_pairing_in(E, h, x) == 0) t.elements.push_back(x);
  t.index = static_cast<std::uint32_t>(cent.size() / t.elements.size());
  if (t.index != 1 && t.index != E.l())
    throw Error("InvariantViolation", "tilde-centralizer index " + std::to_string(t.index));
  return t;
}

inline TildeCentralizer tilde_centralizer(const LGroup& Gi, Elem h, const CocycleTable& theta) {
  return tilde_centralizer_in(extension(Gi, theta), h);
}

inline bool is_theta_stable_in(const LGroup& E, Elem h) {
  return element_order(E, lift(E, h)) == element_order(E.prefix(E.r() - 1), h);
}

inline bool is_theta_stable(const LGroup& Gi, Elem h, const CocycleTable& theta) {
  return is_theta_stable_in(extension(Gi, theta), h);
}

/// Number of steps i where the tilde-centralizer of pi_{i-1}(g) has index l.
inline std::uint32_t breaks(const LGroup& G, Elem g) {
  std::uint32_t b = 0;
  for (std::uint32_t i = 2; i <= G.r(); ++i) {  // G_0 is trivial, so step 1 never breaks
    const LGroup& E = G.prefix(i);
    if (tilde_centralizer_in(E, G.project(g, i - 1)).index == G.l()) ++b;
  }
  return b;
}

// ---------------------------------------------------------------------------
// Involution locus and constants

template <FiniteGroup G>
std::vector<Elem> involution_locus(const G& grp, std::uint32_t lG) {
  std::vector<Elem> out;
  for (Elem x = 1; x < grp.order(); ++x)
    if (element_order(grp, x) == lG) out.push_back(x);
  return out;
}

inline std::vector<Elem> involution_locus(const LGroup& G) { return involution_locus(G, G.l()); }
inline std::vector<Elem> involution_locus(const NilpotentGroup& G) { return involution_locus(G, G.lG()); }

/// dim of H(G) = I(G) u {id}; throws NotAVectorSpace unless H(G) is an abelian subgroup.
template <FiniteGroup G>
std::uint32_t h_dimension(const G& grp, std::uint32_t lG) {
  auto I = involution_locus(grp, lG);
  std::vector<char> inH(grp.order(), 0);
  inH[0] = 1;
  for (auto x : I) inH[x] = 1;
  for (auto x : I)
    for (auto y : I) {
      if (grp.mul(x, y) != grp.mul(y, x)) throw Error("NotAVectorSpace", "elements of I(G) do not commute");
      if (!inH[grp.mul(x, y)]) throw Error("NotAVectorSpace", "H(G) is not closed");
    }
  std::uint32_t size = static_cast<std::uint32_t>(I.size() + 1), d = 0;
  while (size > 1) {
    size /= lG;
    ++d;
  }
  return d;
}

inline std::uint32_t h_dimension(const LGroup& G) { return h_dimension(G, G.l()); }
inline std::uint32_t h_dimension(const NilpotentGroup& G) { return h_dimension(G, G.lG()); }

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw Error("ZeroArgument", "zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

struct ConstantsReport {
  Rational a, b, i;
  std::uint32_t d_input = 1;
  std::uint32_t involutions = 0;     // #I(G)
  std::uint32_t involution_classes = 0;
};

template <FiniteGroup G>
std::uint32_t classes_in(const G& grp, const std::vector<Elem>& subset) {
  auto labels = class_labels(grp);
  std::vector<std::uint32_t> ls;
  for (auto x : subset) ls.push_back(labels[x]);
  std::sort(ls.begin(), ls.end());
  return static_cast<std::uint32_t>(std::unique(ls.begin(), ls.end()) - ls.begin());
}

template <FiniteGroup G>
ConstantsReport constants(const G& grp, std::uint32_t lG, std::uint32_t d) {
  if (d == 0 || (lG - 1) % d != 0)
    throw Error("InvalidCyclotomicDegree", "d = " + std::to_string(d) + " does not divide l_G - 1 = " + std::to_string(lG - 1));
  auto I = involution_locus(grp, lG);
  ConstantsReport r;
  r.d_input = d;
  r.involutions = static_cast<std::uint32_t>(I.size());
  r.involution_classes = classes_in(grp, I);
  if (r.involution_classes % d != 0 || r.involutions % d != 0)
    throw Error("InvalidCyclotomicDegree", "d = " + std::to_string(d) + " does not divide the class count " +
                                               std::to_string(r.involution_classes));
  r.a = Rational(lG, static_cast<std::int64_t>(lG - 1) * grp.order());
  r.i = Rational(r.involutions, d);
  r.b = Rational(r.involution_classes, d);
  return r;
}

inline ConstantsReport constants(const NilpotentGroup& G, std::uint32_t d) { return constants(G, G.lG(), d); }
inline ConstantsReport constants(const LGroup& G, std::uint32_t d) { return constants(G, G.l(), d); }

/// Orbit sizes of C -> C^k on the classes inside I(G), k of multiplicative order d mod l_G.
template <FiniteGroup G>
std::vector<std::uint32_t> power_map_orbits(const G& grp, std::uint32_t lG, std::uint32_t d) {
  if (d == 0 || (lG - 1) % d != 0) throw Error("InvalidCyclotomicDegree", "d must divide l_G - 1");
  std::uint32_t k = 1;
  for (std::uint32_t c = 1; c < lG; ++c) {
    std::uint32_t o = 1, t = c % lG;
    while (t != 1) {
      t = t * c % lG;
      ++o;
    }
    if (o == d) {
      k = c;
      break;
    }
  }
  auto labels = class_labels(grp);
  auto I = involution_locus(grp, lG);
  std::map<std::uint32_t, bool> done;
  std::vector<std::uint32_t> sizes;
  for (auto x : I) {
    if (done[labels[x]]) continue;
    std::uint32_t size = 0;
    Elem y = x;
    do {
      done[labels[y]] = true;
      ++size;
      Elem z = 0;
      for (std::uint32_t t = 0; t < k; ++t) z = grp.mul(z, y);
      y = z;
    } while (labels[y] != labels[x]);
    sizes.push_back(size);
  }
  return sizes;
}

// ---------------------------------------------------------------------------
// Refinement calculus for 2-groups

namespace detail {

using Bits = std::bitset<256>;

template <FiniteGroup G>
Bits subgroup_bits(const G& grp, const std::vector<Elem>& gens) {
  Bits b;
  for (auto x : generated_subgroup(grp, gens)) b.set(x);
  return b;
}

template <FiniteGroup G>
std::vector<Elem> members(const G& grp, const Bits& b) {
  std::vector<Elem> v;
  for (Elem x = 0; x < grp.order(); ++x)
    if (b.test(x)) v.push_back(x);
  return v;
}

template <FiniteGroup G>
struct KlunersSearch {
  const G& grp;
  std::vector<Bits> ucs;  // upper central series Z_0 = 1 ... Z_c = G
  std::vector<char> is_inv;
  std::map<std::string, std::uint32_t> memo;

  explicit KlunersSearch(const G& g) : grp(g) {
    is_inv.assign(grp.order(), 0);
    for (Elem x = 1; x < grp.order(); ++x) is_inv[x] = element_order(grp, x) == 2;
    Bits z;
    z.set(0);
    ucs.push_back(z);
    while (ucs.back().count() < grp.order()) {
      // Z_{j+1} = {x : [x, y] in Z_j for all y}
      Bits next;
      for (Elem x = 0; x < grp.order(); ++x) {
        bool ok = true;
        for (Elem y = 0; y < grp.order() && ok; ++y) {
          Elem c = grp.mul(grp.mul(x, y), grp.mul(grp.inv(x), grp.inv(y)));
          ok = ucs.back().test(c);
        }
        if (ok) next.set(x);
      }
      if (next == ucs.back()) throw Error("NotNilpotent", "upper central series stalls");
      ucs.push_back(next);
    }
  }

  bool normal(const Bits& s) const {
    for (Elem x = 0; x < grp.order(); ++x) {
      if (!s.test(x)) continue;
      for (Elem g = 0; g < grp.order(); ++g)
        if (!s.test(conjugate(grp, g, x))) return false;
    }
    return true;
  }

  /// Index-2 subgroups of S: kernels of nonzero characters S -> F_2.
  std::vector<Bits> maximal_subgroups(const Bits& S) const {
    auto elems = members(grp, S);
    std::vector<Elem> phi_gens;
    for (auto x : elems) {
      phi_gens.push_back(grp.mul(x, x));
      for (auto y : elems) phi_gens.push_back(grp.mul(grp.mul(x, y), grp.mul(grp.inv(x), grp.inv(y))));
    }
    std::sort(phi_gens.begin(), phi_gens.end());
    phi_gens.erase(std::unique(phi_gens.begin(), phi_gens.end()), phi_gens.end());
    Bits phi = subgroup_bits(grp, phi_gens);
    std::vector<Elem> basis;
    Bits span = phi;
    for (auto x : elems) {
      if (span.test(x)) continue;
      basis.push_back(x);
      std::vector<Elem> gens = members(grp, span);
      gens.push_back(x);
      span = subgroup_bits(grp, gens);
    }
    std::vector<Bits> out;
    const std::size_t k = basis.size();
    for (std::uint64_t c = 1; c < (1ULL << k); ++c) {
      std::vector<Elem> gens = members(grp, phi);
      std::size_t i0 = static_cast<std::size_t>(__builtin_ctzll(c));
      for (std::size_t i = 0; i < k; ++i) {
        if (!((c >> i) & 1)) gens.push_back(basis[i]);
        else if (i != i0) gens.push_back(grp.mul(basis[i], basis[i0]));
      }
      out.push_back(subgroup_bits(grp, gens));
    }
    return out;
  }

  std::uint32_t best(const Bits& S) {
    if (S.count() == 1) return 0;
    auto key = S.to_string();
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    // largest upper-central term strictly inside S must survive in the chain
    Bits target;
    for (const auto& z : ucs)
      if ((z & S) == z && z != S) target = z;
    std::uint32_t res = UINT32_MAX;
    for (const auto& T : maximal_subgroups(S)) {
      if ((target & T) != target || !normal(T)) continue;
      Bits block = S & ~T;
      bool has_inv = false;
      for (Elem x = 0; x < grp.order() && !has_inv; ++x) has_inv = block.test(x) && is_inv[x];
      std::uint32_t here = has_inv ? static_cast<std::uint32_t>(block.count()) : 0;
      std::uint32_t rest = best(T);
      if (rest != UINT32_MAX) res = std::min(res, here + rest);
    }
    memo.emplace(std::move(key), res);
    return res;
  }
};

}  // namespace detail

/// Minimum over refinements of the upper central series (normal subgroups, index 2
/// steps) of the total size of the blocks that contain an involution.
template <FiniteGroup G>
std::uint32_t kluners_d(const G& grp) {
  if (grp.order() > 256) throw Error("TooLarge", "kluners_d supports #G <= 2^8");
  std::uint32_t n = grp.order();
  if (n & (n - 1)) throw Error("InvalidGroup", "kluners_d needs a 2-group");
  if (n == 1) return 0;
  detail::KlunersSearch<G> s(grp);
  detail::Bits all;
  for (Elem x = 0; x < n; ++x) all.set(x);
  return s.best(all);
}

inline std::uint32_t kluners_d(const LGroup& G) {
  if (G.l() != 2) throw Error("InvalidGroup", "kluners_d is defined for l = 2");
  return kluners_d<LGroup>(G);
}

}  // namespace malle::group
