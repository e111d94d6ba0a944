#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "../arith/numtheory.hpp"
#include "../arith/sieve.hpp"
#include "../error.hpp"

// Independent witness: Dirichlet characters and the conductor-discriminant formula.
// Deliberately shares nothing with the group and param code.

namespace malle::oracle {

using arith::u64;

/// Finite abelian group Z/n_1 x ... x Z/n_k, elements packed mixed radix.
struct AbelianGroup {
  std::string name;
  std::vector<u64> n;

  u64 order() const {
    u64 o = 1;
    for (auto x : n) o *= x;
    return o;
  }
  u64 exponent() const {
    u64 e = 1;
    for (auto x : n) e = std::lcm(e, x);
    return e;
  }
  std::vector<u64> unpack(u64 a) const {
    std::vector<u64> c;
    for (auto x : n) {
      c.push_back(a % x);
      a /= x;
    }
    return c;
  }
  u64 pack(const std::vector<u64>& c) const {
    u64 a = 0, m = 1;
    for (std::size_t i = 0; i < n.size(); ++i) {
      a += (c[i] % n[i]) * m;
      m *= n[i];
    }
    return a;
  }
  u64 add(u64 a, u64 b) const {
    auto x = unpack(a), y = unpack(b);
    for (std::size_t i = 0; i < n.size(); ++i) x[i] = (x[i] + y[i]) % n[i];
    return pack(x);
  }
  u64 scale(u64 a, u64 k) const {
    auto x = unpack(a);
    for (std::size_t i = 0; i < n.size(); ++i) x[i] = (x[i] * (k % n[i])) % n[i];
    return pack(x);
  }
  u64 elem_order(u64 a) const {
    u64 o = 1;
    auto x = unpack(a);
    for (std::size_t i = 0; i < n.size(); ++i) o = std::lcm(o, n[i] / std::gcd(n[i], x[i]));
    return o;
  }
  /// Order of lambda(a) in Q/Z for the character lambda (packed like an element).
  u64 pairing_order(u64 lambda, u64 a) const {
    const u64 N = exponent();
    auto x = unpack(lambda), y = unpack(a);
    u64 v = 0;
    for (std::size_t i = 0; i < n.size(); ++i) v = (v + x[i] * y[i] % n[i] * (N / n[i])) % N;
    return N / std::gcd(v, N);
  }
};

inline AbelianGroup abelian_by_name(const std::string& name) {
  static const std::map<std::string, std::vector<u64>> known = {
      {"C2", {2}}, {"C3", {3}}, {"C4", {4}}, {"C8", {8}}, {"V4", {2, 2}}, {"C2xC4", {2, 4}}, {"C2^3", {2, 2, 2}},
      {"C2:C4", {2, 4}}, {"V4:C4", {2, 2, 4}}, {"C6", {6}}};
  auto it = known.find(name);
  if (it == known.end()) throw Error("NotAbelian", name + " is not a known abelian group");
  return {name, it->second};
}

struct UnitGenerator {
  u64 gen;        // residue mod m
  u64 order;
  u64 prime;      // prime of the CRT component
  int k;          // exponent of that prime in m
  bool is_minus1; // for p = 2: the generator -1 (otherwise 5)
};

struct UnitGroupStructure {
  u64 m = 1;
  std::vector<UnitGenerator> gens;
  u64 order() const {
    u64 o = 1;
    for (const auto& g : gens) o *= g.order;
    return o;
  }
};

inline u64 crt_lift(u64 residue, u64 pk, u64 m) {
  // x = residue mod pk, x = 1 mod m/pk
  const u64 rest = m / pk;
  for (u64 t = 0; t < pk; ++t) {
    u64 x = 1 + t * rest;
    if (x % pk == residue % pk) return x % m;
  }
  throw Error("InvariantViolation", "CRT failed");
}

inline UnitGroupStructure unit_group(u64 m) {
  if (m == 0 || m > 1'000'000) throw Error("CapExceeded", "unit_group modulus " + std::to_string(m));
  UnitGroupStructure U;
  U.m = m;
  for (auto [p, k] : arith::factor(m)) {
    u64 pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    if (p == 2) {
      if (k >= 2) U.gens.push_back({crt_lift(pk - 1, pk, m), 2, 2, k, true});
      if (k >= 3) U.gens.push_back({crt_lift(5, pk, m), pk / 4, 2, k, false});
      continue;
    }
    const u64 phi = pk / p * (p - 1);
    auto pf = arith::factor(p - 1);
    u64 g = 2;
    for (;; ++g) {
      bool prim = true;
      for (auto [q, e] : pf)
        if (arith::powmod(g, (p - 1) / q, p) == 1) prim = false;
      if (prim) break;
    }
    if (k >= 2 && arith::powmod(g, p - 1, p * p) == 1) g += p;
    U.gens.push_back({crt_lift(g % pk, pk, m), phi, p, k, false});
  }
  return U;
}

/// Conductor exponent of a local character at p with value-order `o` on the generator
/// (odd p), or values of orders (o_minus1, o_five) at p = 2.
inline u64 odd_local_conductor(u64 p, u64 o) {
  if (o == 1) return 1;
  u64 c = p, pp = 1;
  while (o % p == 0) {
    o /= p;
    pp *= p;
  }
  return c * pp;
}

inline u64 two_local_conductor(u64 o_minus1, u64 o_five) {
  if (o_five == 1) return o_minus1 == 1 ? 1 : 4;
  return 4 * o_five;  // 2^{s+2} for ord = 2^s
}

/// Local component of an epi at one prime: images of the local generators.
struct LocalHom {
  u64 p;
  int k;
  std::vector<u64> images;  // odd p: [image of generator]; p = 2: [image of -1, image of 5]
};

struct DirichletEpi {
  u64 conductor = 1;
  u64 disc = 1;
  std::vector<LocalHom> local;
};

namespace detail {

/// Product over characters lambda of A of the local conductor of lambda o psi_p.
inline u64 local_disc(const AbelianGroup& A, const LocalHom& h) {
  u64 d = 1;
  for (u64 lam = 0; lam < A.order(); ++lam) {
    if (h.p == 2) d *= two_local_conductor(A.pairing_order(lam, h.images[0]), A.pairing_order(lam, h.images[1]));
    else d *= odd_local_conductor(h.p, A.pairing_order(lam, h.images[0]));
  }
  return d;
}

/// All primitive local homs at p^k.
inline std::vector<LocalHom> primitive_locals(const AbelianGroup& A, u64 p, int k) {
  std::vector<LocalHom> out;
  const u64 n = A.order();
  if (p == 2) {
    if (k == 2) {
      for (u64 a = 1; a < n; ++a)
        if (A.elem_order(a) == 2) out.push_back({2, 2, {a, 0}});
    } else if (k >= 3) {
      const u64 want = u64{1} << (k - 2);
      for (u64 a = 0; a < n; ++a)
        if (A.elem_order(a) <= 2)
          for (u64 b = 0; b < n; ++b)
            if (A.elem_order(b) == want) out.push_back({2, k, {a, b}});
    }
    return out;
  }
  u64 pk1 = 1;
  for (int i = 1; i < k; ++i) pk1 *= p;
  const u64 phi = pk1 * (p - 1), phi_prev = k >= 2 ? pk1 / p * (p - 1) : 1;
  for (u64 a = 1; a < n; ++a) {
    u64 o = A.elem_order(a);
    if (phi % o != 0) continue;
    if (k >= 2 && phi_prev % o == 0) continue;
    out.push_back({p, k, {a}});
  }
  return out;
}

inline u64 span_mask(const AbelianGroup& A, u64 mask, u64 a) {
  // subgroup generated by the elements of mask and a (bitmask over elements, |A| <= 64)
  std::vector<u64> elems;
  for (u64 x = 0; x < A.order(); ++x)
    if ((mask >> x) & 1) elems.push_back(x);
  u64 out = mask;
  u64 cur = 0;
  for (u64 t = 0; t < A.elem_order(a); ++t) {
    for (auto x : elems) out |= u64{1} << A.add(x, cur);
    cur = A.add(cur, a);
  }
  return out;
}

}  // namespace detail

/// Epis primitive at modulus exactly m (conductor m), for every m <= M.
inline std::vector<DirichletEpi> enumerate_epis(const AbelianGroup& A, u64 M) {
  if (M > 100'000) throw Error("CapExceeded", "enumerate_epis modulus cap");
  if (A.order() > 64) throw Error("CapExceeded", "abelian target too large");
  std::vector<DirichletEpi> out;
  const u64 full = A.order() == 64 ? ~u64{0} : (u64{1} << A.order()) - 1;
  for (u64 m = 2; m <= M; ++m) {
    auto U = unit_group(m);
    std::vector<std::vector<LocalHom>> choices;
    bool possible = true;
    for (auto [p, k] : arith::factor(m)) {
      auto c = detail::primitive_locals(A, p, k);
      if (c.empty()) possible = false;
      choices.push_back(std::move(c));
    }
    if (!possible) continue;
    std::vector<LocalHom> cur;
    std::function<void(std::size_t, u64)> rec = [&](std::size_t i, u64 span) {
      if (i == choices.size()) {
        if (span != full) return;
        DirichletEpi e;
        e.conductor = m;
        e.local = cur;
        for (const auto& h : cur) e.disc *= detail::local_disc(A, h);
        out.push_back(std::move(e));
        return;
      }
      for (const auto& h : choices[i]) {
        u64 s = span;
        for (auto a : h.images) s = detail::span_mask(A, s, a);
        cur.push_back(h);
        rec(i + 1, s);
        cur.pop_back();
      }
    };
    (void)U;
    rec(0, 1);
  }
  return out;
}

struct OracleResult {
  std::uint64_t count = 0;
  std::vector<u64> discs;  // ascending
  std::vector<DirichletEpi> epis;
};

/// Epis G_Q -> A with discriminant <= X, by depth-first search over ramified primes;
/// the discriminant is a product of local factors, which drives the pruning.
inline OracleResult oracle_count(const AbelianGroup& A, u64 X, bool two_unramified, bool keep_epis = false) {
  if (A.order() > 64) throw Error("CapExceeded", "abelian target too large");
  OracleResult R;
  if (X < 2 || A.order() == 1) return R;
  const u64 full = A.order() == 64 ? ~u64{0} : (u64{1} << A.order()) - 1;
  // an odd ramified prime contributes at least p^{|A|/2}
  const u64 half = A.order() / 2;
  u64 pmax = static_cast<u64>(arith::iroot(X, static_cast<unsigned>(half)));
  auto sv = arith::shared_sieve(std::max<u64>(pmax, 3));
  std::vector<u64> primes;
  for (u64 p = 3; p <= pmax; ++p)
    if (sv->lpf[p] == p) primes.push_back(p);
  std::vector<std::pair<LocalHom, u64>> two_opts;  // (local hom, local disc)
  if (!two_unramified)
    for (int k = 2; (u64{1} << (k - 2)) <= A.exponent(); ++k)
      for (auto& h : detail::primitive_locals(A, 2, k)) {
        u64 d = detail::local_disc(A, h);
        if (d <= X) two_opts.emplace_back(h, d);
      }
  std::vector<LocalHom> cur;
  std::vector<std::vector<std::pair<LocalHom, u64>>> odd_cache(primes.size());
  std::vector<char> cached(primes.size(), 0);
  std::function<void(std::size_t, u64, u64)> rec = [&](std::size_t i, u64 budget_disc, u64 span) {
    // budget_disc: discriminant so far; try adding primes from index i on
    if (span == full) {
      ++R.count;
      R.discs.push_back(budget_disc);
      if (keep_epis) {
        DirichletEpi e;
        e.disc = budget_disc;
        e.local = cur;
        for (const auto& h : cur) {
          u64 pk = 1;
          for (int t = 0; t < h.k; ++t) pk *= h.p;
          e.conductor *= pk;
        }
        R.epis.push_back(std::move(e));
      }
    }
    for (std::size_t j = i; j < primes.size(); ++j) {
      const u64 p = primes[j];
      u64 lb = 1;
      for (u64 t = 0; t < half; ++t) lb *= p;
      if (lb > X / budget_disc) break;
      if (!cached[j]) {
        for (int k = 1;; ++k) {
          u64 pk1 = 1;
          for (int t = 1; t < k; ++t) pk1 *= p;
          if (k >= 2 && A.exponent() % p != 0) break;
          if (k >= 2 && pk1 > X) break;
          for (auto& h : detail::primitive_locals(A, p, k)) odd_cache[j].emplace_back(h, detail::local_disc(A, h));
          if (A.exponent() % p != 0) break;
          if (k > 8) break;
        }
        cached[j] = 1;
      }
      for (const auto& [h, d] : odd_cache[j]) {
        if (d > X / budget_disc) continue;
        cur.push_back(h);
        rec(j + 1, budget_disc * d, detail::span_mask(A, span, h.images[0]));
        cur.pop_back();
      }
    }
  };
  // 2-adic component first (optional), then odd primes
  rec(0, 1, 1);
  for (const auto& [h, d] : two_opts) {
    u64 s = 1;
    for (auto a : h.images) s = detail::span_mask(A, s, a);
    cur.push_back(h);
    rec(0, d, s);
    cur.pop_back();
  }
  std::sort(R.discs.begin(), R.discs.end());
  return R;
}

/// Brute-force #Aut(A).
inline u64 automorphism_count(const AbelianGroup& A) {
  const u64 n = A.order();
  const std::size_t k = A.n.size();
  std::vector<u64> img(k, 0);
  u64 count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == k) {
      // hom determined by images of the standard generators; bijective iff injective
      std::vector<char> seen(n, 0);
      for (u64 a = 0; a < n; ++a) {
        auto c = A.unpack(a);
        u64 x = 0;
        for (std::size_t t = 0; t < k; ++t) x = A.add(x, A.scale(img[t], c[t]));
        if (seen[x]) return;
        seen[x] = 1;
      }
      ++count;
      return;
    }
    for (u64 b = 0; b < n; ++b)
      if (A.n[i] % A.elem_order(b) == 0) {
        img[i] = b;
        rec(i + 1);
      }
  };
  rec(0);
  return count;
}

/// Kernel key of an epi: the set of Dirichlet characters lambda o psi, each recorded
/// by its local value orders and values. Epis with equal keys have the same kernel.
inline std::vector<std::vector<u64>> field_key(const AbelianGroup& A, const DirichletEpi& e) {
  std::vector<std::vector<u64>> chars;
  const u64 N = A.exponent();
  for (u64 lam = 0; lam < A.order(); ++lam) {
    std::vector<u64> c;
    for (const auto& h : e.local) {
      c.push_back(h.p);
      for (auto a : h.images) {
        auto x = A.unpack(lam), y = A.unpack(a);
        u64 v = 0;
        for (std::size_t i = 0; i < A.n.size(); ++i) v = (v + x[i] * y[i] % A.n[i] * (N / A.n[i])) % N;
        c.push_back(v);
      }
    }
    chars.push_back(std::move(c));
  }
  std::sort(chars.begin(), chars.end());
  return chars;
}

}  // namespace malle::oracle
