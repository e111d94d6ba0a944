#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "../arith/symbols.hpp"
#include "../error.hpp"
#include "../group/algorithms.hpp"
#include "../group/lgroup.hpp"
#include "../group/nilpotent.hpp"

namespace malle::param {

using arith::i64;
using BigInt = boost::multiprecision::cpp_int;

/// Entries v_g indexed by group element (entry 0, the identity, is unused and 1).
struct SquarefreeTuple {
  std::vector<i64> v;

  std::string str(const group::LGroup& G) const {
    std::string s;
    for (group::Elem g = 1; g < v.size(); ++g) {
      if (v[g] == 1) continue;
      if (!s.empty()) s += ";";
      s += G.format(g) + "=" + std::to_string(v[g]);
    }
    return s;
  }
};

/// Primes allowed in v_g for a nilpotent target: p = 1 mod every l | ord(g), p not
/// dividing #G. For l = 2 this is every odd prime (2 itself rides as finite data).
inline bool support_allows(std::uint32_t order_radical, std::uint32_t group_order, i64 p) {
  if (group_order % p == 0) return false;
  return p % order_radical == 1;
}

inline void validate_tuple(const group::NilpotentGroup& G, const SquarefreeTuple& t) {
  if (t.v.size() != G.order() || t.v[0] != 1) throw Error("NotPrim", "tuple size does not match group order");
  std::map<i64, group::Elem> owner;
  int negatives = 0;
  for (group::Elem g = 1; g < G.order(); ++g) {
    i64 x = t.v[g];
    if (x == 0) throw Error("NotPrim", "zero entry");
    bool two_data = G.in_two_part(g);
    if (x < 0) {
      if (!two_data) throw Error("NotPrim", "negative entry outside the 2-part");
      if (++negatives > 1) throw Error("NotPrim", "two negative entries");
    }
    for (auto [p, e] : arith::factor(static_cast<arith::u64>(x < 0 ? -x : x))) {
      if (e > 1) throw Error("NotPrim", "entry " + std::to_string(x) + " is not squarefree");
      i64 pp = static_cast<i64>(p);
      if (pp == 2 ? !two_data : !support_allows(G.order_radical(g), G.order(), pp))
        throw Error("NotPrim", "prime " + std::to_string(pp) + " not allowed at " + G.format(g));
      if (!owner.emplace(pp, g).second) throw Error("NotPrim", "entries share the prime " + std::to_string(pp));
    }
  }
}

inline void validate_tuple(const group::LGroup& G, const SquarefreeTuple& t) {
  validate_tuple(group::NilpotentGroup({G}), t);
}

/// l = 2 Pow map on values indexed by nonzero vectors of F_2^r (bit j-1 = coordinate j):
/// w_j = prod of v_B over B containing j.
inline std::vector<i64> pow_forward(std::uint32_t r, const std::vector<i64>& v) {
  if (v.size() != (1u << r)) throw Error("NotPrim", "expected 2^r values");
  std::vector<arith::i128> w(r, 1);
  for (std::uint32_t B = 1; B < v.size(); ++B)
    for (std::uint32_t j = 0; j < r; ++j)
      if ((B >> j) & 1) {
        w[j] *= v[B];
        if (w[j] > INT64_MAX || w[j] < INT64_MIN) throw Error("Overflow", "Pow coordinate exceeds 64 bits");
      }
  return std::vector<i64>(w.begin(), w.end());
}

/// Inverse Pow: each t in {-1, 2, odd primes} goes to the entry indexed by its
/// t-support {j : t | w_j} (for t = -1: {j : w_j < 0}).
inline std::vector<i64> pow_inverse(const std::vector<i64>& w) {
  const std::uint32_t r = static_cast<std::uint32_t>(w.size());
  std::vector<i64> v(1u << r, 1);
  std::map<i64, std::uint32_t> support;
  std::uint32_t neg = 0;
  for (std::uint32_t j = 0; j < r; ++j) {
    if (w[j] == 0) throw Error("ZeroArgument", "Pow coordinate 0");
    if (w[j] < 0) neg |= 1u << j;
    for (auto [p, e] : arith::factor(static_cast<arith::u64>(w[j] < 0 ? -w[j] : w[j]))) {
      if (e > 1) throw Error("NotSquarefree", std::to_string(w[j]));
      support[static_cast<i64>(p)] |= 1u << j;
    }
  }
  if (neg) v[neg] = -v[neg];
  for (auto [p, B] : support) v[B] *= p;
  return v;
}

/// General l: coordinate j is the formal sum sum_g pi_j(g) * chi_{v_g}, recorded as
/// prime -> exponent in F_l. Values indexed by packed F_l^r vectors.
using FormalChar = std::map<i64, std::uint32_t>;

inline std::vector<FormalChar> pow_forward_general(std::uint32_t l, std::uint32_t r, const std::vector<i64>& v) {
  std::vector<FormalChar> w(r);
  for (std::uint32_t B = 1; B < v.size(); ++B) {
    std::uint32_t x = B;
    for (std::uint32_t j = 0; j < r; ++j, x /= l) {
      std::uint32_t c = x % l;
      if (!c) continue;
      for (auto [p, e] : arith::factor(static_cast<arith::u64>(v[B] < 0 ? -v[B] : v[B]))) w[j][static_cast<i64>(p)] = c;
    }
  }
  return w;
}

inline std::vector<i64> pow_inverse_general(std::uint32_t l, const std::vector<FormalChar>& w) {
  const std::uint32_t r = static_cast<std::uint32_t>(w.size());
  std::uint32_t n = 1;
  for (std::uint32_t j = 0; j < r; ++j) n *= l;
  std::vector<i64> v(n, 1);
  std::map<i64, std::uint32_t> idx;
  std::uint32_t pw = 1;
  for (std::uint32_t j = 0; j < r; ++j, pw *= l)
    for (auto [p, c] : w[j])
      if (c % l) idx[p] += (c % l) * pw;
  for (auto [p, B] : idx) v[B] *= p;
  return v;
}

/// Element g with p | v_g, or the identity.
inline group::Elem read_inertia(const SquarefreeTuple& t, i64 p) {
  for (group::Elem g = 1; g < t.v.size(); ++g)
    if (t.v[g] % p == 0) return g;
  return 0;
}

/// e_g = #G (1 - 1/ord g) for every element.
template <group::FiniteGroup G>
std::vector<std::uint32_t> disc_exponents(const G& grp) {
  std::vector<std::uint32_t> e(grp.order(), 0);
  for (group::Elem g = 1; g < grp.order(); ++g) e[g] = grp.order() - grp.order() / group::element_order(grp, g);
  return e;
}

template <group::FiniteGroup G>
BigInt disc_odd(const G& grp, const SquarefreeTuple& t) {
  auto e = disc_exponents(grp);
  BigInt d = 1;
  for (group::Elem g = 1; g < t.v.size(); ++g) {
    i64 a = t.v[g] < 0 ? -t.v[g] : t.v[g];
    while (a % 2 == 0) a /= 2;
    d *= boost::multiprecision::pow(BigInt(a), e[g]);
  }
  return d;
}

/// True iff chi_{d_new} is not in the F_2-span of the chi_{d_j}.
inline bool char_independence(i64 d_new, const std::vector<i64>& ds) {
  std::map<i64, std::size_t> col;  // -1 and primes
  auto vec = [&](i64 d) {
    std::vector<i64> keys;
    if (d < 0) keys.push_back(-1);
    for (auto [p, e] : arith::factor(static_cast<arith::u64>(d < 0 ? -d : d)))
      if (e & 1) keys.push_back(static_cast<i64>(p));
    return keys;
  };
  std::vector<std::vector<i64>> all;
  for (auto d : ds) all.push_back(vec(d));
  all.push_back(vec(d_new));
  for (auto& ks : all)
    for (auto k : ks) col.emplace(k, col.size());
  group::FlSystem sys(2, col.size());
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    std::vector<std::uint32_t> row(col.size(), 0);
    for (auto k : all[i]) row[col[k]] = 1;
    sys.add(row, 0);
  }
  std::size_t before = sys.rank();
  std::vector<std::uint32_t> row(col.size(), 0);
  for (auto k : all.back()) row[col[k]] = 1;
  sys.add(row, 0);
  return sys.rank() > before;
}

}  // namespace malle::param
