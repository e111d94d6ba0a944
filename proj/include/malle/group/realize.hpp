#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "../error.hpp"
#include "algorithms.hpp"
#include "lgroup.hpp"

namespace malle::group {

/// A finite group given by an explicit multiplication table (identity = 0).
struct ConcreteGroup {
  std::string name;
  std::uint32_t n = 1;
  std::vector<std::uint32_t> table;
  std::vector<std::uint32_t> inverse;

  std::uint32_t order() const { return n; }
  std::uint32_t mul(std::uint32_t x, std::uint32_t y) const { return table[static_cast<std::size_t>(x) * n + y]; }
  std::uint32_t inv(std::uint32_t x) const { return inverse[x]; }

  static ConcreteGroup from_law(std::string name, std::uint32_t n,
                                const std::function<std::uint32_t(std::uint32_t, std::uint32_t)>& law) {
    ConcreteGroup g;
    g.name = std::move(name);
    g.n = n;
    g.table.resize(static_cast<std::size_t>(n) * n);
    for (std::uint32_t x = 0; x < n; ++x)
      for (std::uint32_t y = 0; y < n; ++y) g.table[static_cast<std::size_t>(x) * n + y] = law(x, y);
    g.inverse.assign(n, 0);
    for (std::uint32_t x = 0; x < n; ++x)
      for (std::uint32_t y = 0; y < n; ++y)
        if (g.mul(x, y) == 0) g.inverse[x] = y;
    return g;
  }
};

namespace concrete {

inline ConcreteGroup cyclic(std::uint32_t m) {
  return ConcreteGroup::from_law("C" + std::to_string(m), m, [m](auto x, auto y) { return (x + y) % m; });
}

inline ConcreteGroup product(const ConcreteGroup& A, const ConcreteGroup& B, std::string name) {
  const auto na = A.n;
  return ConcreteGroup::from_law(std::move(name), A.n * B.n, [&A, &B, na](auto x, auto y) {
    return A.mul(x % na, y % na) + na * B.mul(x / na, y / na);
  });
}

/// (r^a s^e): index a + 4e.
inline ConcreteGroup dihedral8() {
  return ConcreteGroup::from_law("D4", 8, [](std::uint32_t x, std::uint32_t y) {
    std::uint32_t a = x % 4, e = x / 4, b = y % 4, f = y / 4;
    std::uint32_t c = (e ? a + 4 - b : a + b) % 4;
    return c + 4 * ((e + f) % 2);
  });
}

/// Units {1, i, j, k} times sign: index u + 4s.
inline ConcreteGroup quaternion8() {
  // unit products: (unit, sign flip)
  static const int prod[4][4][2] = {
      {{0, 0}, {1, 0}, {2, 0}, {3, 0}},
      {{1, 0}, {0, 1}, {3, 0}, {2, 1}},
      {{2, 0}, {3, 1}, {0, 1}, {1, 0}},
      {{3, 0}, {2, 0}, {1, 1}, {0, 1}},
  };
  return ConcreteGroup::from_law("Q8", 8, [](std::uint32_t x, std::uint32_t y) {
    const int* p = prod[x % 4][y % 4];
    std::uint32_t s = (x / 4 + y / 4 + static_cast<std::uint32_t>(p[1])) % 2;
    return static_cast<std::uint32_t>(p[0]) + 4 * s;
  });
}

/// F_2[x1,x2]/(x1^2, x2^2) (basis 1, x1, x2, x1x2 as bits) semidirect F_2^2, where
/// (1,0) acts by multiplication with 1 + x1 and (0,1) with 1 + x2. Index p + 16v.
inline ConcreteGroup kluners64() {
  auto times_x1 = [](std::uint32_t p) { return ((p & 1) ? 2u : 0u) | ((p & 4) ? 8u : 0u); };
  auto times_x2 = [](std::uint32_t p) { return ((p & 1) ? 4u : 0u) | ((p & 2) ? 8u : 0u); };
  return ConcreteGroup::from_law("G64", 64, [=](std::uint32_t x, std::uint32_t y) {
    std::uint32_t p = x % 16, v = x / 16, q = y % 16, w = y / 16;
    if (v & 1) q ^= times_x1(q);
    if (v & 2) q ^= times_x2(q);
    return (p ^ q) + 16 * (v ^ w);
  });
}

/// Upper unitriangular 3x3 matrices over F_p: (a,b,c) with c the corner, index a + pb + p^2c.
inline ConcreteGroup heisenberg(std::uint32_t p) {
  return ConcreteGroup::from_law("Heis" + std::to_string(p * p * p), p * p * p, [p](std::uint32_t x, std::uint32_t y) {
    std::uint32_t a = x % p, b = (x / p) % p, c = x / (p * p);
    std::uint32_t a2 = y % p, b2 = (y / p) % p, c2 = y / (p * p);
    return (a + a2) % p + p * ((b + b2) % p) + p * p * ((c + c2 + a * b2) % p);
  });
}

/// A x| C4 with C4 acting through C2 by inversion on the abelian group A.
inline ConcreteGroup semidirect_c4(const ConcreteGroup& A, std::string name) {
  const auto na = A.n;
  return ConcreteGroup::from_law(std::move(name), na * 4, [&A, na](std::uint32_t x, std::uint32_t y) {
    std::uint32_t a = x % na, t = x / na, b = y % na, u = y / na;
    std::uint32_t bt = (t % 2) ? A.inv(b) : b;
    return A.mul(a, bt) + na * ((t + u) % 4);
  });
}

}  // namespace concrete

struct Realization {
  AdmissibleSequence seq;
  std::vector<Elem> encode;  // concrete element -> packed element
};

/// Presents a concrete l-group as an admissible sequence. The central series is
/// built bottom-up, preferring elements of order l so that H(G) ends up as the
/// kernel of the last steps whenever I(G) is central. Sections are re-gauged so a
/// step's cocycle is zero exactly when its class is trivial.
inline Realization realize(const ConcreteGroup& C, std::uint32_t l, const std::string& name) {
  const std::uint32_t n = C.n;
  std::uint32_t r = 0;
  for (std::uint64_t m = 1; m < n; m *= l) ++r;
  {
    std::uint64_t m = 1;
    for (std::uint32_t i = 0; i < r; ++i) m *= l;
    if (m != n) throw Error("InvalidGroup", C.name + " is not an l-group");
  }
  auto powe = [&](std::uint32_t x, std::uint32_t k) {
    std::uint32_t y = 0;
    for (std::uint32_t i = 0; i < k; ++i) y = C.mul(y, x);
    return y;
  };

  // chain K_r = 1 < K_{r-1} < ... < K_0 = G; zs[t] generates K_{r-1-t} / K_{r-t}
  std::vector<std::vector<char>> K;  // K[i] membership for K_i, filled from i = r down
  std::vector<std::uint32_t> zs;
  std::vector<char> cur(n, 0);
  cur[0] = 1;
  std::vector<std::vector<char>> stack = {cur};
  while (zs.size() < r) {
    std::uint32_t pick = n;
    for (int pass = 0; pass < 2 && pick == n; ++pass) {
      for (std::uint32_t x = 1; x < n && pick == n; ++x) {
        if (cur[x] || !cur[powe(x, l)]) continue;
        if (pass == 0 && element_order(C, x) != l) continue;
        bool central = true;
        for (std::uint32_t g = 0; g < n && central; ++g) {
          std::uint32_t c = C.mul(C.mul(x, g), C.mul(C.inv(x), C.inv(g)));
          central = cur[c] != 0;
        }
        if (central) pick = x;
      }
    }
    if (pick == n) throw Error("InvalidGroup", C.name + " is not nilpotent");
    std::vector<char> next(n, 0);
    for (std::uint32_t y = 0; y < n; ++y)
      if (cur[y]) {
        std::uint32_t w = y;
        for (std::uint32_t a = 0; a < l; ++a) {
          next[w] = 1;
          w = C.mul(pick, w);
        }
      }
    zs.push_back(pick);
    cur = next;
    stack.push_back(cur);
  }
  // stack[t] = K_{r-t}
  auto Kmem = [&](std::uint32_t i) -> const std::vector<char>& { return stack[r - i]; };

  Realization R;
  R.seq.name = name;
  R.seq.l = l;
  std::vector<Elem> enc(n, 0);
  std::uint32_t lev = 1;  // l^{i-1}
  for (std::uint32_t i = 1; i <= r; ++i) {
    const std::uint32_t z = zs[r - i];
    const std::uint32_t zinv = C.inv(z);
    const auto& Ki = Kmem(i);
    std::vector<std::uint32_t> s(lev, n);
    for (std::uint32_t x = 0; x < n; ++x)
      if (s[enc[x]] == n) s[enc[x]] = x;
    auto digit = [&](std::uint32_t x) -> std::uint32_t {
      std::uint32_t w = C.mul(C.inv(s[enc[x]]), x);
      for (std::uint32_t a = 0; a < l; ++a) {
        if (Ki[w]) return a;
        w = C.mul(zinv, w);
      }
      throw Error("InvalidGroup", "coset bookkeeping failed");
    };
    auto make_theta = [&]() {
      auto th = CocycleTable::zero(l, lev);
      for (std::uint32_t g = 0; g < lev; ++g)
        for (std::uint32_t h = 0; h < lev; ++h) th.at(g, h) = static_cast<std::uint8_t>(digit(C.mul(s[g], s[h])));
      return th;
    };
    auto th = make_theta();
    if (!th.is_zero()) {
      LGroup Gprev = LGroup::build_unchecked(R.seq);
      if (auto c = is_coboundary(Gprev, th)) {
        for (std::uint32_t g = 0; g < lev; ++g) s[g] = C.mul(powe(zinv, (*c)[g]), s[g]);
        th = make_theta();
        if (!th.is_zero()) throw Error("InvalidGroup", "re-gauging failed");
      }
    }
    std::vector<Elem> next(n);
    for (std::uint32_t x = 0; x < n; ++x) next[x] = enc[x] + digit(x) * lev;
    enc = std::move(next);
    R.seq.cocycles.push_back(std::move(th));
    lev *= l;
  }
  LGroup G = LGroup::build_unchecked(R.seq);
  for (std::uint32_t x = 0; x < n; ++x)
    for (std::uint32_t y = 0; y < n; ++y)
      if (enc[C.mul(x, y)] != G.mul(enc[x], enc[y])) throw Error("InvalidGroup", "realization is not a homomorphism");
  R.encode = std::move(enc);
  return R;
}

}  // namespace malle::group
