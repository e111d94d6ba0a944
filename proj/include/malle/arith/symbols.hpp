#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <variant>
#include <vector>

#include "../error.hpp"
#include "numtheory.hpp"

namespace malle::arith {

/// Kronecker symbol (a/n), with (a/-1) = sign and the usual rule at 2.
inline int kronecker(i64 a, i64 n) {
  if (a == 0 && n == 0) throw Error("ZeroArgument", "kronecker(0, 0)");
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  int v = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++v;
  }
  if (v > 0) {
    if ((a & 1) == 0) return 0;
    if (v & 1) {
      i64 r = mod(a, 8);
      if (r == 3 || r == 5) result = -result;
    }
  }
  // Jacobi symbol (a/n), n odd positive
  a = mod(a, n);
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      i64 r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

/// A place of Q: an odd prime, the prime 2, or the real place.
struct Place {
  enum class Kind { OddPrime, Two, Infinity };
  Kind kind = Kind::Infinity;
  i64 p = 0;

  static Place odd(i64 p) {
    if (p < 3 || p % 2 == 0) throw Error("InvalidPlace", "not an odd prime: " + std::to_string(p));
    return {Kind::OddPrime, p};
  }
  static Place two() { return {Kind::Two, 2}; }
  static Place infinity() { return {Kind::Infinity, 0}; }

  std::string str() const {
    switch (kind) {
      case Kind::OddPrime: return std::to_string(p);
      case Kind::Two: return "2";
      default: return "inf";
    }
  }
  bool operator==(const Place& o) const { return kind == o.kind && p == o.p; }
};

namespace detail {
inline int eps(i64 u) { return static_cast<int>(mod(u, 4) == 3); }                    // (u-1)/2 mod 2
inline int omg(i64 u) { i64 r = mod(u, 8); return static_cast<int>(r == 3 || r == 5); }  // (u^2-1)/8 mod 2
}  // namespace detail

/// Hilbert symbol (a, b)_v in additive notation: 0 if z^2 = a x^2 + b y^2 has a
/// nonzero solution over Q_v, 1 otherwise.
inline int hilbert(i64 a, i64 b, const Place& v) {
  if (a == 0 || b == 0) throw Error("ZeroArgument", "hilbert symbol with zero argument");
  switch (v.kind) {
    case Place::Kind::Infinity: return (a < 0 && b < 0) ? 1 : 0;
    case Place::Kind::Two: {
      int al = 0, be = 0;
      while (a % 2 == 0) { a /= 2; ++al; }
      while (b % 2 == 0) { b /= 2; ++be; }
      return (detail::eps(a) * detail::eps(b) + al * detail::omg(b) + be * detail::omg(a)) & 1;
    }
    case Place::Kind::OddPrime: {
      const i64 p = v.p;
      int al = 0, be = 0;
      while (a % p == 0) { a /= p; ++al; }
      while (b % p == 0) { b /= p; ++be; }
      int s = ((al * be) & 1) && (p % 4 == 3) ? 1 : 0;
      if (be & 1) s ^= (kronecker(mod(a, p), p) == -1);
      if (al & 1) s ^= (kronecker(mod(b, p), p) == -1);
      return s;
    }
  }
  return 0;
}

/// Independent oracle for hilbert(): searches primitive solutions of
/// z^2 = a x^2 + b y^2 modulo p^k. Test use only; |a|, |b| <= 10^4.
inline int hilbert_bruteforce(i64 a, i64 b, const Place& v) {
  if (a == 0 || b == 0) throw Error("ZeroArgument", "hilbert symbol with zero argument");
  if (std::llabs(a) > 10000 || std::llabs(b) > 10000)
    throw Error("CapExceeded", "hilbert_bruteforce needs |a|,|b| <= 10^4");
  if (v.kind == Place::Kind::Infinity) {
    // z^2 = a x^2 + b y^2 over R: solvable unless both coefficients negative
    for (int x = -1; x <= 1; ++x)
      for (int y = -1; y <= 1; ++y)
        if ((x || y) && a * x * x + b * y * y >= 0) return 0;
    return 1;
  }
  const i64 p = v.p;
  // strip square factors of p (square-class invariance)
  auto reduce = [p](i64 t) {
    while (t % (p * p) == 0) t /= p * p;
    return t;
  };
  a = reduce(a);
  b = reduce(b);
  // A primitive solution mod p^k lifts (Hensel) once k >= 2m+1, where m bounds the
  // valuation of some partial derivative: m <= v_p(2) + max(v_p(a), v_p(b)).
  const int m = (p == 2 ? 1 : 0) + std::max(valuation(a, p), valuation(b, p));
  const int k = 2 * m + 1;
  i64 pk = 1;
  for (int i = 0; i < k; ++i) pk *= p;
  std::vector<char> is_sq(static_cast<std::size_t>(pk), 0);
  for (i64 z = 0; z < pk; ++z) is_sq[static_cast<std::size_t>(z * z % pk)] = 1;
  auto sq = [&](i64 t) { return is_sq[static_cast<std::size_t>(mod(t, pk))] != 0; };
  // primitive triples: x a unit (scale to 1), or p | x and y a unit (scale y to 1);
  // with p | x and p | y, z is divisible by p and the triple is not primitive.
  const i64 am = mod(a, pk), bm = mod(b, pk);
  for (i64 y = 0; y < pk; ++y)
    if (sq(am + mulmod(static_cast<u64>(bm), static_cast<u64>(y * y % pk), static_cast<u64>(pk)))) return 0;
  for (i64 x = 0; x < pk; x += p)
    if (sq(bm + mulmod(static_cast<u64>(am), static_cast<u64>(x * x % pk), static_cast<u64>(pk)))) return 0;
  return 1;
}

/// Signed squarefree integer with its prime factorization.
struct SquarefreeInt {
  int sign = 1;
  std::vector<i64> primes;  // ascending, distinct

  i64 value() const {
    i64 v = sign;
    for (i64 p : primes) v *= p;
    return v;
  }
  bool is_one() const { return sign == 1 && primes.empty(); }

  static SquarefreeInt from(i64 d) {
    if (d == 0) throw Error("ZeroArgument", "squarefree representative of 0");
    SquarefreeInt s;
    s.sign = d < 0 ? -1 : 1;
    for (auto [p, e] : factor(static_cast<u64>(d < 0 ? -d : d))) {
      if (e > 1) throw Error("NotSquarefree", std::to_string(d));
      s.primes.push_back(static_cast<i64>(p));
    }
    return s;
  }
};

/// Square-class representative of d.
inline i64 squarefree_part(i64 d) {
  if (d == 0) throw Error("ZeroArgument", "squarefree part of 0");
  i64 s = d < 0 ? -1 : 1;
  for (auto [p, e] : factor(static_cast<u64>(d < 0 ? -d : d)))
    if (e & 1) s *= static_cast<i64>(p);
  return s;
}

/// Coordinates of chi_d in the basis {chi_2, chi_-1} u {chi_p* : p odd}.
struct CharBasisDecomposition {
  int coeff_minus1 = 0;
  int coeff_2 = 0;
  std::vector<i64> odd_primes;

  bool operator==(const CharBasisDecomposition&) const = default;
};

inline CharBasisDecomposition chi_basis_decompose(const SquarefreeInt& d) {
  CharBasisDecomposition c;
  c.coeff_minus1 = d.sign < 0 ? 1 : 0;
  for (i64 p : d.primes) {
    if (p == 2) {
      c.coeff_2 = 1;
      continue;
    }
    c.odd_primes.push_back(p);
    if (p % 4 == 3) c.coeff_minus1 ^= 1;
  }
  return c;
}

/// Square class recovered from a decomposition: (-1)^c * 2^e * prod p*.
inline i64 chi_basis_reassemble(const CharBasisDecomposition& c) {
  i64 v = c.coeff_minus1 ? -1 : 1;
  if (c.coeff_2) v *= 2;
  for (i64 p : c.odd_primes) v *= (p % 4 == 3) ? -p : p;
  return squarefree_part(v);
}

/// Distinguished generators: sigma_p (odd p), sigma_2(1), sigma_2(2).
struct InertiaGen {
  enum class Kind { Odd, Two1, Two2 };
  Kind kind;
  i64 p = 0;
  static InertiaGen odd(i64 p) { return {Kind::Odd, p}; }
  static InertiaGen two1() { return {Kind::Two1, 2}; }
  static InertiaGen two2() { return {Kind::Two2, 2}; }
};

inline int chi_eval_inertia(const SquarefreeInt& d, const InertiaGen& g) {
  auto c = chi_basis_decompose(d);
  switch (g.kind) {
    case InertiaGen::Kind::Odd:
      return std::binary_search(d.primes.begin(), d.primes.end(), g.p) ? 1 : 0;
    case InertiaGen::Kind::Two1: return c.coeff_2;
    default: return c.coeff_minus1;
  }
}

/// chi_d(Frob_q) for q unramified in Q(sqrt d): 0 iff q splits.
inline int chi_eval_frob(i64 d, i64 q) {
  if (q < 3 || q % 2 == 0) throw Error("InvalidPlace", "Frobenius at non-odd prime " + std::to_string(q));
  if (d % q == 0) throw Error("Ramified", std::to_string(q) + " divides " + std::to_string(d));
  return kronecker(mod(d, q), q) == 1 ? 0 : 1;
}

/// Absolute discriminant of Q(sqrt d).
inline i64 quadratic_disc(i64 d) {
  if (d == 1) throw Error("UnitInput", "quadratic_disc(1)");
  if (d == 0) throw Error("ZeroArgument", "quadratic_disc(0)");
  i64 a = d < 0 ? -d : d;
  return mod(d, 4) == 1 ? a : 4 * a;
}

}  // namespace malle::arith
