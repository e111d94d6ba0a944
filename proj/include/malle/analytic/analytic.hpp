#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "../arith/numtheory.hpp"
#include "../arith/sieve.hpp"
#include "../counting/fit.hpp"
#include "../error.hpp"

namespace malle::analytic {

using cplx = std::complex<double>;
using arith::u64;

/// Primes p with p mod m in R and p outside a finite excluded set.
struct PrimeCondition {
  u64 m = 1;
  std::vector<u64> residues;  // empty with m = 1: every prime
  std::vector<u64> excluded;

  static PrimeCondition all() { return {}; }
  static PrimeCondition residue(u64 m, std::vector<u64> R) {
    PrimeCondition c;
    c.m = m;
    c.residues = std::move(R);
    for (auto r : c.residues)
      if (std::gcd(r, m) != 1) throw Error("InvalidCondition", "residue " + std::to_string(r) + " not coprime to modulus");
    return c;
  }

  bool allowed(u64 p) const {
    if (std::find(excluded.begin(), excluded.end(), p) != excluded.end()) return false;
    if (m == 1) return true;
    return std::find(residues.begin(), residues.end(), p % m) != residues.end();
  }

  double density() const {
    if (m == 1) return 1.0;
    u64 phi = 0;
    for (u64 r = 1; r <= m; ++r)
      if (std::gcd(r, m) == 1) ++phi;
    return static_cast<double>(residues.size()) / static_cast<double>(phi);
  }
};

namespace detail {

/// ok[n]: n squarefree with every prime factor allowed.
inline std::vector<char> supported(u64 x, const PrimeCondition& cond, const arith::SieveTables& S) {
  std::vector<char> ok(x + 1, 0);
  if (x >= 1) ok[1] = 1;
  for (u64 n = 2; n <= x; ++n) {
    u64 p = S.lpf[n], m = n / p;
    ok[n] = m % p != 0 && ok[m] && cond.allowed(p);
  }
  return ok;
}

}  // namespace detail

/// A_z(x) at every bound in xs (ascending).
inline std::vector<cplx> a_z_series(const std::vector<u64>& xs, cplx z, const PrimeCondition& cond) {
  if (xs.empty()) return {};
  if (std::abs(z) > 16) throw Error("CapExceeded", "|z| > 16");
  if (!std::is_sorted(xs.begin(), xs.end())) throw Error("InvalidWindows", "bounds must be ascending");
  const u64 x = xs.back();
  if (x > arith::kSieveCap) throw Error("CapExceeded", "x beyond the sieve cap");
  auto S = arith::shared_sieve(std::max<u64>(x, 2));
  auto ok = detail::supported(x, cond, *S);
  std::vector<cplx> zp(40, cplx(1, 0));
  for (std::size_t k = 1; k < zp.size(); ++k) zp[k] = zp[k - 1] * z;
  std::vector<cplx> out;
  cplx acc = 0;
  std::size_t idx = 0;
  for (u64 n = 1; n <= x; ++n) {
    if (ok[n]) acc += zp[S->omega[n]];
    while (idx < xs.size() && xs[idx] == n) {
      out.push_back(acc);
      ++idx;
    }
  }
  while (out.size() < xs.size()) out.push_back(acc);
  return out;
}

inline cplx a_z_sum(u64 x, cplx z, const PrimeCondition& cond) {
  if (x == 0) return 0;
  return a_z_series({x}, z, cond).front();
}

/// Fits Re A_z(x) against C x (log x)^{w - 1}; the reported log_power estimates w - 1.
inline counting::FitReport sd_shape_check(cplx z, const PrimeCondition& cond, const std::vector<u64>& xs) {
  auto v = a_z_series(xs, z, cond);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(static_cast<double>(xs[i]), v[i].real());
  return counting::fit_asymptotic(pts, 1.0);
}

// ---------------------------------------------------------------------------
// Convolution of mean-value functions

/// Arithmetic function with partial sums ~ C x (log x)^A, evaluated exactly by sieve.
struct ArithmeticFunctionSpec {
  enum class Kind { Squarefree, One, Delta };
  Kind kind = Kind::Squarefree;
  double C = 6.0 / (M_PI * M_PI);
  double A = 0;

  static ArithmeticFunctionSpec squarefree() { return {Kind::Squarefree, 6.0 / (M_PI * M_PI), 0}; }
  static ArithmeticFunctionSpec one() { return {Kind::One, 1.0, 0}; }
  /// 1 at n = 1 only; its partial sums are constant, outside the convolution estimate.
  static ArithmeticFunctionSpec delta() { return {Kind::Delta, 1.0, -1}; }

  /// Partial sums F(0..x).
  std::vector<std::int64_t> prefix(u64 x) const {
    std::vector<std::int64_t> F(x + 1, 0);
    std::shared_ptr<const arith::SieveTables> S;
    if (kind == Kind::Squarefree) S = arith::shared_sieve(std::max<u64>(x, 2));
    std::int64_t acc = 0;
    for (u64 n = 1; n <= x; ++n) {
      switch (kind) {
        case Kind::Squarefree: acc += S->mu[n] != 0; break;
        case Kind::One: acc += 1; break;
        case Kind::Delta: acc += n == 1; break;
      }
      F[n] = acc;
    }
    return F;
  }

  std::int64_t value(u64 n, const std::vector<std::int64_t>& F) const { return F[n] - F[n - 1]; }
};

/// sum_{k >= 0} (-1)^k binom(B, k) / (2^k (A + k + 1)), truncated below 1e-12.
inline double binomial_series(double A, double B) {
  double sum = 0, binom = 1;
  for (int k = 0; k < 400; ++k) {
    const double term = (k % 2 ? -1.0 : 1.0) * binom / (std::ldexp(1.0, k) * (A + k + 1));
    sum += term;
    if (std::abs(term) < 1e-12 && k > 2) return sum;
    binom *= (B - k) / (k + 1);
  }
  throw Error("SeriesDivergence", "binomial series did not converge");
}

inline double c3_constant(double C1, double A, double C2, double B) {
  if (!(A > -1) || !(B > -1)) throw Error("SeriesDivergence", "exponents must exceed -1");
  return C1 * C2 *
         (std::pow(2.0, -A - 1) * binomial_series(A, B) + std::pow(2.0, -B - 1) * binomial_series(B, A));
}

struct ConvolutionResult {
  double direct = 0;
  double predicted = 0;
  double relative_error = 0;
  double c3 = 0;
};

/// Sum_{n <= x} (f * g)(n) by the hyperbola method against C3 x (log x)^{A + B + 1}.
inline ConvolutionResult convolution_check(const ArithmeticFunctionSpec& f, const ArithmeticFunctionSpec& g, u64 x) {
  if (x < 4) throw Error("InsufficientData", "x too small");
  auto F = f.prefix(x), G = g.prefix(x);
  const u64 r = static_cast<u64>(arith::iroot(x, 2));
  std::int64_t total = 0;
  for (u64 a = 1; a <= r; ++a) total += f.value(a, F) * G[x / a] + g.value(a, G) * F[x / a];
  total -= F[r] * G[r];
  ConvolutionResult out;
  out.direct = static_cast<double>(total);
  const double lx = std::log(static_cast<double>(x));
  using K = ArithmeticFunctionSpec::Kind;
  if (f.kind == K::Delta || g.kind == K::Delta) {
    // f * delta = f
    const auto& h = f.kind == K::Delta ? g : f;
    out.c3 = h.kind == K::Delta ? 0 : h.C;
    out.predicted = h.kind == K::Delta ? 1.0 : h.C * static_cast<double>(x) * std::pow(lx, h.A);
  } else {
    out.c3 = c3_constant(f.C, f.A, g.C, g.A);
    out.predicted = out.c3 * static_cast<double>(x) * std::pow(lx, f.A + g.A + 1);
  }
  out.relative_error = std::abs(out.direct - out.predicted) / out.predicted;
  return out;
}

// ---------------------------------------------------------------------------
// Roots-of-unity filter

struct FilterResult {
  double lhs = 0;
  cplx rhs = 0;
  double error = 0;       // |lhs - rhs|
  double main_term = 0;   // l^{1-k} [n = sum a mod l]
  double tail_bound = 0;  // k * delta^n
  double tail = 0;        // |rhs - main_term|
};

/// Kahan-compensated complex accumulator.
struct KahanC {
  cplx sum = 0, comp = 0;
  void add(cplx v) {
    cplx y = v - comp;
    cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

/// Checks that the share of k-slot assignments of n primes with slot counts = a (mod l)
/// equals the character-sum expression. The degree d cancels over Q and is accepted for
/// interface symmetry.
inline FilterResult filter_identity_check(std::uint32_t l, std::uint32_t k, const std::vector<std::uint32_t>& a,
                                          std::uint32_t n, std::uint32_t d = 1) {
  if (a.size() != k || k == 0) throw Error("InvalidArgument", "a must have k entries");
  if (n > 12) throw Error("CapExceeded", "n > 12");
  std::uint64_t lk = 1;
  for (std::uint32_t i = 0; i < k; ++i) lk *= l;
  if (lk > 729) throw Error("CapExceeded", "l^k > 3^6");
  if (d == 0) throw Error("InvalidArgument", "d = 0");
  // lhs: brute force over k^n assignments
  std::uint64_t total = 1;
  for (std::uint32_t i = 0; i < n; ++i) total *= k;
  std::uint64_t good = 0;
  std::vector<std::uint32_t> cnt(k);
  for (std::uint64_t s = 0; s < total; ++s) {
    std::fill(cnt.begin(), cnt.end(), 0);
    std::uint64_t t = s;
    for (std::uint32_t i = 0; i < n; ++i, t /= k) ++cnt[t % k];
    bool ok = true;
    for (std::uint32_t g = 0; g < k && ok; ++g) ok = cnt[g] % l == a[g] % l;
    good += ok;
  }
  FilterResult R;
  R.lhs = static_cast<double>(good) / static_cast<double>(total);
  // rhs
  const double two_pi = 2 * M_PI;
  auto zeta = [&](std::int64_t e) {
    double ang = two_pi * static_cast<double>(((e % l) + l) % l) / l;
    return cplx(std::cos(ang), std::sin(ang));
  };
  KahanC acc;
  double delta = 0;
  std::vector<std::uint32_t> c(k, 0);
  for (std::uint64_t idx = 0; idx < lk; ++idx) {
    std::uint64_t t = idx;
    for (std::uint32_t g = 0; g < k; ++g, t /= l) c[g] = static_cast<std::uint32_t>(t % l);
    std::int64_t dot = 0;
    cplx inner = 0;
    bool constant = true;
    for (std::uint32_t g = 0; g < k; ++g) {
      dot += static_cast<std::int64_t>(c[g]) * a[g];
      inner += zeta(c[g]) / static_cast<double>(k);
      constant = constant && c[g] == c[0];
    }
    if (!constant) delta = std::max(delta, std::abs(inner));
    acc.add(zeta(-dot) * std::pow(inner, static_cast<int>(n)));
  }
  R.rhs = acc.sum / static_cast<double>(lk);
  R.error = std::abs(cplx(R.lhs, 0) - R.rhs);
  std::uint32_t sa = 0;
  for (auto x : a) sa += x;
  R.main_term = (n % l == sa % l) ? static_cast<double>(l) / static_cast<double>(lk) : 0.0;
  R.tail = std::abs(R.rhs - cplx(R.main_term, 0));
  R.tail_bound = k * std::pow(delta, static_cast<double>(n));
  return R;
}

}  // namespace malle::analytic
