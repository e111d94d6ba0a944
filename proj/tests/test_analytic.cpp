#include <gtest/gtest.h>

#include <random>

#include "malle/analytic/analytic.hpp"
#include "malle/arith/sieve.hpp"

using namespace malle;
using namespace malle::analytic;

namespace {

std::uint64_t squarefree_count(std::uint64_t x) {
  auto S = arith::shared_sieve(x);
  std::uint64_t q = 0;
  for (std::uint64_t n = 1; n <= x; ++n) q += S->mu[n] != 0;
  return q;
}

}  // namespace

TEST(AZ, SpecialValues) {
  auto all = PrimeCondition::all();
  for (std::uint64_t x : {1ull, 10ull, 1000ull, 100000ull}) {
    EXPECT_NEAR(std::abs(a_z_sum(x, 0, all) - cplx(1, 0)), 0, 1e-12);
    EXPECT_NEAR(a_z_sum(x, 1, all).real(), static_cast<double>(squarefree_count(x)), 1e-6);
  }
  EXPECT_EQ(a_z_sum(0, 1, all), cplx(0, 0));
}

TEST(AZ, PolynomialInZ) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  auto S = arith::shared_sieve(10000);
  auto cond = PrimeCondition::residue(4, {1});
  for (int t = 0; t < 20; ++t) {
    cplx z(u(rng), u(rng));
    for (const auto& c : {PrimeCondition::all(), cond}) {
      cplx direct = 0;
      for (std::uint64_t n = 1; n <= 10000; ++n) {
        if (S->mu[n] == 0) continue;
        bool ok = true;
        for (std::uint64_t m = n; m > 1; m /= S->lpf[m]) ok = ok && c.allowed(S->lpf[m]);
        if (ok) direct += std::pow(z, static_cast<int>(S->omega[n]));
      }
      cplx got = a_z_sum(10000, z, c);
      EXPECT_LT(std::abs(got - direct), 1e-9 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST(AZ, SeriesAndErrors) {
  std::vector<std::uint64_t> xs = {100, 1000, 10000};
  auto v = a_z_series(xs, cplx(2, 0), PrimeCondition::all());
  ASSERT_EQ(v.size(), 3u);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(v[i], a_z_sum(xs[i], cplx(2, 0), PrimeCondition::all()));
  EXPECT_THROW(a_z_sum(10, cplx(17, 0), PrimeCondition::all()), Error);
  EXPECT_THROW(a_z_series({1000, 100}, 1, PrimeCondition::all()), Error);
  EXPECT_THROW(a_z_sum(arith::kSieveCap + 1, 1, PrimeCondition::all()), Error);
  EXPECT_THROW(PrimeCondition::residue(4, {2}), Error);
  EXPECT_NEAR(PrimeCondition::residue(4, {1}).density(), 0.5, 1e-12);
  EXPECT_NEAR(PrimeCondition::residue(8, {1, 3}).density(), 0.5, 1e-12);
}

TEST(AZ, ShapeAtOne) {
  std::vector<std::uint64_t> xs;
  for (std::uint64_t x = 1000000 / 64; x <= 1000000; x *= 2) xs.push_back(x);
  auto f = sd_shape_check(1, PrimeCondition::all(), xs);
  EXPECT_NEAR(f.log_power, 0, 0.02);
  EXPECT_NEAR(f.c, 6 / (M_PI * M_PI), 0.01);
}

TEST(Convolution, Constants) {
  EXPECT_NEAR(c3_constant(1, 0, 1, 0), 1, 1e-12);
  EXPECT_NEAR(c3_constant(2, 0, 3, 0), 6, 1e-12);
  const double grid[] = {-0.5, 0, 0.5, 1, 2};
  for (double A : grid)
    for (double B : grid) {
      double c = c3_constant(1, A, 1, B);
      EXPECT_GT(c, 0) << A << " " << B;
      EXPECT_NEAR(c, c3_constant(1, B, 1, A), 1e-12);
    }
  EXPECT_THROW(c3_constant(1, -1, 1, 0), Error);
}

TEST(Convolution, DivisorSum) {
  auto r = convolution_check(ArithmeticFunctionSpec::one(), ArithmeticFunctionSpec::one(), 1000000);
  double exact = 0;
  for (std::uint64_t d = 1; d <= 1000000; ++d) exact += static_cast<double>(1000000 / d);
  EXPECT_EQ(r.direct, exact);
  EXPECT_NEAR(r.c3, 1, 1e-12);
  EXPECT_LT(r.relative_error, 0.02);
}

TEST(Convolution, Symmetry) {
  auto a = convolution_check(ArithmeticFunctionSpec::squarefree(), ArithmeticFunctionSpec::one(), 200000);
  auto b = convolution_check(ArithmeticFunctionSpec::one(), ArithmeticFunctionSpec::squarefree(), 200000);
  EXPECT_EQ(a.direct, b.direct);
  EXPECT_NEAR(a.predicted, b.predicted, 1e-9 * a.predicted);
}

TEST(Convolution, DeltaIsIdentity) {
  auto sq = ArithmeticFunctionSpec::squarefree();
  auto r = convolution_check(sq, ArithmeticFunctionSpec::delta(), 100000);
  EXPECT_EQ(r.direct, static_cast<double>(squarefree_count(100000)));
  EXPECT_LT(r.relative_error, 0.01);
  EXPECT_THROW(convolution_check(sq, sq, 3), Error);
}

TEST(Filter, Examples) {
  auto r = filter_identity_check(2, 1, {0}, 4);
  EXPECT_EQ(r.lhs, 1.0);
  EXPECT_NEAR(r.rhs.real(), 1.0, 1e-12);
  auto s = filter_identity_check(2, 2, {1, 0}, 3);
  EXPECT_EQ(s.lhs, 0.5);
  EXPECT_LT(s.error, 1e-12);
}

TEST(Filter, Exhaustive) {
  for (std::uint32_t l : {2u, 3u})
    for (std::uint32_t k = 1; k <= 3; ++k)
      for (std::uint32_t n = 0; n <= 8; ++n) {
        std::vector<std::uint32_t> a(k, 0);
        std::uint32_t combos = 1;
        for (std::uint32_t i = 0; i < k; ++i) combos *= l;
        for (std::uint32_t idx = 0; idx < combos; ++idx) {
          std::uint32_t t = idx;
          for (std::uint32_t i = 0; i < k; ++i, t /= l) a[i] = t % l;
          auto r = filter_identity_check(l, k, a, n);
          ASSERT_LT(r.error, 1e-12) << l << " " << k << " " << n;
          if (k > 1) {
            EXPECT_LE(r.tail, r.tail_bound + 1e-12);
          }
        }
      }
}

TEST(Filter, Caps) {
  EXPECT_THROW(filter_identity_check(2, 2, {0, 0}, 13), Error);
  EXPECT_THROW(filter_identity_check(3, 7, std::vector<std::uint32_t>(7, 0), 2), Error);
  EXPECT_THROW(filter_identity_check(2, 2, {0}, 2), Error);
}
