#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "common.hpp"
#include "malle/arith/sieve.hpp"
#include "malle/counting/count.hpp"
#include "malle/counting/enumerate.hpp"
#include "malle/counting/fit.hpp"
#include "malle/group/invariants.hpp"
#include "malle/oracle/abelian.hpp"

using namespace malle;
using namespace malle::counting;
using testutil::grp;

namespace {

Target target(const std::string& n) { return Target::of(testutil::catalog().nilpotent(n)); }

std::uint64_t enumerate_count(const Target& T, u128 X, bool two_unram = false, Shard s = {}) {
  std::uint64_t n = 0;
  EnumConstraints C;
  C.X = X;
  C.two_unramified = two_unram;
  C.shard = s;
  enumerate_tuples(T, C, [&](const TupleView&) { ++n; });
  return n;
}

std::uint64_t squarefree_count(std::uint64_t x) {
  auto S = arith::shared_sieve(std::max<std::uint64_t>(x, 2));
  std::uint64_t q = 0;
  for (std::uint64_t n = 1; n <= x; ++n) q += S->mu[n] != 0;
  return q;
}

std::vector<std::uint64_t> epi_discs(const std::string& n, u128 X) {
  const auto& cg = testutil::catalog().at(n);
  ExactOptions opt;
  opt.two_unramified = true;
  opt.record = true;
  auto res = count_exact(cg.group, cg.spec, X, opt);
  std::vector<std::uint64_t> d;
  for (const auto& r : res.records)
    if (r.verdict == "epi") d.push_back(static_cast<std::uint64_t>(r.disc));
  EXPECT_EQ(res.report.unknown_tuples, 0u);
  return d;
}

}  // namespace

TEST(Enumerate, QuadraticSmall) {
  auto T = target("C2");
  std::multiset<i64> ds;
  EnumConstraints C;
  C.X = 10;
  enumerate_tuples(T, C, [&](const TupleView& tv) { ds.insert(tv.v[1]); });
  EXPECT_EQ(ds.size(), 13u);
  for (i64 d : {-1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10}) EXPECT_EQ(ds.count(d), 1u) << d;
  EXPECT_EQ(enumerate_count(T, 0), 0u);
  EXPECT_EQ(enumerate_count(T, 1), 1u);  // only d = -1
}

TEST(Enumerate, KleinAudit) {
  auto T = target("V4");
  EnumConstraints C;
  C.X = 100;
  std::uint64_t n = 0;
  enumerate_tuples(T, C, [&](const TupleView& tv) {
    ++n;
    u128 norm = 1;
    std::set<std::uint64_t> primes;
    int neg = 0;
    for (Elem g = 1; g < 4; ++g) {
      auto a = static_cast<std::uint64_t>(std::llabs(tv.v[g]));
      neg += tv.v[g] < 0;
      norm *= static_cast<u128>(a) * a;
      for (auto [p, e] : arith::factor(a)) {
        EXPECT_EQ(e, 1);
        EXPECT_TRUE(primes.insert(p).second);
      }
    }
    EXPECT_LE(neg, 1);
    EXPECT_EQ(norm, tv.norm);
    EXPECT_LE(norm, 100u);
  });
  EXPECT_GT(n, 0u);
}

TEST(Enumerate, DeterministicAndShardAdditive) {
  auto T = target("C4");
  std::vector<std::string> a, b;
  EnumConstraints C;
  C.X = 100000;
  enumerate_tuples(T, C, [&](const TupleView& tv) { a.push_back(std::to_string(tv.v[1]) + "," + std::to_string(tv.v[2]) + "," + std::to_string(tv.v[3])); });
  enumerate_tuples(T, C, [&](const TupleView& tv) { b.push_back(std::to_string(tv.v[1]) + "," + std::to_string(tv.v[2]) + "," + std::to_string(tv.v[3])); });
  EXPECT_EQ(a, b);
  std::uint64_t sum = 0;
  for (std::uint32_t s = 0; s < 4; ++s) sum += enumerate_count(T, 100000, false, {4, s});
  EXPECT_EQ(sum, a.size());
  EXPECT_THROW(enumerate_count(T, 10, false, {4, 4}), Error);
}

TEST(Exact, ShardAdditivity) {
  const auto& cg = testutil::catalog().at("C4");
  auto full = count_exact(cg.group, cg.spec, 100000).report;
  BigInt lo = 0, up = 0;
  for (std::uint32_t s = 0; s < 4; ++s) {
    ExactOptions opt;
    opt.shard = {4, s};
    auto r = count_exact(cg.group, cg.spec, 100000, opt).report;
    lo += r.lower;
    up += r.upper;
  }
  EXPECT_EQ(lo, full.lower);
  EXPECT_EQ(up, full.upper);
  ExactOptions threaded;
  threaded.threads = 3;
  EXPECT_EQ(count_exact(cg.group, cg.spec, 100000, threaded).report.lower, full.lower);
}

TEST(Upper, QuadraticClosedForm) {
  auto T = target("C2");
  for (std::uint64_t X : {10ull, 100ull, 1000ull, 12345ull, 1000000ull}) {
    auto up = count_upper(T, X).upper;
    EXPECT_EQ(up, BigInt(2 * squarefree_count(X) - 1)) << X;
  }
}

TEST(Upper, MatchesEnumeration) {
  for (const std::string n : {"C2", "V4", "C4", "C2xC4", "D4", "Q8", "C8", "C2^3", "C6", "Q8xC3", "Heis27", "C3"}) {
    auto T = target(n);
    for (u128 X : {u128{1000}, u128{100000}, u128{3000000}}) {
      if (T.order >= 8 && X < 100000) continue;
      EXPECT_EQ(count_upper(T, X).upper, BigInt(enumerate_count(T, X))) << n << " " << u128_str(X);
    }
  }
}

TEST(Upper, WindowsMatchSingleCalls) {
  auto T = target("D4");
  std::vector<u128> xs = {1000000, 10000000, 100000000};
  auto w = count_upper_windows(T, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(w[i], count_upper(T, xs[i]).upper);
}

TEST(Heuristic, AbelianEqualsPlainCount) {
  for (const std::string n : {"C2", "V4", "C4", "C2xC4"}) {
    auto T = target(n);
    double h = count_heuristic(T, 10000000, 1).heuristic;
    EXPECT_NEAR(h, static_cast<double>(count_upper(T, 10000000).upper), 1e-6 * h) << n;
  }
}

TEST(Heuristic, WeightsFromBreaks) {
  for (const auto& cg : testutil::catalog().groups()) {
    auto T = Target::of(group::NilpotentGroup({cg.group}));
    for (Elem g = 1; g < T.order; ++g) {
      std::uint32_t w = 1;
      for (std::uint32_t i = 0; i < group::breaks(cg.group, g); ++i) w *= cg.group.l();
      EXPECT_EQ(w, T.conj_size[g]);
    }
  }
}

TEST(Heuristic, DihedralBelowUpper) {
  auto T = target("D4");
  auto h = count_heuristic(T, 100000000, 1);
  EXPECT_LT(h.heuristic, static_cast<double>(count_upper(T, 100000000).upper));
  EXPECT_FALSE(h.note.empty());
  EXPECT_THROW(count_heuristic(target("Q8"), 1000, 2), Error);
  EXPECT_NO_THROW(count_heuristic(target("Heis27"), 1000000, 2));
}

TEST(Exact, QuadraticMatchesUpper) {
  const auto& cg = testutil::catalog().at("C2");
  for (std::uint64_t X : {10ull, 100ull, 10000ull}) {
    auto r = count_exact(cg.group, cg.spec, X).report;
    EXPECT_EQ(r.lower, count_upper(target("C2"), X).upper);
    EXPECT_EQ(r.unknown_tuples, 0u);
  }
  EXPECT_EQ(count_exact(cg.group, cg.spec, 10).report.lower, 13);
}

TEST(Exact, OracleMultisets) {
  for (const std::string n : {"C2", "V4", "C4", "C2xC4"})
    EXPECT_EQ(epi_discs(n, 100000), oracle::oracle_count(oracle::abelian_by_name(n), 100000, true).discs) << n;
  EXPECT_EQ(epi_discs("C8", 10000000), oracle::oracle_count(oracle::abelian_by_name("C8"), 10000000, true).discs);
}

TEST(Exact, OracleMultisetsLarger) {
  EXPECT_EQ(epi_discs("V4", 100000000), oracle::oracle_count(oracle::abelian_by_name("V4"), 100000000, true).discs);
  EXPECT_EQ(epi_discs("C4", 1000000000), oracle::oracle_count(oracle::abelian_by_name("C4"), 1000000000, true).discs);
  EXPECT_EQ(epi_discs("C2xC4", 100000000), oracle::oracle_count(oracle::abelian_by_name("C2xC4"), 100000000, true).discs);
  EXPECT_EQ(epi_discs("C2:C4", 100000000), oracle::oracle_count(oracle::abelian_by_name("C2:C4"), 100000000, true).discs);
}

TEST(Exact, BracketHolds) {
  const auto& cg = testutil::catalog().at("C8");
  auto r = count_exact(cg.group, cg.spec, 100000).report;
  EXPECT_LE(r.lower, r.upper);
  EXPECT_EQ(r.upper - r.lower, r.unknown_tuples);
}

TEST(Exact, QuaternionNoUnknowns) {
  const auto& cg = testutil::catalog().at("Q8");
  auto r = count_exact(cg.group, cg.spec, 10000000000ull).report;
  EXPECT_EQ(r.unknown_tuples, 0u);
  EXPECT_GT(r.lower, 0);
}

TEST(Exact, WindowsCumulative) {
  const auto& cg = testutil::catalog().at("C4");
  std::vector<u128> xs = {1000, 10000, 100000};
  auto [e, u] = count_exact_windows(cg.group, cg.spec, xs);
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_EQ(BigInt(e[i]), count_exact(cg.group, cg.spec, xs[i]).report.lower);
}

TEST(Exact, RejectsWrongTargets) {
  EXPECT_THROW(count_exact(grp("Heis27"), testutil::catalog().at("Heis27").spec, 100), Error);
  EXPECT_THROW(count_exact(grp("C4"), testutil::catalog().at("C2").spec, 100), Error);
}

TEST(Fit, Synthetic) {
  std::vector<std::pair<double, double>> a, b;
  for (double X : dyadic(1e4, 12)) {
    a.emplace_back(X, std::sqrt(X) * std::pow(std::log(X), 2));
    b.emplace_back(X, 3 * X);
  }
  auto fa = fit_asymptotic(a, 0.5);
  EXPECT_NEAR(fa.log_power, 2, 1e-6);
  auto fb = fit_asymptotic(b, 1);
  EXPECT_NEAR(fb.log_power, 0, 1e-9);
  EXPECT_NEAR(fb.c, 3, 1e-9);
  EXPECT_NEAR(fit_exponent(b).a, 1, 1e-9);
  a.resize(5);
  EXPECT_THROW(fit_asymptotic(a, 0.5), Error);
  std::vector<std::pair<double, double>> z(8, {100.0, 0.0});
  EXPECT_THROW(fit_exponent(z), Error);
}

TEST(Fit, QuadraticDensity) {
  const auto& cg = testutil::catalog().at("C2");
  std::vector<u128> xs;
  for (double X : dyadic(1e7 / 512, 10)) xs.push_back(static_cast<u128>(X));
  auto [e, u] = count_exact_windows(cg.group, cg.spec, xs);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(static_cast<double>(xs[i]), static_cast<double>(e[i]));
  auto f = fit_asymptotic(pts, 1);
  EXPECT_NEAR(f.log_power, 0, 0.02);
  EXPECT_NEAR(f.c / (12 / (M_PI * M_PI)), 1, 0.05);
}

TEST(Fit, QuaternionUpperShape) {
  auto T = target("Q8");
  std::vector<u128> xs;
  for (double X : dyadic(1e12, 12)) xs.push_back(static_cast<u128>(X));
  auto w = count_upper_windows(T, xs);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(static_cast<double>(xs[i]), w[i].convert_to<double>());
  EXPECT_NEAR(fit_exponent(pts).a, 0.25, 0.03);
}
