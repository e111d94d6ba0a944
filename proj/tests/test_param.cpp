#include <gtest/gtest.h>

#include <random>
#include <set>

#include "common.hpp"
#include "malle/counting/count.hpp"
#include "malle/group/invariants.hpp"
#include "malle/param/pipeline.hpp"
#include "malle/param/tuple.hpp"

using namespace malle;
using namespace malle::param;
using group::Elem;
using testutil::grp;

namespace {

const ObstructionSpec& spec(const std::string& n) { return testutil::catalog().at(n).spec; }

SquarefreeTuple tuple(std::uint32_t order, std::initializer_list<std::pair<Elem, i64>> entries) {
  SquarefreeTuple t;
  t.v.assign(order, 1);
  for (auto [g, x] : entries) t.v[g] = x;
  return t;
}

int inv_at(const std::vector<std::pair<arith::Place, int>>& inv, const std::string& place) {
  for (const auto& [p, x] : inv)
    if (p.str() == place) return x;
  return 0;
}

/// Random Prim tuple for an l = 2 group: odd primes scattered over elements, at most
/// one negative entry, optionally a factor 2.
SquarefreeTuple random_tuple(const group::LGroup& G, std::mt19937_64& rng) {
  static const std::vector<i64> primes = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73};
  SquarefreeTuple t;
  t.v.assign(G.order(), 1);
  std::vector<i64> ps = primes;
  std::shuffle(ps.begin(), ps.end(), rng);
  const int k = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < k; ++i) t.v[1 + rng() % (G.order() - 1)] *= ps[static_cast<std::size_t>(i)];
  if (rng() % 3 == 0) t.v[1 + rng() % (G.order() - 1)] *= 2;
  if (rng() % 2 == 0) t.v[1 + rng() % (G.order() - 1)] *= -1;
  return t;
}

}  // namespace

TEST(Pow, ForwardExamples) {
  EXPECT_EQ(pow_forward(2, {1, 5, 7, 3}), (std::vector<i64>{15, 21}));
  EXPECT_EQ(pow_forward(3, std::vector<i64>(8, 1)), (std::vector<i64>{1, 1, 1}));
}

TEST(Pow, InverseExamples) {
  EXPECT_EQ(pow_inverse({15, 21}), (std::vector<i64>{1, 5, 7, 3}));
  EXPECT_EQ(pow_inverse({-1, -1}), (std::vector<i64>{1, 1, 1, -1}));
  EXPECT_EQ(pow_inverse({6, 2}), (std::vector<i64>{1, 3, 1, 2}));
}

TEST(Pow, RoundtripRandom) {
  std::mt19937_64 rng(5);
  const auto& G = grp("G64");
  for (int t = 0; t < 100000; ++t) {
    auto x = random_tuple(G, rng);
    ASSERT_EQ(pow_inverse(pow_forward(G.r(), x.v)), x.v);
  }
  // and the other way on random squarefree coordinate vectors
  for (int t = 0; t < 2000; ++t) {
    std::vector<i64> w(4);
    for (auto& x : w) {
      do x = static_cast<i64>(rng() % 2000) + 1;
      while (arith::squarefree_part(x) != x);
      if (rng() & 1) x = -x;
    }
    ASSERT_EQ(pow_forward(4, pow_inverse(w)), w);
  }
}

TEST(Pow, GeneralLRoundtrip) {
  // l = 3, r <= 2, supports of primes <= 100 placed on every element
  for (std::uint32_t r = 1; r <= 2; ++r) {
    const std::uint32_t n = r == 1 ? 3 : 9;
    for (Elem g = 1; g < n; ++g)
      for (Elem h = 1; h < n; ++h) {
        if (g == h) continue;
        std::vector<i64> v(n, 1);
        v[g] = 7 * 13;
        v[h] = 19;
        auto w = pow_forward_general(3, r, v);
        ASSERT_EQ(pow_inverse_general(3, w), v);
      }
  }
}

TEST(Tuple, Validation) {
  const auto& V4 = grp("V4");
  EXPECT_NO_THROW(validate_tuple(V4, tuple(4, {{1, 5}, {2, 7}, {3, 3}})));
  EXPECT_THROW(validate_tuple(V4, tuple(4, {{1, 15}, {2, 3}})), Error);   // shared prime
  EXPECT_THROW(validate_tuple(V4, tuple(4, {{1, -5}, {2, -7}})), Error);  // two negatives
  EXPECT_THROW(validate_tuple(V4, tuple(4, {{1, 9}})), Error);            // not squarefree
  auto QC = testutil::catalog().nilpotent("Q8xC3");
  // the C3 coordinate needs p = 1 mod 3
  Elem c = QC.combine({0, 1});
  SquarefreeTuple t;
  t.v.assign(QC.order(), 1);
  t.v[c] = 7;
  EXPECT_NO_THROW(validate_tuple(QC, t));
  t.v[c] = 5;
  EXPECT_THROW(validate_tuple(QC, t), Error);
  t.v[c] = 3;
  EXPECT_THROW(validate_tuple(QC, t), Error);
}

TEST(Inertia, Examples) {
  auto c4 = tuple(4, {{1, 5}});
  EXPECT_EQ(read_inertia(c4, 5), 1u);
  EXPECT_EQ(group::element_order(grp("C4"), 1), 4u);
  EXPECT_EQ(read_inertia(c4, 7), 0u);
  EXPECT_EQ(read_inertia(tuple(4, {{1, 5}, {2, 7}, {3, 3}}), 3), 3u);
}

TEST(Disc, Examples) {
  EXPECT_EQ(disc_odd(grp("C4"), tuple(4, {{1, 5}})), 125);
  EXPECT_EQ(disc_odd(grp("C2"), tuple(2, {{1, -15}})), 15);
  auto e = disc_exponents(grp("Q8"));
  for (Elem g = 1; g < 8; ++g) EXPECT_EQ(e[g], group::element_order(grp("Q8"), g) == 2 ? 4u : 6u);
}

TEST(Disc, InertiaConsistency) {
  std::mt19937_64 rng(9);
  for (const std::string n : {"Q8", "D4", "C8", "G64"}) {
    const auto& G = grp(n);
    auto e = disc_exponents(G);
    for (int t = 0; t < 500; ++t) {
      auto x = random_tuple(G, rng);
      auto d = disc_odd(G, x);
      for (i64 p : support_primes(x)) {
        int v = 0;
        while (d % p == 0) {
          d /= p;
          ++v;
        }
        ASSERT_EQ(static_cast<std::uint32_t>(v), e[read_inertia(x, p)]);
      }
    }
  }
}

TEST(CharIndependence, Examples) {
  EXPECT_FALSE(char_independence(15, {3, 5}));
  EXPECT_TRUE(char_independence(30, {3, 5}));
  EXPECT_FALSE(char_independence(1, {}));
  EXPECT_TRUE(char_independence(-1, {}));
  EXPECT_FALSE(char_independence(-3, {-1, 3}));
}

TEST(Obstruction, CupInvariantsC4) {
  const auto& G = grp("C4");
  const auto& st = spec("C4").steps[1];
  ASSERT_EQ(st.kind, StepSpec::Kind::Cup);
  for (auto [pl, x] : step_obstruction_invariants(G, tuple(4, {{1, 5}}), st)) EXPECT_EQ(x, 0) << pl.str();
  auto inv = step_obstruction_invariants(G, tuple(4, {{1, 3}}), st);
  EXPECT_EQ(inv_at(inv, "3"), 1);
  EXPECT_EQ(inv_at(inv, "2"), 1);
  StepSpec empty;
  empty.kind = StepSpec::Kind::Cup;
  for (auto [pl, x] : step_obstruction_invariants(G, tuple(4, {{1, 3}}), empty)) EXPECT_EQ(x, 0);
}

TEST(Obstruction, SelfCupOfMinusOne) {
  StepSpec st;
  st.kind = StepSpec::Kind::Cup;
  st.terms.push_back({CupFactor::coordinate(1), CupFactor::coordinate(1)});
  auto inv = cup_invariants({-1}, st, {});
  EXPECT_EQ(inv_at(inv, "inf"), 1);
  EXPECT_EQ(inv_at(inv, "2"), 1);
  ObstructionSpec one{{StepSpec{}, st}};
  EXPECT_TRUE(reciprocity_audit(grp("V4"), one, tuple(4, {{3, -1}})));
  EXPECT_TRUE(reciprocity_audit(grp("V4"), ObstructionSpec{}, tuple(4, {{3, -1}})));
}

TEST(Obstruction, ReciprocityAuditCatalog) {
  std::mt19937_64 rng(13);
  for (const auto& cg : testutil::catalog().groups()) {
    if (cg.group.l() != 2) continue;
    for (int t = 0; t < 10000; ++t)
      ASSERT_TRUE(reciprocity_audit(cg.group, cg.spec, random_tuple(cg.group, rng))) << cg.group.name();
  }
}

TEST(TameLift, TrivialInertia) {
  for (const auto& cg : testutil::catalog().groups()) {
    const auto& G = cg.group;
    if (G.order() > 16) continue;
    for (std::uint32_t i = 2; i <= G.r(); ++i) {
      const auto& E = G.prefix(i);
      for (Elem f = 0; f < E.prefix(i - 1).order(); ++f)
        for (std::uint64_t q : {3, 5, 7, 11, 13}) EXPECT_TRUE(param::tame_lift_test(E, 0, f, q));
    }
  }
}

TEST(TameLift, CentralInertiaMatchesPairing) {
  // for central sigma and q = 1 mod exp(E), solvability is exactly [f, s] = 1
  for (const auto& cg : testutil::catalog().groups()) {
    const auto& G = cg.group;
    if (G.order() > 16) continue;
    for (std::uint32_t i = 2; i <= G.r(); ++i) {
      const auto& E = G.prefix(i);
      const auto& Gi = E.prefix(i - 1);
      const auto ex = group::exponent(E);
      for (Elem s : group::center(Gi))
        for (Elem f = 0; f < Gi.order(); ++f)
          for (std::uint64_t q = 3; q < 100; q += 2) {
            if (!arith::is_prime(q) || q % ex != 1) continue;
            EXPECT_EQ(param::tame_lift_test(E, s, f, q), group::commutator_pairing_in(E, s, f) == 0);
          }
    }
  }
}

TEST(Solvable, Examples) {
  EXPECT_EQ(solvable(grp("C2"), spec("C2"), tuple(2, {{1, 5}})).kind, Verdict::Kind::Epi);
  auto b = solvable(grp("C4"), spec("C4"), tuple(4, {{1, 3}}));
  EXPECT_EQ(b.str(), "bullet(obstructed,step 2,3)");
  auto e = solvable(grp("C4"), spec("C4"), tuple(4, {{1, 5}, {2, 3}}));
  ASSERT_EQ(e.kind, Verdict::Kind::Epi);
  ASSERT_TRUE(e.data);
  EXPECT_EQ(e.data->inertia.at(5), 1u);
  EXPECT_EQ(e.data->inertia.at(3), 2u);
  EXPECT_EQ(e.data->disc_odd, 125 * 9);
  EXPECT_EQ(solvable(grp("C2"), spec("C2"), tuple(2, {})).str(), "bullet(trivial)");
  EXPECT_EQ(solvable(grp("V4"), spec("V4"), tuple(4, {{1, 5}})).str(), "bullet(dependent,step 2)");
  EXPECT_THROW(solvable(grp("C4"), spec("C2"), tuple(4, {{1, 5}})), Error);
}

TEST(Solvable, ObstructionsOnlyAtSupport) {
  std::mt19937_64 rng(17);
  for (const auto& cg : testutil::catalog().groups()) {
    if (cg.group.l() != 2) continue;
    Pipeline P(cg.group, cg.spec);
    for (int t = 0; t < 3000; ++t) {
      auto x = random_tuple(cg.group, rng);
      auto v = P.solvable(x);
      if (v.reason == Verdict::Reason::LocalObstruction && v.place.kind == arith::Place::Kind::OddPrime) {
        auto ps = support_primes(x);
        ASSERT_TRUE(std::binary_search(ps.begin(), ps.end(), v.place.p));
      }
      if (v.kind == Verdict::Kind::Unknown) ASSERT_EQ(cg.spec.steps[v.step - 1].kind, StepSpec::Kind::Frob);
    }
  }
}

TEST(Solvable, CentralInvolutionCoordinatesAreFree) {
  // groups with I(G) inside the centre: changing the entries at I(G) keeps Epi
  std::mt19937_64 rng(19);
  const std::vector<i64> fresh = {101, 103, 107, 109, 113, 127, 131, 137, 139, 149};
  for (const std::string n : {"Q8", "C4", "C2:C4", "V4:C4"}) {
    const auto& G = grp(n);
    auto I = group::involution_locus(G);
    Pipeline P(G, spec(n));
    counting::ExactOptions opt;
    opt.record = true;
    auto res = counting::count_exact(G, spec(n), n == "C4" ? 200000 : 100000000, opt);
    int checked = 0;
    for (const auto& r : res.records) {
      if (r.verdict != "epi") continue;
      // rebuild the tuple from its string form
      SquarefreeTuple t;
      t.v.assign(G.order(), 1);
      std::stringstream ss(r.tuple);
      std::string item;
      while (std::getline(ss, item, ';')) {
        auto eq = item.find('=');
        for (Elem g = 1; g < G.order(); ++g)
          if (G.format(g) == item.substr(0, eq)) t.v[g] = std::stoll(item.substr(eq + 1));
      }
      for (int rep = 0; rep < 3; ++rep) {
        auto u = t;
        bool changed = false;
        for (Elem h : I) {
          if (u.v[h] == 1 || u.v[h] < 0 || u.v[h] % 2 == 0) continue;
          u.v[h] = fresh[rng() % fresh.size()] * (rng() % 2 ? 1 : fresh[rng() % fresh.size()]);
          if (arith::squarefree_part(u.v[h]) != u.v[h]) u.v[h] = 101;
          changed = true;
        }
        if (!changed) continue;
        // keep the perturbed values coprime to each other
        std::set<i64> seen;
        bool ok = true;
        for (Elem g = 1; g < G.order() && ok; ++g)
          for (auto [p, e] : arith::factor(static_cast<arith::u64>(std::llabs(u.v[g])))) ok = ok && seen.insert(p).second;
        if (!ok) continue;
        ASSERT_EQ(P.solvable(u).kind, Verdict::Kind::Epi) << n << " " << r.tuple << " -> " << u.str(G);
        ++checked;
      }
    }
    EXPECT_GT(checked, 0) << n;
  }
}
