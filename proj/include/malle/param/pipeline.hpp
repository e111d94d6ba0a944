#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "../arith/symbols.hpp"
#include "../error.hpp"
#include "../group/lgroup.hpp"
#include "obstruction.hpp"
#include "tuple.hpp"

namespace malle::param {

using arith::Place;

struct EpiData {
  std::map<i64, Elem> inertia;  // odd support prime -> inertia image
  BigInt disc_odd = 1;
  std::vector<i64> coords;      // Pow image w_1..w_r
  std::vector<arith::CharBasisDecomposition> decompositions;
  std::vector<int> residues_mod8;  // per element, entry 0 unused
};

struct Verdict {
  enum class Kind { Epi, Bullet, Unknown };
  enum class Reason { None, TrivialChar, Dependent, LocalObstruction };
  Kind kind = Kind::Epi;
  Reason reason = Reason::None;
  std::uint32_t step = 0;
  Place place = Place::infinity();
  i64 prime = 0;  // Unknown: the prime whose data is missing
  std::optional<EpiData> data;

  std::string str() const {
    switch (kind) {
      case Kind::Epi: return "epi";
      case Kind::Unknown: return "unknown(step " + std::to_string(step) + ",p=" + std::to_string(prime) + ")";
      default: break;
    }
    switch (reason) {
      case Reason::TrivialChar: return "bullet(trivial)";
      case Reason::Dependent: return "bullet(dependent,step " + std::to_string(step) + ")";
      default: return "bullet(obstructed,step " + std::to_string(step) + "," + place.str() + ")";
    }
  }
};

/// Places ordered: odd primes ascending, then 2, then infinity.
inline std::vector<std::pair<Place, int>> cup_invariants(const std::vector<i64>& w, const StepSpec& st,
                                                        const std::vector<i64>& odd_primes) {
  std::vector<std::pair<Place, int>> out;
  auto eval = [&](const CupFactor& f) { return f.is_coord ? w[f.coord - 1] : f.constant; };
  auto at = [&](const Place& v) {
    int s = 0;
    for (const auto& [f, g] : st.terms) s ^= arith::hilbert(eval(f), eval(g), v);
    return s;
  };
  std::vector<i64> ps = odd_primes;
  for (const auto& [f, g] : st.terms)
    for (const auto* x : {&f, &g})
      if (!x->is_coord)
        for (auto [p, e] : arith::factor(static_cast<arith::u64>(x->constant < 0 ? -x->constant : x->constant)))
          if (p != 2) ps.push_back(static_cast<i64>(p));
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  for (i64 p : ps) out.emplace_back(Place::odd(p), at(Place::odd(p)));
  out.emplace_back(Place::two(), at(Place::two()));
  out.emplace_back(Place::infinity(), at(Place::infinity()));
  return out;
}

inline std::vector<i64> support_primes(const SquarefreeTuple& t) {
  std::vector<i64> ps;
  for (Elem g = 1; g < t.v.size(); ++g)
    for (auto [p, e] : arith::factor(static_cast<arith::u64>(t.v[g] < 0 ? -t.v[g] : t.v[g])))
      if (p != 2) ps.push_back(static_cast<i64>(p));
  std::sort(ps.begin(), ps.end());
  return ps;
}

/// Local invariants of the pulled-back obstruction class for a cup step.
inline std::vector<std::pair<Place, int>> step_obstruction_invariants(const LGroup& G, const SquarefreeTuple& t,
                                                                     const StepSpec& st) {
  if (st.kind != StepSpec::Kind::Cup) throw Error("SpecMismatch", "invariants need a cup step");
  return cup_invariants(pow_forward(G.r(), t.v), st, support_primes(t));
}

/// Decision procedure for one l = 2 group and spec. Tables are built once; decide()
/// is cheap enough to run per enumerated tuple.
class Pipeline {
 public:
  Pipeline(const LGroup& G, ObstructionSpec spec) : G_(&G), spec_(std::move(spec)) {
    if (spec_.steps.size() != G.r())
      throw Error("SpecMismatch", "spec has " + std::to_string(spec_.steps.size()) + " steps, group has " +
                                      std::to_string(G.r()));
    if (G.l() != 2) throw Error("Unsupported", "the decision pipeline handles l = 2 only");
    if (G.order() > 64) throw Error("TooLarge", "pipeline limited to order 64");
    for (std::uint32_t i = 1; i <= G.r(); ++i) {
      const auto& st = spec_.steps[i - 1];
      if (i == 1 && st.kind != StepSpec::Kind::Trivial) throw Error("SpecMismatch", "step 1 must be trivial");
      if (st.kind == StepSpec::Kind::Frob) tables_.emplace(i, build_frob_table(G, i));
      if (st.kind == StepSpec::Kind::Trivial) trivial_.push_back(i);
    }
  }

  const LGroup& group() const { return *G_; }
  const ObstructionSpec& spec() const { return spec_; }

  /// `primes` lists (odd prime, element) for the support, ascending by prime.
  Verdict decide(const std::vector<i64>& v, const std::vector<std::pair<i64, Elem>>& primes) const {
    const LGroup& G = *G_;
    const std::uint32_t r = G.r();
    Verdict out;
    // Characters of the nonunit entries are independent, so trivial-step coordinates
    // are compared through their supports.
    std::uint64_t nonunit = 0;
    for (Elem g = 1; g < v.size(); ++g)
      if (v[g] != 1) nonunit |= std::uint64_t{1} << g;
    std::vector<i64> w(r, 1);
    for (Elem g = 1; g < v.size(); ++g)
      if (v[g] != 1)
        for (std::uint32_t j = 0; j < r; ++j)
          if ((g >> j) & 1) w[j] *= v[g];

    std::uint64_t basis[64] = {};
    bool ram2_below = false;  // some trivial coordinate below the current step ramifies at 2
    for (std::uint32_t i = 1; i <= r; ++i) {
      const auto& st = spec_.steps[i - 1];
      if (st.kind == StepSpec::Kind::Trivial) {
        std::uint64_t u = 0;
        for (Elem g = 1; g < v.size(); ++g)
          if (((nonunit >> g) & 1) && ((g >> (i - 1)) & 1)) u |= std::uint64_t{1} << g;
        if (u == 0) {
          out.kind = Verdict::Kind::Bullet;
          out.reason = i == 1 ? Verdict::Reason::TrivialChar : Verdict::Reason::Dependent;
          out.step = i;
          return out;
        }
        while (u) {
          int b = 63 - std::countl_zero(u);
          if (!basis[b]) {
            basis[b] = u;
            break;
          }
          u ^= basis[b];
        }
        if (!u) {
          out.kind = Verdict::Kind::Bullet;
          out.reason = Verdict::Reason::Dependent;
          out.step = i;
          return out;
        }
      } else if (st.kind == StepSpec::Kind::Cup) {
        auto eval = [&](const CupFactor& f) { return f.is_coord ? w[f.coord - 1] : f.constant; };
        auto at = [&](const Place& pl) {
          int s = 0;
          for (const auto& [f, g] : st.terms) s ^= arith::hilbert(eval(f), eval(g), pl);
          return s;
        };
        for (const auto& [p, g] : primes)
          if (at(Place::odd(p))) return obstructed(i, Place::odd(p));
        if (at(Place::two())) return obstructed(i, Place::two());
        if (at(Place::infinity())) return obstructed(i, Place::infinity());
      } else {
        if (ram2_below) {
          out.kind = Verdict::Kind::Unknown;
          out.step = i;
          out.prime = 2;
          return out;
        }
        const FrobTable& T = tables_.at(i);
        for (const auto& [q, g] : primes) {
          Elem sigma = G.project(g, i - 1);
          if (!sigma) continue;
          std::uint32_t pat = 0;
          for (std::size_t t = 0; t < T.J.size(); ++t) {
            i64 wj = w[T.J[t] - 1];
            // Frobenius lift fixing sqrt(q*)
            int val = wj % q ? arith::chi_eval_frob(wj, q)
                             : arith::chi_eval_frob((wj / q) * (q % 4 == 1 ? 1 : -1), q);
            pat |= static_cast<std::uint32_t>(val) << t;
          }
          auto o = T.at(sigma, static_cast<std::uint64_t>(q), pat);
          if (o == 0) return obstructed(i, Place::odd(q));
          if (o == 2) {
            out.kind = Verdict::Kind::Unknown;
            out.step = i;
            out.prime = q;
            return out;
          }
        }
      }
      if (st.kind == StepSpec::Kind::Trivial) {
        i64 wi = w[i - 1];
        if (arith::mod(wi, 4) != 1) ram2_below = true;
      }
    }
    out.kind = Verdict::Kind::Epi;
    return out;
  }

  /// Full evaluation with derived data.
  Verdict solvable(const SquarefreeTuple& t) const {
    validate_tuple(*G_, t);
    std::vector<std::pair<i64, Elem>> primes;
    for (Elem g = 1; g < t.v.size(); ++g)
      for (auto [p, e] : arith::factor(static_cast<arith::u64>(t.v[g] < 0 ? -t.v[g] : t.v[g])))
        if (p != 2) primes.emplace_back(static_cast<i64>(p), g);
    std::sort(primes.begin(), primes.end());
    Verdict out = decide(t.v, primes);
    if (out.kind != Verdict::Kind::Epi) return out;
    EpiData d;
    for (auto [p, g] : primes) d.inertia[p] = g;
    d.disc_odd = disc_odd(*G_, t);
    d.coords = pow_forward(G_->r(), t.v);
    for (i64 wj : d.coords) d.decompositions.push_back(arith::chi_basis_decompose(arith::SquarefreeInt::from(wj)));
    d.residues_mod8.assign(t.v.size(), 1);
    for (Elem g = 1; g < t.v.size(); ++g) d.residues_mod8[g] = static_cast<int>(arith::mod(t.v[g], 8));
    out.data = std::move(d);
    return out;
  }

 private:
  static Verdict obstructed(std::uint32_t step, Place pl) {
    Verdict v;
    v.kind = Verdict::Kind::Bullet;
    v.reason = Verdict::Reason::LocalObstruction;
    v.step = step;
    v.place = pl;
    return v;
  }

  const LGroup* G_;
  ObstructionSpec spec_;
  std::map<std::uint32_t, FrobTable> tables_;
  std::vector<std::uint32_t> trivial_;
};

inline Verdict solvable(const LGroup& G, const ObstructionSpec& spec, const SquarefreeTuple& t) {
  return Pipeline(G, spec).solvable(t);
}

/// Sum of local invariants over all places for every cup step; false flags a bad spec.
inline bool reciprocity_audit(const LGroup& G, const ObstructionSpec& spec, const SquarefreeTuple& t) {
  if (spec.steps.empty()) return true;
  auto w = pow_forward(G.r(), t.v);
  auto ps = support_primes(t);
  for (const auto& st : spec.steps) {
    if (st.kind != StepSpec::Kind::Cup) continue;
    int s = 0;
    for (auto [pl, x] : cup_invariants(w, st, ps)) s ^= x;
    if (s) return false;
  }
  return true;
}

}  // namespace malle::param
