#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "../error.hpp"
#include "../group/algorithms.hpp"
#include "../group/flinalg.hpp"
#include "../group/invariants.hpp"
#include "../group/lgroup.hpp"

namespace malle::param {

using group::Elem;
using group::LGroup;

/// Factor of a cup product: the j-th coordinate character chi_{w_j} (1-based), or chi_c.
struct CupFactor {
  bool is_coord = true;
  std::uint32_t coord = 1;
  std::int64_t constant = -1;

  static CupFactor coordinate(std::uint32_t j) { return {true, j, 0}; }
  static CupFactor constant_char(std::int64_t c) { return {false, 0, c}; }
  bool operator==(const CupFactor&) const = default;
};

struct StepSpec {
  enum class Kind { Trivial, Cup, Frob };
  Kind kind = Kind::Trivial;
  std::vector<std::pair<CupFactor, CupFactor>> terms;  // Cup
  bool abelian = false;                                // Frob: Frobenius only needed through characters

  bool operator==(const StepSpec&) const = default;
};

struct ObstructionSpec {
  std::vector<StepSpec> steps;
  bool operator==(const ObstructionSpec&) const = default;
};

/// Steps j < i (1-based) whose cocycle is zero; their coordinates are characters.
inline std::vector<std::uint32_t> trivial_steps_below(const LGroup& G, std::uint32_t i) {
  std::vector<std::uint32_t> J;
  for (std::uint32_t j = 1; j < i; ++j)
    if (G.seq().cocycles[j - 1].is_zero()) J.push_back(j);
  return J;
}

/// Expresses the class of theta_i as a sum of cup products x_j u x_k of coordinate
/// characters (j <= k trivial steps), if possible. Returns the (j,k) pairs.
inline std::optional<std::vector<std::pair<std::uint32_t, std::uint32_t>>> cup_decomposition(
    const LGroup& G, std::uint32_t i, const group::CocycleTable& theta) {
  if (G.l() != 2) return std::nullopt;
  const LGroup& P = G.prefix(i - 1);
  const std::uint32_t n = P.order();
  auto J = trivial_steps_below(G, i);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> mono;
  for (std::size_t a = 0; a < J.size(); ++a)
    for (std::size_t b = a; b < J.size(); ++b) mono.emplace_back(J[a], J[b]);
  const std::size_t m = mono.size();
  group::FlSystem sys(2, m + n - 1);
  std::vector<std::uint32_t> row(m + n - 1);
  for (Elem g = 0; g < n; ++g)
    for (Elem h = 0; h < n; ++h) {
      std::fill(row.begin(), row.end(), 0);
      for (std::size_t t = 0; t < m; ++t) row[t] = P.coord(g, mono[t].first - 1) & P.coord(h, mono[t].second - 1);
      Elem gh = P.mul(g, h);
      for (Elem e : {g, h, gh})
        if (e) row[m + e - 1] ^= 1;
      if (!sys.add(row, theta(g, h))) return std::nullopt;
    }
  auto sol = sys.solve();
  if (!sol) return std::nullopt;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::size_t t = 0; t < m; ++t)
    if ((*sol)[t]) out.push_back(mono[t]);
  return out;
}

/// True iff some lifts s of sigma_bar and f of frob_bar in E satisfy f s f^-1 = s^q.
inline bool tame_lift_test(const LGroup& E, Elem sigma_bar, Elem frob_bar, std::uint64_t q) {
  const LGroup& Gi = E.prefix(E.r() - 1);
  Elem conj = Gi.mul(Gi.mul(frob_bar, sigma_bar), Gi.inv(frob_bar));
  auto cyc = group::generated_subgroup(Gi, {sigma_bar});
  if (!std::binary_search(cyc.begin(), cyc.end(), conj))
    throw Error("NotNormalizing", Gi.format(frob_bar) + " does not normalize <" + Gi.format(sigma_bar) + ">");
  for (std::uint32_t a = 0; a < E.l(); ++a) {
    Elem s = group::lift(E, sigma_bar, a);
    Elem sq = E.pow(s, q);
    for (std::uint32_t b = 0; b < E.l(); ++b) {
      Elem f = group::lift(E, frob_bar, b);
      if (E.mul(E.mul(f, s), E.inv(f)) == sq) return true;
    }
  }
  return false;
}

/// Lookup table for a Frobenius step: outcome of the tame test for every inertia
/// image, odd residue of q modulo the exponent, and pattern of known character
/// values of Frobenius. 0 = obstructed, 1 = solvable, 2 = depends on more than the
/// characters (undecidable from the tuple).
struct FrobTable {
  std::uint32_t step = 0;
  std::uint32_t modulus = 2;  // exponent of G_i (a power of l)
  std::vector<std::uint32_t> J;
  std::vector<std::uint8_t> outcome;  // [(sigma * modulus + qres) << |J| | pattern]

  std::uint8_t at(Elem sigma, std::uint64_t q, std::uint32_t pattern) const {
    std::size_t idx = ((static_cast<std::size_t>(sigma) * modulus + q % modulus) << J.size()) | pattern;
    return outcome[idx];
  }
};

inline FrobTable build_frob_table(const LGroup& G, std::uint32_t i) {
  FrobTable T;
  T.step = i;
  const LGroup& E = G.prefix(i);
  const LGroup& P = G.prefix(i - 1);
  T.modulus = group::exponent(E);
  T.J = trivial_steps_below(G, i);
  const std::uint32_t np = 1u << T.J.size();
  T.outcome.assign(static_cast<std::size_t>(P.order()) * T.modulus * np, 1);
  for (Elem sigma = 0; sigma < P.order(); ++sigma) {
    for (std::uint32_t q = 1; q < T.modulus; ++q) {
      if (q % G.l() == 0) continue;
      if (sigma != 0 && (q % G.l()) != 1) continue;  // tame ramification needs q = 1 mod l
      std::vector<std::uint8_t> seen(np, 0);      // bit0: some solvable, bit1: some obstructed
      Elem sq = P.pow(sigma, q);
      for (Elem f = 0; f < P.order(); ++f) {
        if (P.mul(P.mul(f, sigma), P.inv(f)) != sq) continue;
        std::uint32_t pat = 0;
        for (std::size_t t = 0; t < T.J.size(); ++t) pat |= P.coord(f, T.J[t] - 1) << t;
        seen[pat] |= tame_lift_test(E, sigma, f, q) ? 1 : 2;
      }
      for (std::uint32_t pat = 0; pat < np; ++pat) {
        std::uint8_t o = seen[pat] == 1 ? 1 : seen[pat] == 2 ? 0 : seen[pat] == 3 ? 2 : 1;
        T.outcome[((static_cast<std::size_t>(sigma) * T.modulus + q) << T.J.size()) | pat] = o;
      }
    }
  }
  return T;
}

inline bool frob_table_decides(const FrobTable& T) {
  for (auto o : T.outcome)
    if (o == 2) return false;
  return true;
}

/// Derives a spec from the cocycles: zero cocycle -> trivial; class in the span of
/// cup products of coordinate characters -> cup; otherwise a Frobenius condition.
inline ObstructionSpec derive_spec(const LGroup& G) {
  ObstructionSpec spec;
  for (std::uint32_t i = 1; i <= G.r(); ++i) {
    const auto& th = G.seq().cocycles[i - 1];
    StepSpec st;
    if (th.is_zero()) {
      st.kind = StepSpec::Kind::Trivial;
    } else if (auto cup = cup_decomposition(G, i, th)) {
      st.kind = StepSpec::Kind::Cup;
      for (auto [j, k] : *cup) {
        if (j == k) st.terms.emplace_back(CupFactor::coordinate(j), CupFactor::constant_char(-1));  // (a,a) = (a,-1)
        else st.terms.emplace_back(CupFactor::coordinate(j), CupFactor::coordinate(k));
      }
    } else {
      st.kind = StepSpec::Kind::Frob;
      st.abelian = G.l() == 2 && frob_table_decides(build_frob_table(G, i));
    }
    spec.steps.push_back(std::move(st));
  }
  return spec;
}

/// Checks a supplied spec against the group: step kinds must match the cocycles and
/// every cup expression built from coordinate characters (and -1 on the diagonal)
/// must represent the class of theta_i.
inline void validate_spec(const LGroup& G, const ObstructionSpec& spec) {
  if (spec.steps.size() != G.r())
    throw Error("SpecMismatch", "spec has " + std::to_string(spec.steps.size()) + " steps, group has " +
                                    std::to_string(G.r()));
  for (std::uint32_t i = 1; i <= G.r(); ++i) {
    const auto& st = spec.steps[i - 1];
    const auto& th = G.seq().cocycles[i - 1];
    const std::string where = "step " + std::to_string(i);
    if (th.is_zero() != (st.kind == StepSpec::Kind::Trivial))
      throw Error("SpecMismatch", where + ": trivial step iff zero cocycle");
    if (st.kind != StepSpec::Kind::Cup) continue;
    if (G.l() != 2) throw Error("SpecMismatch", where + ": cup expressions need l = 2");
    auto J = trivial_steps_below(G, i);
    const LGroup& P = G.prefix(i - 1);
    auto diff = th;
    bool checkable = true;
    for (const auto& [f, g] : st.terms) {
      std::uint32_t j = 0, k = 0;
      if (f.is_coord && g.is_coord) {
        j = f.coord;
        k = g.coord;
      } else if (f.is_coord && !g.is_coord && g.constant == -1) {
        j = k = f.coord;
      } else if (!f.is_coord && f.constant == -1 && g.is_coord) {
        j = k = g.coord;
      } else {
        checkable = false;  // constants other than -1 are not classes on the group
        continue;
      }
      for (auto c : {j, k})
        if (std::find(J.begin(), J.end(), c) == J.end())
          throw Error("SpecMismatch", where + ": coordinate " + std::to_string(c) + " is not a character");
      for (Elem a = 0; a < P.order(); ++a)
        for (Elem b = 0; b < P.order(); ++b) diff.at(a, b) ^= static_cast<std::uint8_t>(P.coord(a, j - 1) & P.coord(b, k - 1));
    }
    if (checkable && !is_coboundary(P, diff))
      throw Error("SpecMismatch", where + ": cup expression does not represent theta");
  }
}

}  // namespace malle::param
