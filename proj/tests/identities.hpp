#pragma once

#include <string>
#include <vector>

#include "malle/group/algorithms.hpp"
#include "malle/group/invariants.hpp"
#include "malle/group/nilpotent.hpp"

namespace testutil {

/// Exhaustive group-theory identity checks; returns one message per failure.
inline std::vector<std::string> identity_failures(const malle::group::LGroup& G) {
  using namespace malle::group;
  std::vector<std::string> bad;
  const auto l = G.l();
  for (Elem g = 0; g < G.order(); ++g) {
    std::uint64_t lb = 1;
    for (std::uint32_t t = 0; t < breaks(G, g); ++t) lb *= l;
    if (lb != conjugacy_class(G, g).size()) bad.push_back(G.name() + ": breaks vs class size at " + G.format(g));
  }
  for (std::uint32_t i = 2; i <= G.r(); ++i) {
    const LGroup& E = G.prefix(i);
    const LGroup& Gi = E.prefix(i - 1);
    for (Elem h = 0; h < Gi.order(); ++h) {
      const auto oh = element_order(Gi, h);
      const auto o0 = element_order(E, lift(E, h));
      bool same = true, conj = true;
      // the lifts of id are the fiber itself
      const bool check_orders = h != 0;
      auto cls = conjugacy_class(E, lift(E, h));
      for (std::uint32_t a = 1; a < l; ++a) {
        same = same && element_order(E, lift(E, h, a)) == o0;
        conj = conj && std::find(cls.begin(), cls.end(), lift(E, h, a)) != cls.end();
      }
      if (check_orders && (!same || (o0 != oh && o0 != l * oh) || is_theta_stable_in(E, h) != (o0 == oh)))
        bad.push_back(G.name() + ": lift orders at step " + std::to_string(i) + " h=" + Gi.format(h));
      auto t = tilde_centralizer_in(E, h);
      if ((t.index != 1 && t.index != l) || (t.index == l) != conj)
        bad.push_back(G.name() + ": tilde centralizer at step " + std::to_string(i) + " h=" + Gi.format(h));
    }
  }
  return bad;
}

/// Orbits of the power map on classes inside I(G) all have size d, for every d | l_G - 1.
template <class Grp>
std::vector<std::string> orbit_failures(const Grp& G, std::uint32_t lG, const std::string& name) {
  std::vector<std::string> bad;
  for (std::uint32_t d = 1; d < lG; ++d) {
    if ((lG - 1) % d) continue;
    for (auto s : malle::group::power_map_orbits(G, lG, d))
      if (s != d) bad.push_back(name + ": orbit of size " + std::to_string(s) + " for d=" + std::to_string(d));
  }
  return bad;
}

}  // namespace testutil
