#pragma once

#include "malle/catalog.hpp"

namespace testutil {

inline const malle::Catalog& catalog() {
  static const malle::Catalog cat = malle::builtin_catalog();
  return cat;
}

inline const malle::group::LGroup& grp(const std::string& name) { return catalog().at(name).group; }

/// Builds an l-group from cocycle tables given as flat row-major lists.
inline malle::group::LGroup build(std::uint32_t l, const std::vector<std::vector<std::uint8_t>>& tables,
                                  const std::string& name = "test") {
  malle::group::AdmissibleSequence s;
  s.name = name;
  s.l = l;
  std::uint32_t lev = 1;
  for (const auto& t : tables) {
    auto c = malle::group::CocycleTable::zero(l, lev);
    c.table = t;
    s.cocycles.push_back(c);
    lev *= l;
  }
  return malle::group::LGroup::build(std::move(s));
}

}  // namespace testutil
