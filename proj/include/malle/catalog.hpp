#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "error.hpp"
#include "group/lgroup.hpp"
#include "group/nilpotent.hpp"
#include "group/realize.hpp"
#include "param/obstruction.hpp"

namespace malle {

struct CatalogGroup {
  group::LGroup group;
  param::ObstructionSpec spec;
};

/// Named l-groups (with obstruction specs) and named direct products of them.
class Catalog {
 public:
  void add(group::LGroup G, std::optional<param::ObstructionSpec> spec = std::nullopt) {
    auto s = spec ? *spec : param::derive_spec(G);
    param::validate_spec(G, s);
    std::string name = G.name();
    if (index_.count(name) || products_.count(name)) throw Error("DuplicateName", name);
    index_[name] = groups_.size();
    groups_.push_back({std::move(G), std::move(s)});
  }

  void add_product(const std::string& name, const std::vector<std::string>& factors) {
    if (index_.count(name) || products_.count(name)) throw Error("DuplicateName", name);
    for (const auto& f : factors)
      if (!index_.count(f)) throw Error("UnknownGroup", f);
    products_[name] = factors;
    product_order_.push_back(name);
    nilpotent(name);  // validates distinct primes
  }

  const std::vector<CatalogGroup>& groups() const { return groups_; }
  const std::vector<std::string>& product_names() const { return product_order_; }

  const CatalogGroup* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &groups_[it->second];
  }

  const CatalogGroup& at(const std::string& name) const {
    if (auto* g = find(name)) return *g;
    throw Error("UnknownGroup", name);
  }

  bool contains(const std::string& name) const { return index_.count(name) || products_.count(name); }

  /// Any catalog name as a nilpotent group (an l-group becomes a single factor).
  group::NilpotentGroup nilpotent(const std::string& name) const {
    if (auto* g = find(name)) return group::NilpotentGroup({g->group});
    auto it = products_.find(name);
    if (it == products_.end()) throw Error("UnknownGroup", name);
    std::vector<group::LGroup> fs;
    for (const auto& f : it->second) fs.push_back(at(f).group);
    auto N = group::direct_product(std::move(fs));
    N.set_name(name);
    return N;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& g : groups_) out.push_back(g.group.name());
    for (const auto& p : product_order_) out.push_back(p);
    return out;
  }

  nlohmann::ordered_json to_json() const;
  static Catalog from_json(const nlohmann::json& j);

  /// FNV-1a over the canonical JSON dump.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : to_json().dump()) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }

  std::string hash_hex() const {
    std::ostringstream os;
    os << std::hex << hash();
    return os.str();
  }

 private:
  std::vector<CatalogGroup> groups_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::vector<std::string>> products_;
  std::vector<std::string> product_order_;
};

namespace detail {

inline nlohmann::ordered_json factor_json(const param::CupFactor& f) {
  nlohmann::ordered_json j;
  if (f.is_coord) j["coord"] = f.coord;
  else j["const"] = f.constant;
  return j;
}

inline param::CupFactor factor_from(const nlohmann::json& j) {
  if (j.contains("coord")) return param::CupFactor::coordinate(j.at("coord").get<std::uint32_t>());
  if (j.contains("const")) return param::CupFactor::constant_char(j.at("const").get<std::int64_t>());
  throw Error("InvalidCatalog", "cup factor needs coord or const");
}

inline nlohmann::ordered_json spec_json(const param::ObstructionSpec& s) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& st : s.steps) {
    nlohmann::ordered_json j;
    switch (st.kind) {
      case param::StepSpec::Kind::Trivial: j["kind"] = "trivial"; break;
      case param::StepSpec::Kind::Cup: {
        j["kind"] = "cup";
        auto terms = nlohmann::ordered_json::array();
        for (const auto& [a, b] : st.terms) terms.push_back({factor_json(a), factor_json(b)});
        j["terms"] = terms;
        break;
      }
      case param::StepSpec::Kind::Frob:
        j["kind"] = "frob";
        j["abelian"] = st.abelian;
        break;
    }
    arr.push_back(j);
  }
  return arr;
}

inline param::ObstructionSpec spec_from(const nlohmann::json& arr) {
  param::ObstructionSpec s;
  for (const auto& j : arr) {
    param::StepSpec st;
    auto kind = j.at("kind").get<std::string>();
    if (kind == "trivial") {
      st.kind = param::StepSpec::Kind::Trivial;
    } else if (kind == "cup") {
      st.kind = param::StepSpec::Kind::Cup;
      for (const auto& t : j.at("terms")) {
        if (!t.is_array() || t.size() != 2) throw Error("InvalidCatalog", "cup term must be a pair");
        st.terms.emplace_back(factor_from(t[0]), factor_from(t[1]));
      }
    } else if (kind == "frob") {
      st.kind = param::StepSpec::Kind::Frob;
      st.abelian = j.value("abelian", false);
    } else {
      throw Error("InvalidCatalog", "unknown step kind " + kind);
    }
    s.steps.push_back(std::move(st));
  }
  return s;
}

}  // namespace detail

inline nlohmann::ordered_json Catalog::to_json() const {
  nlohmann::ordered_json root;
  auto groups = nlohmann::ordered_json::array();
  for (const auto& cg : groups_) {
    const auto& G = cg.group;
    nlohmann::ordered_json j;
    j["name"] = G.name();
    j["l"] = G.l();
    j["r"] = G.r();
    auto cocs = nlohmann::ordered_json::array();
    for (const auto& c : G.seq().cocycles) cocs.push_back(c.table);
    j["cocycles"] = cocs;
    j["steps"] = detail::spec_json(cg.spec);
    groups.push_back(j);
  }
  root["groups"] = groups;
  auto prods = nlohmann::ordered_json::array();
  for (const auto& p : product_order_) prods.push_back({{"name", p}, {"factors", products_.at(p)}});
  root["products"] = prods;
  return root;
}

/// Parses one group entry; every invariant is checked by LGroup::build.
inline CatalogGroup parse_group(const nlohmann::json& j) {
  group::AdmissibleSequence seq;
  try {
    seq.name = j.at("name").get<std::string>();
    seq.l = j.at("l").get<std::uint32_t>();
    auto r = j.at("r").get<std::uint32_t>();
    const auto& cocs = j.at("cocycles");
    if (!cocs.is_array() || cocs.size() != r) throw Error("InvalidSequence", seq.name + ": expected r cocycle tables");
    std::uint32_t lev = 1;
    for (const auto& c : cocs) {
      auto t = c.get<std::vector<std::uint8_t>>();
      if (t.size() != static_cast<std::size_t>(lev) * lev)
        throw Error("InvalidSequence", seq.name + ": cocycle table has wrong size");
      group::CocycleTable tab = group::CocycleTable::zero(seq.l, lev);
      tab.table = std::move(t);
      seq.cocycles.push_back(std::move(tab));
      lev *= seq.l;
      if (lev > group::kMaxOrder) throw Error("TooLarge", seq.name);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("InvalidCatalog", e.what());
  }
  auto G = group::LGroup::build(std::move(seq));
  std::optional<param::ObstructionSpec> spec;
  if (j.contains("steps")) spec = detail::spec_from(j.at("steps"));
  auto s = spec ? *spec : param::derive_spec(G);
  param::validate_spec(G, s);
  return {std::move(G), std::move(s)};
}

inline Catalog Catalog::from_json(const nlohmann::json& root) {
  Catalog cat;
  const auto& groups = root.contains("groups") ? root.at("groups") : root;
  if (groups.is_object()) {
    auto cg = parse_group(groups);
    cat.add(std::move(cg.group), std::move(cg.spec));
    return cat;
  }
  for (const auto& j : groups) {
    auto cg = parse_group(j);
    cat.add(std::move(cg.group), std::move(cg.spec));
  }
  if (root.is_object() && root.contains("products"))
    for (const auto& p : root.at("products"))
      cat.add_product(p.at("name").get<std::string>(), p.at("factors").get<std::vector<std::string>>());
  return cat;
}

inline Catalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("InvalidCatalog", e.what());
  }
  return Catalog::from_json(j);
}

/// The shipped groups, realized from explicit presentations.
inline Catalog builtin_catalog() {
  using namespace group::concrete;
  auto lg = [](const group::ConcreteGroup& C, std::uint32_t l, const std::string& name) {
    return group::LGroup::build(group::realize(C, l, name).seq);
  };
  Catalog cat;
  auto C2 = cyclic(2), C4 = cyclic(4);
  cat.add(lg(C2, 2, "C2"));
  cat.add(lg(cyclic(3), 3, "C3"));
  cat.add(lg(C4, 2, "C4"));
  cat.add(lg(cyclic(8), 2, "C8"));
  auto V4 = product(C2, C2, "V4");
  cat.add(lg(V4, 2, "V4"));
  cat.add(lg(product(C2, C4, "C2xC4"), 2, "C2xC4"));
  cat.add(lg(product(V4, C2, "C2^3"), 2, "C2^3"));
  cat.add(lg(dihedral8(), 2, "D4"));
  cat.add(lg(quaternion8(), 2, "Q8"));
  cat.add(lg(kluners64(), 2, "G64"));
  cat.add(lg(heisenberg(3), 3, "Heis27"));
  cat.add(lg(semidirect_c4(C2, "C2:C4"), 2, "C2:C4"));
  cat.add(lg(semidirect_c4(V4, "V4:C4"), 2, "V4:C4"));
  cat.add(lg(semidirect_c4(C4, "C4:C4"), 2, "C4:C4"));
  cat.add_product("C6", {"C2", "C3"});
  cat.add_product("Q8xC3", {"Q8", "C3"});
  return cat;
}

}  // namespace malle
