#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "malle/analytic/analytic.hpp"
#include "malle/arith/symbols.hpp"
#include "malle/catalog.hpp"
#include "malle/counting/count.hpp"
#include "malle/counting/fit.hpp"
#include "malle/group/invariants.hpp"
#include "malle/oracle/abelian.hpp"

namespace {

using json = nlohmann::ordered_json;
using malle::Error;
using malle::arith::u128;

constexpr const char* kVersion = "0.1.0";

/// Accepts plain integers and "1e7" / "2.5e9"-style literals that denote integers.
u128 parse_bound(const std::string& s) {
  auto bad = [&] { return Error("InvalidArgument", "not a nonnegative integer bound: " + s); };
  if (s.empty()) throw bad();
  auto epos = s.find_first_of("eE");
  std::string mant = s.substr(0, epos);
  int exp10 = 0;
  if (epos != std::string::npos) {
    try {
      exp10 = std::stoi(s.substr(epos + 1));
    } catch (...) {
      throw bad();
    }
  }
  auto dot = mant.find('.');
  if (dot != std::string::npos) {
    exp10 -= static_cast<int>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (mant.empty() || mant.find_first_not_of("0123456789") != std::string::npos) throw bad();
  u128 v = 0;
  const u128 lim = ~u128{0} / 10;
  for (char c : mant) {
    if (v > lim) throw Error("Overflow", s);
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  for (; exp10 > 0; --exp10) {
    if (v > lim) throw Error("Overflow", s);
    v *= 10;
  }
  for (; exp10 < 0; ++exp10) {
    if (v % 10) throw bad();
    v /= 10;
  }
  return v;
}

std::vector<std::uint64_t> parse_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(static_cast<std::uint64_t>(parse_bound(item)));
  return out;
}

struct Env {
  std::string catalog_path;
  malle::Catalog cat;

  void load() { cat = catalog_path.empty() ? malle::builtin_catalog() : malle::load_catalog(catalog_path); }

  /// Catalog name, or a JSON file holding a group (or a full catalog: first group wins).
  std::pair<std::string, const malle::Catalog*> resolve(const std::string& name) {
    if (cat.contains(name)) return {name, &cat};
    if (std::filesystem::exists(name)) {
      file_cat = malle::load_catalog(name);
      auto names = file_cat->names();
      if (names.empty()) throw Error("InvalidCatalog", "no groups in " + name);
      return {names.front(), &*file_cat};
    }
    throw Error("UnknownGroup", name);
  }

  std::optional<malle::Catalog> file_cat;
};

json meta(const Env& env) {
  json j;
  j["version"] = kVersion;
  j["catalog_hash"] = env.cat.hash_hex();
  return j;
}

json report_json(const malle::counting::CountReport& R) {
  json j;
  j["mode"] = R.mode;
  j["group"] = R.group;
  j["X"] = R.X.str();
  j["lower"] = R.lower.str();
  j["upper"] = R.upper.str();
  if (R.mode == "heuristic") j["heuristic"] = R.heuristic;
  j["unknown_tuples"] = R.unknown_tuples;
  j["two_unramified"] = R.two_unramified;
  j["d"] = R.d;
  j["shard"] = {{"count", R.shard.count}, {"index", R.shard.index}};
  j["note"] = R.note;
  j["elapsed_s"] = R.elapsed;
  return j;
}

void write_csv(const std::string& path, const std::vector<std::array<std::string, 3>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write " + path);
  out << "disc,verdict,tuple\n";
  for (const auto& r : rows) out << r[0] << ',' << r[1] << ',' << r[2] << '\n';
}

// ---------------------------------------------------------------------------
// group

json group_info(const malle::Catalog& cat, const std::string& name, std::uint32_t d) {
  using namespace malle::group;
  auto N = cat.nilpotent(name);
  json j;
  j["name"] = name;
  j["order"] = N.order();
  j["exponent"] = exponent(N);
  j["l_G"] = N.lG();
  auto I = involution_locus(N);
  j["involutions"] = I.size();
  try {
    j["h"] = h_dimension(N);
  } catch (const Error& e) {
    if (e.kind() != "NotAVectorSpace") throw;
    j["h"] = "not a subspace";
  }
  std::map<std::uint32_t, std::uint32_t> sizes;
  auto labels = class_labels(N);
  std::map<std::uint32_t, std::uint32_t> seen;
  for (Elem x = 0; x < N.order(); ++x)
    if (!seen.count(labels[x])) {
      seen[labels[x]] = 1;
      sizes[static_cast<std::uint32_t>(conjugacy_class(N, x).size())]++;
    }
  json cs = json::object();
  for (auto [s, c] : sizes) cs[std::to_string(s)] = c;
  j["class_sizes"] = cs;
  if (const auto* cg = cat.find(name)) {
    json br = json::object();
    for (Elem x = 1; x < cg->group.order(); ++x) br[cg->group.format(x)] = breaks(cg->group, x);
    j["breaks"] = br;
    j["kluners_d"] = (cg->group.l() == 2 && cg->group.order() <= 256) ? json(kluners_d(cg->group)) : json(nullptr);
    j["steps"] = malle::detail::spec_json(cg->spec);
  }
  auto C = constants(N, d);
  j["constants"] = {{"d", d}, {"a", C.a.str()}, {"b", C.b.str()}, {"i", C.i.str()}};
  return j;
}

// ---------------------------------------------------------------------------
// count / oracle

struct CountArgs {
  std::string group, mode = "exact", X = "1000", emit;
  std::uint32_t d = 1, shards = 1, shard = 0, threads = 1;
  bool two_unram = false;
};

json run_count(Env& env, const CountArgs& a) {
  using namespace malle::counting;
  auto [name, cat] = env.resolve(a.group);
  const u128 X = parse_bound(a.X);
  if (a.shards == 0 || a.shard >= a.shards) throw Error("InvalidShard", "shard index out of range");
  json out = meta(env);
  out["config"] = {{"command", "count"}, {"group", name}, {"mode", a.mode}, {"X", u128_str(X)},
                   {"d", a.d}, {"two_unramified", a.two_unram}, {"shards", a.shards}, {"shard", a.shard},
                   {"threads", a.threads}, {"catalog", env.catalog_path}};
  CountReport R;
  if (a.mode == "exact") {
    const auto& cg = cat->at(name);
    ExactOptions opt;
    opt.two_unramified = a.two_unram;
    opt.shard = {a.shards, a.shard};
    opt.threads = a.threads;
    opt.record = !a.emit.empty();
    auto res = count_exact(cg.group, cg.spec, X, opt);
    R = res.report;
    if (!a.emit.empty()) {
      std::vector<std::array<std::string, 3>> rows;
      for (const auto& r : res.records) rows.push_back({u128_str(r.disc), r.verdict, r.tuple});
      write_csv(a.emit, rows);
    }
  } else {
    if (!a.emit.empty()) throw Error("InvalidArgument", "--emit-discs needs --mode exact");
    if (a.two_unram) throw Error("InvalidArgument", "--two-unramified needs --mode exact");
    if (a.shards != 1) throw Error("InvalidArgument", "sharding applies to --mode exact");
    auto T = Target::of(cat->nilpotent(name));
    if (a.mode == "upper") R = count_upper(T, X);
    else if (a.mode == "heuristic") R = count_heuristic(T, X, a.d);
    else throw Error("InvalidArgument", "unknown mode " + a.mode);
  }
  out["report"] = report_json(R);
  return out;
}

std::string local_string(const malle::oracle::DirichletEpi& e) {
  std::string s;
  for (const auto& h : e.local) {
    if (!s.empty()) s += ";";
    s += std::to_string(h.p) + "^" + std::to_string(h.k) + ":";
    for (std::size_t i = 0; i < h.images.size(); ++i) s += (i ? "/" : "") + std::to_string(h.images[i]);
  }
  return s;
}

json run_oracle(Env& env, const std::string& group, const std::string& Xs, bool two_unram, const std::string& emit) {
  using namespace malle::oracle;
  auto A = abelian_by_name(group);
  const u128 X = parse_bound(Xs);
  if (X > ~std::uint64_t{0}) throw Error("CapExceeded", "oracle bound above 2^64");
  auto R = oracle_count(A, static_cast<std::uint64_t>(X), two_unram, !emit.empty());
  if (!emit.empty()) {
    std::vector<std::array<std::string, 3>> rows;
    for (const auto& e : R.epis) rows.push_back({std::to_string(e.disc), "epi", local_string(e)});
    std::sort(rows.begin(), rows.end());
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return std::stoull(a[0]) < std::stoull(b[0]);
    });
    write_csv(emit, rows);
  }
  json out = meta(env);
  out["config"] = {{"command", "oracle"}, {"group", group}, {"X", malle::counting::u128_str(X)},
                   {"two_unramified", two_unram}};
  out["report"] = {{"count", R.count}, {"automorphisms", automorphism_count(A)}};
  return out;
}

// ---------------------------------------------------------------------------
// analytic

malle::analytic::PrimeCondition condition(std::uint64_t m, const std::string& residues) {
  if (m <= 1) return malle::analytic::PrimeCondition::all();
  return malle::analytic::PrimeCondition::residue(m, parse_list(residues));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void csv_row(std::ostream& os, double x, double value, double pred) {
  os << fmt(x) << ',' << fmt(value) << ',' << fmt(pred) << ',' << fmt(pred != 0 ? value / pred : NAN) << '\n';
}

std::vector<std::uint64_t> windows_to(std::uint64_t x, std::uint32_t count) {
  std::vector<std::uint64_t> xs;
  for (double v : malle::counting::dyadic(static_cast<double>(x) / std::ldexp(1.0, count - 1), count))
    xs.push_back(static_cast<std::uint64_t>(std::llround(v)));
  return xs;
}

malle::analytic::ArithmeticFunctionSpec function_kind(const std::string& s) {
  using malle::analytic::ArithmeticFunctionSpec;
  if (s == "squarefree") return ArithmeticFunctionSpec::squarefree();
  if (s == "one") return ArithmeticFunctionSpec::one();
  if (s == "delta") return ArithmeticFunctionSpec::delta();
  throw Error("InvalidArgument", "unknown function " + s);
}

// ---------------------------------------------------------------------------
// selftest

json selftest(Env& env, std::uint64_t seed) {
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool ok) {
    checks.push_back({{"check", name}, {"ok", ok}});
    all = all && ok;
  };
  using namespace malle;
  // group identities on the catalog
  bool grp_ok = true;
  for (const auto& cg : env.cat.groups()) {
    const auto& G = cg.group;
    for (group::Elem x = 0; x < G.order(); ++x) {
      auto cls = group::conjugacy_class(G, x).size();
      std::uint64_t lb = 1;
      for (std::uint32_t i = 0; i < group::breaks(G, x); ++i) lb *= G.l();
      grp_ok = grp_ok && lb == cls && cls * group::centralizer(G, x).size() == G.order();
    }
  }
  record("breaks_vs_class_size", grp_ok);
  // Hilbert reciprocity on random pairs
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(-500, 500);
  bool rec_ok = true;
  for (int t = 0; t < 500; ++t) {
    std::int64_t a = dist(rng), b = dist(rng);
    if (!a || !b) continue;
    int s = arith::hilbert(a, b, arith::Place::infinity()) + arith::hilbert(a, b, arith::Place::two());
    for (auto [p, k] : arith::factor(static_cast<std::uint64_t>(std::abs(a * b))))
      if (p != 2) s += arith::hilbert(a, b, arith::Place::odd(static_cast<std::int64_t>(p)));
    rec_ok = rec_ok && s % 2 == 0;
  }
  record("hilbert_reciprocity", rec_ok);
  // oracle equivalence on C2 and C4
  for (std::string g : {"C2", "C4", "V4"}) {
    const auto& cg = env.cat.at(g);
    counting::ExactOptions opt;
    opt.two_unramified = true;
    opt.record = true;
    auto ex = counting::count_exact(cg.group, cg.spec, 10000, opt);
    std::vector<std::uint64_t> d1, d2;
    for (const auto& r : ex.records)
      if (r.verdict == "epi") d1.push_back(static_cast<std::uint64_t>(r.disc));
    d2 = oracle::oracle_count(oracle::abelian_by_name(g), 10000, true).discs;
    record("oracle_equivalence_" + g, d1 == d2);
  }
  json out = meta(env);
  out["seed"] = seed;
  out["ok"] = all;
  out["checks"] = checks;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nilpotent extension counting toolkit"};
  app.require_subcommand(1);
  Env env;
  app.add_option("--catalog", env.catalog_path, "Group catalog JSON (default: built-in catalog)");
  app.set_version_flag("--version", kVersion);

  // group
  auto* grp = app.add_subcommand("group", "Group catalog queries");
  grp->require_subcommand(1);
  std::string info_name;
  std::uint32_t info_d = 1;
  auto* info = grp->add_subcommand("info", "Invariants of a catalog group or group file");
  info->add_option("name", info_name, "Catalog name or JSON file")->required();
  info->add_option("--d", info_d, "Degree [K(zeta_lG):K]");
  std::string export_out;
  auto* exp = grp->add_subcommand("export", "Write the catalog as JSON");
  exp->add_option("--out", export_out, "Output file (default stdout)");
  auto* list = grp->add_subcommand("list", "List catalog names");

  // count
  CountArgs ca;
  auto* cnt = app.add_subcommand("count", "Count extensions up to a discriminant bound");
  cnt->add_option("--group", ca.group)->required();
  cnt->add_option("--mode", ca.mode)->check(CLI::IsMember({"upper", "exact", "heuristic"}));
  cnt->add_option("--X", ca.X)->required();
  cnt->add_option("--d", ca.d);
  cnt->add_flag("--two-unramified", ca.two_unram);
  cnt->add_option("--shards", ca.shards);
  cnt->add_option("--shard", ca.shard);
  cnt->add_option("--threads", ca.threads);
  cnt->add_option("--emit-discs", ca.emit, "CSV of discriminant records");

  // oracle
  std::string og, oX = "1000", oemit;
  bool o2 = false;
  auto* orc = app.add_subcommand("oracle", "Abelian oracle via Dirichlet characters");
  orc->add_option("--group", og)->required();
  orc->add_option("--X", oX)->required();
  orc->add_flag("--two-unramified", o2);
  orc->add_option("--emit-discs", oemit);

  // analytic
  auto* an = app.add_subcommand("analytic", "Numerical checks of the analytic inputs");
  an->require_subcommand(1);
  double zr = 1, zi = 0;
  std::string ax = "1e6", residues;
  std::uint64_t modulus = 1;
  std::uint32_t nwin = 11;
  auto add_az_opts = [&](CLI::App* s) {
    s->add_option("--z", zr, "Re z");
    s->add_option("--zi", zi, "Im z");
    s->add_option("--x", ax);
    s->add_option("--modulus", modulus);
    s->add_option("--residues", residues, "Comma-separated allowed residues");
    s->add_option("--windows", nwin);
  };
  auto* az = an->add_subcommand("az", "A_z(x) on dyadic windows");
  add_az_opts(az);
  auto* shape = an->add_subcommand("shape", "Fit of A_z(x) against x (log x)^(z density - 1)");
  add_az_opts(shape);
  std::string ff = "squarefree", fg = "squarefree";
  auto* conv = an->add_subcommand("conv", "Convolution against the hyperbola-method prediction");
  conv->add_option("--f", ff);
  conv->add_option("--g", fg);
  conv->add_option("--x", ax);
  conv->add_option("--windows", nwin);
  std::uint32_t fl = 2, fk = 2, fn = 8;
  std::string fa = "0,0";
  auto* filt = an->add_subcommand("filter", "Roots-of-unity filter identity for n = 0..N");
  filt->add_option("--l", fl);
  filt->add_option("--k", fk);
  filt->add_option("--a", fa);
  filt->add_option("--n", fn);

  std::uint64_t seed = 20240601;
  auto* st = app.add_subcommand("selftest", "Quick internal consistency checks");
  st->add_option("--seed", seed);

  auto fail = [](const std::string& kind, const std::string& detail) {
    std::cerr << json{{"error", kind}, {"detail", detail}}.dump() << '\n';
    return 2;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what());
  }

  try {
    env.load();
    if (*grp) {
      if (*info) {
        auto [name, cat] = env.resolve(info_name);
        json out = meta(env);
        out["group"] = group_info(*cat, name, info_d);
        std::cout << out.dump(2) << '\n';
      } else if (*exp) {
        auto s = env.cat.to_json().dump(2) + "\n";
        if (export_out.empty()) {
          std::cout << s;
        } else {
          std::ofstream(export_out, std::ios::binary) << s;
        }
      } else if (*list) {
        for (const auto& n : env.cat.names()) std::cout << n << '\n';
      }
    } else if (*cnt) {
      std::cout << run_count(env, ca).dump(2) << '\n';
    } else if (*orc) {
      std::cout << run_oracle(env, og, oX, o2, oemit).dump(2) << '\n';
    } else if (*an) {
      using namespace malle::analytic;
      std::cout << "x,value,prediction,ratio\n";
      if (*az || *shape) {
        auto x = static_cast<std::uint64_t>(parse_bound(ax));
        auto cond = condition(modulus, residues);
        auto xs = windows_to(x, nwin);
        const cplx z(zr, zi);
        const double w = zr * cond.density() - 1;
        if (*az) {
          auto vals = a_z_series(xs, z, cond);
          for (std::size_t i = 0; i < xs.size(); ++i) {
            double xd = static_cast<double>(xs[i]);
            csv_row(std::cout, xd, vals[i].real(), xd * std::pow(std::log(xd), w));
          }
        } else {
          auto fit = sd_shape_check(z, cond, xs);
          for (const auto& [xd, v] : fit.windows)
            csv_row(std::cout, xd, v, fit.c * xd * std::pow(std::log(xd), fit.log_power));
          std::cerr << json{{"log_power", fit.log_power}, {"expected", w}, {"c", fit.c}, {"residual", fit.residual}}.dump()
                    << '\n';
        }
      } else if (*conv) {
        auto x = static_cast<std::uint64_t>(parse_bound(ax));
        for (auto xi : windows_to(x, nwin)) {
          auto r = convolution_check(function_kind(ff), function_kind(fg), xi);
          csv_row(std::cout, static_cast<double>(xi), r.direct, r.predicted);
        }
      } else if (*filt) {
        std::vector<std::uint32_t> a;
        for (auto v : parse_list(fa)) a.push_back(static_cast<std::uint32_t>(v));
        for (std::uint32_t n = 0; n <= fn; ++n) {
          auto r = filter_identity_check(fl, fk, a, n);
          csv_row(std::cout, n, r.lhs, r.rhs.real());
        }
      }
    } else if (*st) {
      auto out = selftest(env, seed);
      std::cout << out.dump(2) << '\n';
      return out["ok"].get<bool>() ? 0 : 1;
    }
  } catch (const Error& e) {
    return fail(e.kind(), e.detail());
  } catch (const nlohmann::json::exception& e) {
    return fail("InvalidCatalog", e.what());
  } catch (const std::exception& e) {
    return fail("InternalError", e.what());
  }
  return 0;
}
