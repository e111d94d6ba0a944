#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "../arith/numtheory.hpp"
#include "../error.hpp"
#include "../group/invariants.hpp"
#include "../group/lgroup.hpp"
#include "../param/pipeline.hpp"
#include "enumerate.hpp"

namespace malle::counting {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt to_big(u128 x) {
  BigInt b = static_cast<std::uint64_t>(x >> 64);
  b <<= 64;
  b += static_cast<std::uint64_t>(x);
  return b;
}

inline u128 from_big(const BigInt& b) {
  if (b < 0 || boost::multiprecision::msb(b) >= 127) throw Error("TooLarge", "bound must be below 2^127");
  return (static_cast<u128>(static_cast<std::uint64_t>(b >> 64)) << 64) |
         static_cast<std::uint64_t>(b & BigInt(~std::uint64_t{0}));
}

inline std::string u128_str(u128 x) { return to_big(x).str(); }

struct CountReport {
  std::string mode;
  std::string group;
  BigInt X = 0;
  BigInt lower = 0;
  BigInt upper = 0;
  double heuristic = 0;
  std::uint64_t unknown_tuples = 0;
  double elapsed = 0;
  Shard shard;
  bool two_unramified = false;
  std::uint32_t d = 1;
  std::string note;
};

/// Runs fn(shard) for every shard on a pool of `threads` workers.
inline void run_shards(std::uint32_t shards, std::uint32_t threads, const std::function<void(std::uint32_t)>& fn) {
  threads = std::max<std::uint32_t>(1, std::min(threads, shards));
  if (threads == 1) {
    for (std::uint32_t s = 0; s < shards; ++s) fn(s);
    return;
  }
  std::atomic<std::uint32_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex m;
  for (std::uint32_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::uint32_t s; (s = next++) < shards;) {
        try {
          fn(s);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

inline std::uint32_t default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct DiscRecord {
  u128 disc;
  std::string verdict;
  std::string tuple;
};

struct ExactOptions {
  bool two_unramified = false;
  Shard shard;                 // run only this shard
  std::uint32_t threads = 1;   // internal parallel split of the shard
  bool record = false;         // collect per-tuple records (epi and unknown)
};

struct ExactResult {
  CountReport report;
  std::vector<DiscRecord> records;  // sorted by (disc, tuple)
};

namespace detail {

inline std::string tuple_string(const group::LGroup& G, const std::vector<i64>& v) {
  std::string s;
  for (Elem g = 1; g < v.size(); ++g) {
    if (v[g] == 1) continue;
    if (!s.empty()) s += ";";
    s += G.format(g) + "=" + std::to_string(v[g]);
  }
  return s;
}

inline void check_exact_target(const group::LGroup& G) {
  if (G.l() != 2) throw Error("Unsupported", "exact counting needs an l = 2 group");
  if (G.order() > 64) throw Error("TooLarge", "exact counting limited to order 64");
}

}  // namespace detail

/// Exact bracket [#Epi, #Epi + #Unknown] over tuples of norm <= X, plus, for every
/// window bound in `windows`, the number of epi tuples with norm <= that bound.
inline ExactResult count_exact_impl(const group::LGroup& G, const param::ObstructionSpec& spec, u128 X,
                                    const ExactOptions& opt, const std::vector<u128>& windows,
                                    std::vector<std::uint64_t>* window_epi,
                                    std::vector<std::uint64_t>* window_unknown) {
  detail::check_exact_target(G);
  param::Pipeline P(G, spec);
  Target T = Target::of(group::NilpotentGroup({G}));
  auto t0 = std::chrono::steady_clock::now();
  const std::uint32_t sub = std::max<std::uint32_t>(1, opt.threads);
  struct Part {
    std::uint64_t epi = 0, unknown = 0;
    std::vector<DiscRecord> rec;
    std::vector<std::uint64_t> we, wu;
  };
  std::vector<Part> parts(sub);
  run_shards(sub, sub, [&](std::uint32_t s) {
    EnumConstraints C;
    C.X = X;
    C.two_unramified = opt.two_unramified;
    C.shard = {opt.shard.count * sub, opt.shard.index + opt.shard.count * s};
    Part& part = parts[s];
    part.we.assign(windows.size(), 0);
    part.wu.assign(windows.size(), 0);
    std::vector<std::pair<i64, Elem>> ps;
    enumerate_tuples(T, C, [&](const TupleView& tv) {
      ps = tv.primes;
      std::erase_if(ps, [](const auto& x) { return x.first == 2; });
      std::sort(ps.begin(), ps.end());
      auto verdict = P.decide(tv.v, ps);
      bool epi = verdict.kind == param::Verdict::Kind::Epi;
      bool unk = verdict.kind == param::Verdict::Kind::Unknown;
      if (!epi && !unk) return;
      (epi ? part.epi : part.unknown)++;
      if (!windows.empty()) {
        auto it = std::lower_bound(windows.begin(), windows.end(), tv.norm);
        if (it != windows.end()) (epi ? part.we : part.wu)[it - windows.begin()]++;
      }
      if (opt.record) part.rec.push_back({tv.norm, verdict.str(), detail::tuple_string(G, tv.v)});
    });
  });
  ExactResult out;
  auto& R = out.report;
  R.mode = "exact";
  R.group = G.name();
  R.X = to_big(X);
  R.shard = opt.shard;
  R.two_unramified = opt.two_unramified;
  std::uint64_t epi = 0, unk = 0;
  if (window_epi) window_epi->assign(windows.size(), 0);
  if (window_unknown) window_unknown->assign(windows.size(), 0);
  for (auto& p : parts) {
    epi += p.epi;
    unk += p.unknown;
    for (std::size_t k = 0; k < windows.size(); ++k) {
      if (window_epi) (*window_epi)[k] += p.we[k];
      if (window_unknown) (*window_unknown)[k] += p.wu[k];
    }
    for (auto& r : p.rec) out.records.push_back(std::move(r));
  }
  // cumulative window counts
  for (std::size_t k = 1; k < windows.size(); ++k) {
    if (window_epi) (*window_epi)[k] += (*window_epi)[k - 1];
    if (window_unknown) (*window_unknown)[k] += (*window_unknown)[k - 1];
  }
  std::sort(out.records.begin(), out.records.end(), [](const DiscRecord& a, const DiscRecord& b) {
    return a.disc != b.disc ? a.disc < b.disc : a.tuple < b.tuple;
  });
  R.lower = epi;
  R.upper = epi + unk;
  R.unknown_tuples = unk;
  R.note = opt.two_unramified ? "norm = discriminant (2-unramified)" : "norm = odd discriminant times 2^e for the 2-carrying entry";
  R.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline ExactResult count_exact(const group::LGroup& G, const param::ObstructionSpec& spec, u128 X,
                               const ExactOptions& opt = {}) {
  return count_exact_impl(G, spec, X, opt, {}, nullptr, nullptr);
}

/// Epi counts at each bound in `xs` (ascending) from a single enumeration at max(xs).
/// Also returns the unknown counts per bound.
inline std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> count_exact_windows(
    const group::LGroup& G, const param::ObstructionSpec& spec, const std::vector<u128>& xs,
    const ExactOptions& opt = {}) {
  if (xs.empty() || !std::is_sorted(xs.begin(), xs.end())) throw Error("InvalidWindows", "bounds must be ascending");
  std::vector<std::uint64_t> e, u;
  count_exact_impl(G, spec, xs.back(), opt, xs, &e, &u);
  return {e, u};
}

// ---------------------------------------------------------------------------
// Upper and heuristic counts

/// Sum over n <= T (odd, squarefree, all primes allowed, coprime to a finite set P) of
/// W^omega(n), using a prefix table for P empty and S_P(T) = S_{P\p}(T) - W S_P(T/p).
template <class Num>
class LightSum {
 public:
  LightSum(std::uint64_t Tmax, Num W, const std::function<bool(std::uint64_t)>& allowed) : W_(W) {
    auto s = arith::shared_sieve(std::max<std::uint64_t>(Tmax, 2));
    const auto& S = *s;
    prefix_.assign(Tmax + 1, Num(0));
    std::vector<Num> wpow(32, Num(1));
    for (std::size_t k = 1; k < wpow.size(); ++k) wpow[k] = wpow[k - 1] * W;
    std::vector<char> ok(Tmax + 1, 0);
    if (Tmax >= 1) ok[1] = 1;
    for (std::uint64_t n = 2; n <= Tmax; ++n) {
      std::uint64_t p = S.lpf[n], m = n / p;
      ok[n] = m % p != 0 && ok[m] && allowed(p);
    }
    Num acc = Num(0);
    for (std::uint64_t n = 1; n <= Tmax; ++n) {
      if (ok[n]) acc += wpow[S.omega[n]];
      prefix_[n] = acc;
    }
  }

  Num operator()(std::uint64_t T, const std::vector<std::uint64_t>& P, std::size_t np) const {
    if (T == 0) return Num(0);
    if (T >= prefix_.size()) throw Error("CapExceeded", "light table too small");
    if (np == 0) return prefix_[T];
    std::uint64_t p = P[np - 1];
    return (*this)(T, P, np - 1) - W_ * (*this)(T / p, P, np);
  }

  std::uint64_t size() const { return prefix_.size() - 1; }

 private:
  Num W_;
  std::vector<Num> prefix_;
};

struct UpperOptions {
  std::uint32_t d = 1;        // thinning degree for heuristic mode
  bool heuristic = false;
};

namespace detail {

/// Shared core of count_upper and count_heuristic at several bounds.
template <class Num, class Acc>
std::vector<Acc> light_heavy_count(const Target& T, const std::vector<u128>& xs, const UpperOptions& opt) {
  const std::uint32_t lG = T.lG;
  std::vector<Elem> light, heavy;
  std::uint32_t emin = ~0u;
  for (Elem g = 1; g < T.order; ++g) emin = std::min(emin, T.e[g]);
  for (Elem g = 1; g < T.order; ++g) (T.elem_order[g] == lG ? light : heavy).push_back(g);
  for (Elem g : light)
    if (T.e[g] != emin) throw Error("InvariantViolation", "light exponents differ");
  std::stable_sort(heavy.begin(), heavy.end(), [&](Elem a, Elem b) { return T.e[a] > T.e[b]; });

  Num W = Num(0);
  for (Elem g : light) W += opt.heuristic ? Num(1) / Num(T.conj_size[g]) : Num(1);
  // Allowed primes for I(G) coordinates: Frobenius order in (Z/lG)^* divides (lG-1)/d.
  const std::uint64_t frob_exp = (lG - 1) / opt.d;
  auto light_ok = [&](std::uint64_t p) {
    if (p == 2 || T.order % p == 0) return false;
    if (!opt.heuristic) return p % lG == 1 || lG == 2;
    return arith::powmod(p % lG, frob_exp, lG) == 1;
  };
  std::uint32_t two_entries = 0;
  std::vector<std::uint32_t> two_exps;
  for (Elem g = 1; g < T.order; ++g)
    if (T.two_part[g]) {
      ++two_entries;
      two_exps.push_back(T.e[g]);
    }
  const Acc sign_mult = Acc(two_entries + 1);

  const u128 Xmax = *std::max_element(xs.begin(), xs.end());
  const std::uint64_t Tmax = static_cast<std::uint64_t>(arith::iroot(Xmax, emin));
  LightSum<Num> L(Tmax, W, light_ok);
  SmallFactor fac(1 << 16);

  std::vector<Acc> out;
  for (u128 X : xs) {
    Acc total = Acc(0);
    std::vector<u128> budgets = {X};
    for (auto e : two_exps) {
      u128 c = 1;
      for (std::uint32_t i = 0; i < e; ++i) c *= 2;
      if (c <= X) budgets.push_back(X / c);
    }
    std::vector<std::uint64_t> P;
    std::vector<i64> ps;
    std::function<void(std::size_t, u128)> rec = [&](std::size_t k, u128 B) {
      if (k == heavy.size()) {
        std::vector<std::uint64_t> Pl;
        for (auto p : P)
          if (light_ok(p)) Pl.push_back(p);
        total += (Acc)L(static_cast<std::uint64_t>(arith::iroot(B, emin)), Pl, Pl.size());
        return;
      }
      const Elem g = heavy[k];
      const std::uint32_t e = T.e[g];
      const u128 M = arith::iroot(B, e);
      for (u128 mm = 1; mm <= M; ++mm) {
        const std::uint64_t m = static_cast<std::uint64_t>(mm);
        if (m > 1) {
          if (m % 2 == 0 || !fac.squarefree_primes(m, ps)) continue;
          bool ok = true;
          for (i64 p : ps)
            if (!T.allows(g, p, true) || std::find(P.begin(), P.end(), static_cast<std::uint64_t>(p)) != P.end())
              ok = false;
          if (!ok) continue;
        } else {
          ps.clear();
        }
        u128 me = 1;
        for (std::uint32_t i = 0; i < e; ++i) me *= mm;
        const std::size_t before = P.size();
        for (i64 p : ps) P.push_back(static_cast<std::uint64_t>(p));
        rec(k + 1, B / me);
        P.resize(before);
      }
    };
    for (u128 B : budgets) rec(0, B);
    out.push_back(sign_mult * total - Acc(1));
  }
  return out;
}

}  // namespace detail

/// Number of Prim tuples with norm <= X, no solvability filter.
inline std::vector<BigInt> count_upper_windows(const Target& T, const std::vector<u128>& xs) {
  auto v = detail::light_heavy_count<std::int64_t, __int128>(T, xs, {});
  std::vector<BigInt> out;
  for (auto x : v) out.push_back(to_big(static_cast<u128>(x)));
  return out;
}

inline CountReport count_upper(const Target& T, u128 X) {
  auto t0 = std::chrono::steady_clock::now();
  CountReport R;
  R.mode = "upper";
  R.group = T.name;
  R.X = to_big(X);
  R.upper = count_upper_windows(T, {X}).front();
  R.lower = 0;
  R.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return R;
}

inline void check_cyclotomic_degree(std::uint32_t lG, std::uint32_t d) {
  if (d == 0 || (lG - 1) % d != 0)
    throw Error("InvalidCyclotomicDegree", "d = " + std::to_string(d) + " does not divide " + std::to_string(lG - 1));
}

inline std::vector<double> count_heuristic_windows(const Target& T, const std::vector<u128>& xs, std::uint32_t d) {
  check_cyclotomic_degree(T.lG, d);
  UpperOptions o;
  o.heuristic = true;
  o.d = d;
  auto v = detail::light_heavy_count<double, long double>(T, xs, o);
  return std::vector<double>(v.begin(), v.end());
}

inline CountReport count_heuristic(const Target& T, u128 X, std::uint32_t d) {
  auto t0 = std::chrono::steady_clock::now();
  CountReport R;
  R.mode = "heuristic";
  R.group = T.name;
  R.X = to_big(X);
  R.d = d;
  R.heuristic = count_heuristic_windows(T, {X}, d).front();
  R.note = "local conditions at primes dividing entries outside I(G) are ignored";
  R.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return R;
}

}  // namespace malle::counting
