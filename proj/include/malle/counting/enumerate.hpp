#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "../arith/numtheory.hpp"
#include "../arith/sieve.hpp"
#include "../error.hpp"
#include "../group/algorithms.hpp"
#include "../group/nilpotent.hpp"

namespace malle::counting {

using arith::i64;
using arith::u128;
using group::Elem;

/// Flattened per-element data of a nilpotent target used by all counting modes.
struct Target {
  std::string name;
  std::uint32_t order = 1;
  std::uint32_t lG = 2;
  std::vector<std::uint32_t> e;          // discriminant exponent #G(1 - 1/ord g)
  std::vector<std::uint32_t> radical;    // product of primes dividing ord g
  std::vector<std::uint32_t> elem_order;
  std::vector<std::uint32_t> conj_size;
  std::vector<char> two_part;            // entry may carry a sign and the prime 2
  std::vector<std::uint32_t> two_coords; // bitmask of 2-factor coordinates of g

  static Target of(const group::NilpotentGroup& G) {
    Target t;
    t.name = G.name();
    t.order = G.order();
    t.lG = G.lG();
    const bool has2 = G.factors().front().l() == 2;
    for (Elem g = 0; g < G.order(); ++g) {
      auto o = group::element_order(G, g);
      t.elem_order.push_back(o);
      t.e.push_back(G.order() - G.order() / o);
      t.radical.push_back(G.order_radical(g));
      t.conj_size.push_back(static_cast<std::uint32_t>(group::conjugacy_class(G, g).size()));
      t.two_part.push_back(G.in_two_part(g) ? 1 : 0);
      t.two_coords.push_back(has2 ? G.component(g, 0) : 0);
    }
    return t;
  }

  bool allows(Elem g, i64 p, bool two_unramified) const {
    if (p == 2) return two_part[g] && !two_unramified;
    if (order % p == 0) return false;
    return p % radical[g] == 1;
  }
};

struct Shard {
  std::uint32_t count = 1;
  std::uint32_t index = 0;
};

struct EnumConstraints {
  u128 X = 0;
  bool two_unramified = false;  // odd entries, every 2-factor Pow coordinate = 1 mod 4
  Shard shard;
};

/// A visited tuple: entries by element, the (prime, element) support in visiting
/// order, and the norm prod |v_g|^e_g.
struct TupleView {
  const std::vector<i64>& v;
  const std::vector<std::pair<i64, Elem>>& primes;
  u128 norm;
};

/// Factors m using the shared sieve when it covers m.
class SmallFactor {
 public:
  explicit SmallFactor(std::uint64_t n) : s_(arith::shared_sieve(std::min<std::uint64_t>(n, kMaxSieve))) {}

  /// Distinct primes of m if m is squarefree; false otherwise.
  bool squarefree_primes(std::uint64_t m, std::vector<i64>& out) const {
    out.clear();
    if (m <= s_->N) {
      if (!s_->squarefree(m)) return false;
      while (m > 1) {
        std::uint32_t p = s_->lpf[m];
        out.push_back(p);
        m /= p;
      }
      return true;
    }
    for (auto [p, k] : arith::factor(m)) {
      if (k > 1) return false;
      out.push_back(static_cast<i64>(p));
    }
    return true;
  }

  const arith::SieveTables& tables() const { return *s_; }

 private:
  static constexpr std::uint64_t kMaxSieve = 50'000'000ULL;
  std::shared_ptr<const arith::SieveTables> s_;
};

/// Depth-first enumeration of Prim tuples with norm <= X. Variables are assigned in
/// decreasing exponent order; the first variable's absolute value is split across
/// shards round-robin. The all-ones tuple is skipped.
class TupleEnumerator {
 public:
  using Visit = std::function<void(const TupleView&)>;

  TupleEnumerator(const Target& T, EnumConstraints C) : T_(T), C_(C), fac_(max_range(T, C.X)) {
    if (C_.shard.count == 0 || C_.shard.index >= C_.shard.count) throw Error("InvalidShard", "shard index out of range");
    for (Elem g = 1; g < T.order; ++g) vars_.push_back(g);
    std::stable_sort(vars_.begin(), vars_.end(), [&](Elem a, Elem b) { return T.e[a] > T.e[b]; });
  }

  void run(const Visit& visit) {
    v_.assign(T_.order, 1);
    primes_.clear();
    neg_ = false;
    visit_ = &visit;
    rec(0, C_.X, 1);
  }

 private:
  static std::uint64_t max_range(const Target& T, u128 X) {
    std::uint32_t emin = ~0u;
    for (Elem g = 1; g < T.order; ++g) emin = std::min(emin, T.e[g]);
    u128 m = T.order > 1 ? arith::iroot(X, emin) : 1;
    return static_cast<std::uint64_t>(std::min<u128>(m, ~std::uint64_t{0}));
  }

  bool used(i64 p) const {
    for (const auto& [q, g] : primes_)
      if (q == p) return true;
    return false;
  }

  void leaf(u128 norm) {
    bool trivial = true;
    for (Elem g = 1; g < T_.order && trivial; ++g) trivial = v_[g] == 1;
    if (trivial) return;
    if (C_.two_unramified) {
      std::uint32_t neg4 = 0;  // coordinates whose product is 3 mod 4
      for (Elem g = 1; g < T_.order; ++g)
        if (arith::mod(v_[g], 4) == 3) neg4 ^= T_.two_coords[g];
      if (neg4) return;
    }
    (*visit_)({v_, primes_, norm});
  }

  void rec(std::size_t k, u128 budget, u128 norm) {
    if (k == vars_.size()) {
      leaf(norm);
      return;
    }
    const Elem g = vars_[k];
    const std::uint32_t e = T_.e[g];
    const u128 M = arith::iroot(budget, e);
    std::vector<i64> ps;
    for (u128 mm = 1; mm <= M; ++mm) {
      const std::uint64_t m = static_cast<std::uint64_t>(mm);
      if (k == 0 && m % C_.shard.count != C_.shard.index) continue;
      if (m > 1) {
        if (!fac_.squarefree_primes(m, ps)) continue;
        bool ok = true;
        for (i64 p : ps)
          if (!T_.allows(g, p, C_.two_unramified) || used(p)) {
            ok = false;
            break;
          }
        if (!ok) continue;
      } else {
        ps.clear();
      }
      u128 me = 1;
      for (std::uint32_t i = 0; i < e; ++i) me *= mm;
      for (i64 p : ps) primes_.emplace_back(p, g);
      v_[g] = static_cast<i64>(m);
      rec(k + 1, budget / me, norm * me);
      if (T_.two_part[g] && !neg_) {
        neg_ = true;
        v_[g] = -static_cast<i64>(m);
        rec(k + 1, budget / me, norm * me);
        neg_ = false;
      }
      v_[g] = 1;
      primes_.resize(primes_.size() - ps.size());
    }
  }

  const Target& T_;
  EnumConstraints C_;
  SmallFactor fac_;
  std::vector<Elem> vars_;
  std::vector<i64> v_;
  std::vector<std::pair<i64, Elem>> primes_;
  bool neg_ = false;
  const Visit* visit_ = nullptr;
};

inline void enumerate_tuples(const Target& T, const EnumConstraints& C, const TupleEnumerator::Visit& visit) {
  TupleEnumerator(T, C).run(visit);
}

}  // namespace malle::counting
