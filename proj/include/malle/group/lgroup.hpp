#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "../error.hpp"
#include "flinalg.hpp"

namespace malle::group {

/// Group elements are packed integers: digit t (base l) is the fiber coordinate
/// introduced at step t+1, so the projection to G_i is "x mod l^i".
using Elem = std::uint32_t;

inline constexpr std::uint32_t kMaxOrder = 4096;
inline constexpr std::uint32_t kTableOrder = 1024;  // precompute products up to here

/// Normalized 2-cocycle G_{i-1} x G_{i-1} -> F_l, dense row-major.
struct CocycleTable {
  std::uint32_t l = 2;
  std::uint32_t level_order = 1;
  std::vector<std::uint8_t> table = {0};

  std::uint32_t operator()(Elem g, Elem h) const { return table[static_cast<std::size_t>(g) * level_order + h]; }
  std::uint8_t& at(Elem g, Elem h) { return table[static_cast<std::size_t>(g) * level_order + h]; }

  bool is_zero() const {
    for (auto v : table)
      if (v) return false;
    return true;
  }

  static CocycleTable zero(std::uint32_t l, std::uint32_t n) {
    CocycleTable c;
    c.l = l;
    c.level_order = n;
    c.table.assign(static_cast<std::size_t>(n) * n, 0);
    return c;
  }
};

/// Tower of central extensions G_i = (F_l x G_{i-1}, *_theta_i), i = 1..r.
struct AdmissibleSequence {
  std::string name;
  std::uint32_t l = 2;
  std::vector<CocycleTable> cocycles;  // cocycles[i] lives on G_i (0-based), i.e. theta_{i+1}

  std::uint32_t r() const { return static_cast<std::uint32_t>(cocycles.size()); }
};

inline bool is_small_prime(std::uint32_t l) {
  if (l < 2) return false;
  for (std::uint32_t d = 2; d * d <= l; ++d)
    if (l % d == 0) return false;
  return true;
}

class LGroup;
std::optional<std::vector<std::uint32_t>> is_coboundary(const LGroup& G, const CocycleTable& theta);

class LGroup {
 public:
  /// Validates the sequence (shape, normalization, cocycle identity, triviality rule,
  /// associativity) and builds the group.
  static LGroup build(AdmissibleSequence seq) { return build_impl(std::move(seq), true); }

  /// Skips validation; for sequences produced internally and already checked.
  static LGroup build_unchecked(AdmissibleSequence seq) { return build_impl(std::move(seq), false); }

  const std::string& name() const { return seq_.name; }
  const AdmissibleSequence& seq() const { return seq_; }
  std::uint32_t l() const { return seq_.l; }
  std::uint32_t r() const { return seq_.r(); }
  std::uint32_t order() const { return order_; }
  Elem identity() const { return 0; }

  /// l^level = #G_level.
  std::uint32_t level_order(std::uint32_t level) const { return pw_[level]; }

  std::uint32_t coord(Elem x, std::uint32_t t) const { return (x / pw_[t]) % seq_.l; }

  std::vector<std::uint32_t> coords(Elem x) const {
    std::vector<std::uint32_t> c(r());
    for (std::uint32_t t = 0; t < r(); ++t) c[t] = coord(x, t);
    return c;
  }

  Elem from_coords(const std::vector<std::uint32_t>& c) const {
    if (c.size() != r()) throw Error("InvalidElement", "coordinate vector has wrong length");
    Elem x = 0;
    for (std::uint32_t t = 0; t < r(); ++t) {
      if (c[t] >= l()) throw Error("InvalidElement", "coordinate out of range");
      x += c[t] * pw_[t];
    }
    return x;
  }

  /// Image of x in G_level.
  Elem project(Elem x, std::uint32_t level) const { return x % pw_[level]; }

  Elem mul(Elem x, Elem y) const {
    if (!table_.empty()) return table_[static_cast<std::size_t>(x) * order_ + y];
    return mul_slow(x, y);
  }

  Elem inv(Elem x) const { return inv_[x]; }

  Elem pow(Elem x, std::uint64_t n) const {
    Elem r = 0, b = x;
    while (n) {
      if (n & 1) r = mul(r, b);
      b = mul(b, b);
      n >>= 1;
    }
    return r;
  }

  /// G_level as a group in its own right (level = r gives *this).
  const LGroup& prefix(std::uint32_t level) const {
    if (level > r()) throw Error("InvalidLevel", std::to_string(level));
    return level == r() ? *this : *prefixes_[level];
  }

  std::string format(Elem x) const {
    std::string s = "(";
    for (std::uint32_t t = 0; t < r(); ++t) {
      if (t) s += ",";
      s += std::to_string(coord(x, t));
    }
    return s + ")";
  }

 private:
  static LGroup build_impl(AdmissibleSequence seq, bool validate);

  Elem mul_slow(Elem x, Elem y) const {
    Elem out = 0;
    const std::uint32_t l = seq_.l;
    for (std::uint32_t t = 0; t < r(); ++t) {
      const auto& th = seq_.cocycles[t];
      std::uint32_t d = (coord(x, t) + coord(y, t) + th(x % pw_[t], y % pw_[t])) % l;
      out += d * pw_[t];
    }
    return out;
  }

  void finish() {
    if (order_ <= kTableOrder) {
      table_.resize(static_cast<std::size_t>(order_) * order_);
      for (Elem x = 0; x < order_; ++x)
        for (Elem y = 0; y < order_; ++y) table_[static_cast<std::size_t>(x) * order_ + y] = mul_slow(x, y);
    }
    // inverses digit by digit: y_t = -x_t - theta(x mod l^t, y mod l^t)
    inv_.resize(order_);
    const std::uint32_t l = seq_.l;
    for (Elem x = 0; x < order_; ++x) {
      Elem y = 0;
      for (std::uint32_t t = 0; t < r(); ++t) {
        std::uint32_t th = seq_.cocycles[t](x % pw_[t], y % pw_[t]);
        std::uint32_t d = (2 * l - coord(x, t) - th) % l;
        y += d * pw_[t];
      }
      inv_[x] = y;
    }
  }

  AdmissibleSequence seq_;
  std::uint32_t order_ = 1;
  std::vector<std::uint32_t> pw_;
  std::vector<Elem> table_;
  std::vector<Elem> inv_;
  std::vector<std::shared_ptr<const LGroup>> prefixes_;  // G_0 .. G_{r-1}
};

inline LGroup LGroup::build_impl(AdmissibleSequence seq, bool validate) {
  if (!is_small_prime(seq.l)) throw Error("InvalidSequence", "l is not prime: " + std::to_string(seq.l));
  std::uint64_t n = 1;
  for (std::uint32_t i = 0; i < seq.r(); ++i) {
    if (n > kMaxOrder) break;
    const auto& c = seq.cocycles[i];
    if (c.l != seq.l) throw Error("InvalidSequence", "step " + std::to_string(i + 1) + ": prime mismatch");
    if (c.level_order != n || c.table.size() != n * n)
      throw Error("InvalidSequence", "step " + std::to_string(i + 1) + ": table must have " +
                                         std::to_string(n) + "x" + std::to_string(n) + " entries");
    for (auto v : c.table)
      if (v >= seq.l) throw Error("InvalidSequence", "step " + std::to_string(i + 1) + ": entry not in F_l");
    n *= seq.l;
  }
  if (n > kMaxOrder) throw Error("TooLarge", "group order exceeds " + std::to_string(kMaxOrder));

  LGroup G;
  G.seq_ = std::move(seq);
  G.order_ = static_cast<std::uint32_t>(n);
  G.pw_.assign(G.r() + 1, 1);
  for (std::uint32_t t = 1; t <= G.r(); ++t) G.pw_[t] = G.pw_[t - 1] * G.seq_.l;

  // prefixes G_0..G_{r-1}, each sharing the smaller ones
  for (std::uint32_t i = 0; i < G.r(); ++i) {
    auto P = std::make_shared<LGroup>();
    P->seq_.name = G.seq_.name + "/G" + std::to_string(i);
    P->seq_.l = G.seq_.l;
    P->seq_.cocycles.assign(G.seq_.cocycles.begin(), G.seq_.cocycles.begin() + i);
    P->order_ = G.pw_[i];
    P->pw_.assign(G.pw_.begin(), G.pw_.begin() + i + 1);
    P->prefixes_ = G.prefixes_;
    P->finish();
    if (validate) {
      const auto& th = G.seq_.cocycles[i];
      const std::string step = "step " + std::to_string(i + 1);
      if (th(0, 0) != 0) throw Error("CocycleViolation", step + ": theta(id,id) != 0");
      const std::uint32_t m = P->order();
      auto check = [&](Elem g, Elem h, Elem k) {
        std::uint32_t lhs = (th(g, h) + th(P->mul(g, h), k)) % G.seq_.l;
        std::uint32_t rhs = (th(h, k) + th(g, P->mul(h, k))) % G.seq_.l;
        if (lhs != rhs)
          throw Error("CocycleViolation", step + ": triple (" + P->format(g) + ", " + P->format(h) + ", " +
                                              P->format(k) + ")");
      };
      if (m <= 32) {
        for (Elem g = 0; g < m; ++g)
          for (Elem h = 0; h < m; ++h)
            for (Elem k = 0; k < m; ++k) check(g, h, k);
      } else {
        std::mt19937_64 rng(0x5EEDu + i);
        std::uniform_int_distribution<Elem> d(0, m - 1);
        for (int t = 0; t < 100000; ++t) check(d(rng), d(rng), d(rng));
      }
      if (!th.is_zero() && is_coboundary(*P, th))
        throw Error("TrivialityRuleViolation", step + ": nonzero cocycle with trivial class");
    }
    G.prefixes_.push_back(std::move(P));
  }
  G.finish();

  if (validate) {
    auto assoc = [&](Elem x, Elem y, Elem z) {
      if (G.mul(G.mul(x, y), z) != G.mul(x, G.mul(y, z)))
        throw Error("CocycleViolation", "associativity fails at (" + G.format(x) + ", " + G.format(y) + ", " +
                                            G.format(z) + ")");
    };
    if (G.order() <= 64) {
      for (Elem x = 0; x < G.order(); ++x)
        for (Elem y = 0; y < G.order(); ++y)
          for (Elem z = 0; z < G.order(); ++z) assoc(x, y, z);
    } else {
      std::mt19937_64 rng(0xA55Cu);
      std::uniform_int_distribution<Elem> d(0, G.order() - 1);
      for (int t = 0; t < 100000; ++t) assoc(d(rng), d(rng), d(rng));
    }
    for (Elem x = 0; x < G.order(); ++x)
      if (G.mul(x, G.inv(x)) != 0 || G.mul(G.inv(x), x) != 0)
        throw Error("CocycleViolation", "inverse fails at " + G.format(x));
  }
  return G;
}

/// A 1-cochain c with c(g) + c(h) - c(gh) = theta(g,h), c(id) = 0, if theta is a
/// coboundary; nullopt iff its class is nontrivial.
inline std::optional<std::vector<std::uint32_t>> is_coboundary(const LGroup& G, const CocycleTable& theta) {
  const std::uint32_t n = G.order(), l = G.l();
  if (theta.level_order != n) throw Error("InvalidSequence", "cocycle defined on a different group");
  // unknowns: c(g) for g = 1..n-1 (index g-1)
  FlSystem sys(l, n - 1);
  std::vector<std::uint32_t> row(n - 1);
  for (Elem g = 1; g < n; ++g) {
    for (Elem h = 1; h < n; ++h) {
      std::fill(row.begin(), row.end(), 0);
      row[g - 1] = (row[g - 1] + 1) % l;
      row[h - 1] = (row[h - 1] + 1) % l;
      Elem gh = G.mul(g, h);
      if (gh != 0) row[gh - 1] = (row[gh - 1] + l - 1) % l;
      if (!sys.add(row, theta(g, h))) return std::nullopt;
    }
  }
  auto sol = sys.solve();
  if (!sol) return std::nullopt;
  std::vector<std::uint32_t> c(n, 0);
  for (Elem g = 1; g < n; ++g) c[g] = (*sol)[g - 1];
  return c;
}

/// The coboundary dc(g,h) = c(g) + c(h) - c(gh).
inline CocycleTable coboundary(const LGroup& G, const std::vector<std::uint32_t>& c) {
  auto t = CocycleTable::zero(G.l(), G.order());
  for (Elem g = 0; g < G.order(); ++g)
    for (Elem h = 0; h < G.order(); ++h)
      t.at(g, h) = static_cast<std::uint8_t>((c[g] + c[h] + G.l() - c[G.mul(g, h)]) % G.l());
  return t;
}

}  // namespace malle::group
