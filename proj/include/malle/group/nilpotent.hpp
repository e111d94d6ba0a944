#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "../error.hpp"
#include "algorithms.hpp"
#include "lgroup.hpp"

namespace malle::group {

/// Direct product of l-groups for pairwise distinct primes l_1 < ... < l_c.
/// Element index is mixed radix with the first factor least significant.
class NilpotentGroup {
 public:
  NilpotentGroup() = default;

  explicit NilpotentGroup(std::vector<LGroup> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw Error("InvalidProduct", "no factors");
    std::sort(factors_.begin(), factors_.end(), [](const LGroup& a, const LGroup& b) { return a.l() < b.l(); });
    for (std::size_t j = 1; j < factors_.size(); ++j)
      if (factors_[j].l() == factors_[j - 1].l())
        throw Error("DuplicatePrime", "two factors for l = " + std::to_string(factors_[j].l()));
    std::uint64_t n = 1;
    for (const auto& f : factors_) {
      stride_.push_back(static_cast<std::uint32_t>(n));
      n *= f.order();
    }
    if (n > kMaxOrder) throw Error("TooLarge", "product order exceeds " + std::to_string(kMaxOrder));
    order_ = static_cast<std::uint32_t>(n);
    for (const auto& f : factors_) name_ += (name_.empty() ? "" : "x") + f.name();
  }

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  const std::vector<LGroup>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  std::uint32_t order() const { return order_; }
  std::uint32_t lG() const { return factors_.front().l(); }

  Elem component(Elem x, std::size_t j) const { return (x / stride_[j]) % factors_[j].order(); }

  Elem combine(const std::vector<Elem>& comps) const {
    Elem x = 0;
    for (std::size_t j = 0; j < factors_.size(); ++j) x += comps[j] * stride_[j];
    return x;
  }

  Elem mul(Elem x, Elem y) const {
    Elem out = 0;
    for (std::size_t j = 0; j < factors_.size(); ++j)
      out += factors_[j].mul(component(x, j), component(y, j)) * stride_[j];
    return out;
  }

  Elem inv(Elem x) const {
    Elem out = 0;
    for (std::size_t j = 0; j < factors_.size(); ++j) out += factors_[j].inv(component(x, j)) * stride_[j];
    return out;
  }

  /// Product of the primes dividing the order of x.
  std::uint32_t order_radical(Elem x) const {
    std::uint32_t r = 1;
    for (std::size_t j = 0; j < factors_.size(); ++j)
      if (component(x, j) != 0) r *= factors_[j].l();
    return r;
  }

  /// True when x lies in the l = 2 factor (such entries carry sign / 2 data over Q).
  bool in_two_part(Elem x) const {
    if (factors_.front().l() != 2 || x == 0) return false;
    for (std::size_t j = 1; j < factors_.size(); ++j)
      if (component(x, j) != 0) return false;
    return true;
  }

  std::string format(Elem x) const {
    if (factors_.size() == 1) return factors_[0].format(x);
    std::string s;
    for (std::size_t j = 0; j < factors_.size(); ++j) s += (j ? "x" : "") + factors_[j].format(component(x, j));
    return s;
  }

 private:
  std::vector<LGroup> factors_;
  std::vector<std::uint32_t> stride_;
  std::uint32_t order_ = 1;
  std::string name_;
};

/// Direct product; a tuple of epimorphisms onto the factors is an epimorphism onto
/// the product since the factor orders are coprime.
inline NilpotentGroup direct_product(std::vector<LGroup> factors) { return NilpotentGroup(std::move(factors)); }

}  // namespace malle::group
