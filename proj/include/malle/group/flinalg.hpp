#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace malle::group {

/// Incremental solver for linear systems over F_l (l prime, small).
/// Equations are added one at a time and reduced against an echelon basis, so
/// huge redundant systems (one equation per pair of group elements) stay cheap.
class FlSystem {
 public:
  FlSystem(std::uint32_t l, std::size_t unknowns) : l_(l), n_(unknowns), pivot_row_(unknowns, -1) {
    inv_.assign(l, 0);
    for (std::uint32_t a = 1; a < l; ++a)
      for (std::uint32_t b = 1; b < l; ++b)
        if (a * b % l == 1) inv_[a] = b;
  }

  /// Adds sum_j coeffs[j] x_j = rhs. Returns false once the system is inconsistent.
  bool add(std::vector<std::uint32_t> coeffs, std::uint32_t rhs) {
    if (inconsistent_) return false;
    coeffs.push_back(rhs % l_);
    for (std::size_t j = 0; j < n_; ++j) {
      std::uint32_t c = coeffs[j] % l_;
      if (c == 0) continue;
      if (pivot_row_[j] >= 0) {
        const auto& row = rows_[static_cast<std::size_t>(pivot_row_[j])];
        std::uint32_t f = l_ - c;
        for (std::size_t t = j; t <= n_; ++t) coeffs[t] = (coeffs[t] + f * row[t]) % l_;
        continue;
      }
      std::uint32_t iv = inv_[c];
      for (std::size_t t = j; t <= n_; ++t) coeffs[t] = coeffs[t] * iv % l_;
      pivot_row_[j] = static_cast<int>(rows_.size());
      rows_.push_back(std::move(coeffs));
      return true;
    }
    if (coeffs[n_] % l_ != 0) inconsistent_ = true;
    return !inconsistent_;
  }

  bool consistent() const { return !inconsistent_; }
  std::size_t rank() const { return rows_.size(); }

  /// One solution (free variables set to 0), if consistent.
  std::optional<std::vector<std::uint32_t>> solve() const {
    if (inconsistent_) return std::nullopt;
    std::vector<std::uint32_t> x(n_, 0);
    for (std::size_t j = n_; j-- > 0;) {
      if (pivot_row_[j] < 0) continue;
      const auto& row = rows_[static_cast<std::size_t>(pivot_row_[j])];
      std::uint64_t v = row[n_];
      for (std::size_t t = j + 1; t < n_; ++t) v += (l_ - row[t]) % l_ * x[t];
      x[j] = static_cast<std::uint32_t>(v % l_);
    }
    return x;
  }

 private:
  std::uint32_t l_;
  std::size_t n_;
  std::vector<int> pivot_row_;
  std::vector<std::vector<std::uint32_t>> rows_;
  std::vector<std::uint32_t> inv_;
  bool inconsistent_ = false;
};

}  // namespace malle::group
