#pragma once

#include <stdexcept>
#include <string>

namespace malle {

/// Library error carrying a stable machine-readable kind (e.g. "CocycleViolation").
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)), detail_(detail) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string kind_;
  std::string detail_;
};

}  // namespace malle
