#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "../error.hpp"

namespace malle::counting {

struct FitReport {
  double a = 0;          // assumed exponent
  double log_power = 0;  // slope: estimated b - 1
  double c = 0;          // exp(intercept)
  double residual = 0;   // l2 norm of residuals
  std::vector<std::pair<double, double>> windows;
};

/// Ordinary least squares y = alpha + beta x; returns (alpha, beta, residual norm).
inline std::tuple<double, double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw Error("InsufficientData", "degenerate abscissae");
  const double beta = sxy / sxx, alpha = my - beta * mx;
  double res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) res += std::pow(y[i] - alpha - beta * x[i], 2);
  return {alpha, beta, std::sqrt(res)};
}

inline void check_windows(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 6) throw Error("InsufficientData", "need at least 6 windows, got " + std::to_string(pts.size()));
  for (auto [X, N] : pts)
    if (!(N > 0) || !(X > std::exp(1.0))) throw Error("InsufficientData", "windows need N > 0 and X > e");
}

/// Fits log(N / X^a) = log c + (b - 1) log log X.
inline FitReport fit_asymptotic(const std::vector<std::pair<double, double>>& pts, double a) {
  check_windows(pts);
  std::vector<double> x, y;
  for (auto [X, N] : pts) {
    x.push_back(std::log(std::log(X)));
    y.push_back(std::log(N) - a * std::log(X));
  }
  auto [alpha, beta, res] = least_squares(x, y);
  FitReport f;
  f.a = a;
  f.log_power = beta;
  f.c = std::exp(alpha);
  f.residual = res;
  f.windows = pts;
  return f;
}

/// Slope of log N against log X.
inline FitReport fit_exponent(const std::vector<std::pair<double, double>>& pts) {
  check_windows(pts);
  std::vector<double> x, y;
  for (auto [X, N] : pts) {
    x.push_back(std::log(X));
    y.push_back(std::log(N));
  }
  auto [alpha, beta, res] = least_squares(x, y);
  FitReport f;
  f.a = beta;
  f.c = std::exp(alpha);
  f.residual = res;
  f.windows = pts;
  return f;
}

/// Dyadic bounds X0 * 2^k, k = 0..count-1.
inline std::vector<double> dyadic(double X0, std::uint32_t count) {
  std::vector<double> xs;
  for (std::uint32_t k = 0; k < count; ++k) xs.push_back(X0 * std::ldexp(1.0, static_cast<int>(k)));
  return xs;
}

}  // namespace malle::counting
