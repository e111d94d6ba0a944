#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <vector>

#include "../error.hpp"

namespace malle::group {

/// Anything with elements 0..order()-1, identity 0, mul and inv.
template <class G>
concept FiniteGroup = requires(const G& g, std::uint32_t x) {
  { g.order() } -> std::convertible_to<std::uint32_t>;
  { g.mul(x, x) } -> std::convertible_to<std::uint32_t>;
  { g.inv(x) } -> std::convertible_to<std::uint32_t>;
};

template <FiniteGroup G>
std::uint32_t element_order(const G& grp, std::uint32_t x) {
  std::uint32_t n = 1;
  std::uint32_t y = x;
  while (y != 0) {
    y = grp.mul(y, x);
    ++n;
  }
  return n;
}

template <FiniteGroup G>
std::uint32_t conjugate(const G& grp, std::uint32_t g, std::uint32_t x) {  // g x g^-1
  return grp.mul(grp.mul(g, x), grp.inv(g));
}

template <FiniteGroup G>
std::vector<std::uint32_t> conjugacy_class(const G& grp, std::uint32_t x) {
  std::vector<char> seen(grp.order(), 0);
  std::vector<std::uint32_t> out;
  for (std::uint32_t g = 0; g < grp.order(); ++g) {
    auto y = conjugate(grp, g, x);
    if (!seen[y]) {
      seen[y] = 1;
      out.push_back(y);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <FiniteGroup G>
std::vector<std::uint32_t> centralizer(const G& grp, std::uint32_t x) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t g = 0; g < grp.order(); ++g)
    if (grp.mul(g, x) == grp.mul(x, g)) out.push_back(g);
  return out;
}

template <FiniteGroup G>
bool is_abelian(const G& grp) {
  for (std::uint32_t x = 0; x < grp.order(); ++x)
    for (std::uint32_t y = x + 1; y < grp.order(); ++y)
      if (grp.mul(x, y) != grp.mul(y, x)) return false;
  return true;
}

template <FiniteGroup G>
std::vector<std::uint32_t> center(const G& grp) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t x = 0; x < grp.order(); ++x) {
    bool c = true;
    for (std::uint32_t y = 0; y < grp.order() && c; ++y) c = grp.mul(x, y) == grp.mul(y, x);
    if (c) out.push_back(x);
  }
  return out;
}

template <FiniteGroup G>
std::uint32_t exponent(const G& grp) {
  std::uint32_t e = 1;
  for (std::uint32_t x = 0; x < grp.order(); ++x) e = std::lcm(e, element_order(grp, x));
  return e;
}

/// Conjugacy class index for every element, classes numbered by smallest member.
template <FiniteGroup G>
std::vector<std::uint32_t> class_labels(const G& grp) {
  const std::uint32_t n = grp.order();
  std::vector<std::uint32_t> label(n, n);
  for (std::uint32_t x = 0; x < n; ++x) {
    if (label[x] != n) continue;
    for (std::uint32_t g = 0; g < n; ++g) label[conjugate(grp, g, x)] = x;
  }
  return label;
}

/// Subgroup generated by a set, as a sorted element list.
template <FiniteGroup G>
std::vector<std::uint32_t> generated_subgroup(const G& grp, const std::vector<std::uint32_t>& gens) {
  std::vector<char> in(grp.order(), 0);
  std::vector<std::uint32_t> out = {0};
  in[0] = 1;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (auto s : gens) {
      auto y = grp.mul(out[i], s);
      if (!in[y]) {
        in[y] = 1;
        out.push_back(y);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace malle::group
