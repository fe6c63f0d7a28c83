#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lacuna/group.hpp"

namespace lacuna {

// balls:a..b  -> E = F = ball(r) for r = a..b (free groups)
// intervals:a..b -> E = F = {0..2^j} for j = a..b (Z or N)
struct Schedule {
  enum class Kind { Balls, Intervals };
  Kind kind = Kind::Balls;
  int first = 1;
  int last = 1;

  static Schedule parse(const std::string& text);
  std::string text() const;
  std::size_t steps() const { return static_cast<std::size_t>(last - first + 1); }
  Schedule extended(int extra) const { return {kind, first, last + extra}; }

  // Row/column sets of step k.
  std::pair<FiniteSet, FiniteSet> window(const GroupSpec& g, std::size_t k, const Limits& limits = {}) const;
  int parameter(std::size_t k) const { return first + static_cast<int>(k); }
};

}  // namespace lacuna
