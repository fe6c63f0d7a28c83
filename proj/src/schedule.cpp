#include "lacuna/schedule.hpp"

#include <cstdlib>

#include "lacuna/errors.hpp"

namespace lacuna {

Schedule Schedule::parse(const std::string& text) {
  auto colon = text.find(':');
  auto dots = text.find("..");
  if (colon == std::string::npos || dots == std::string::npos || dots < colon)
    fail(ErrorCode::InvalidInput, "malformed schedule '" + text + "'", {{"expected", "balls:a..b or intervals:a..b"}});
  std::string kind = text.substr(0, colon);
  std::string a = text.substr(colon + 1, dots - colon - 1), b = text.substr(dots + 2);
  char* end1 = nullptr;
  char* end2 = nullptr;
  long lo = std::strtol(a.c_str(), &end1, 10), hi = std::strtol(b.c_str(), &end2, 10);
  if (a.empty() || b.empty() || *end1 || *end2 || lo < 0 || hi < lo || hi > 62)
    fail(ErrorCode::InvalidInput, "malformed schedule range in '" + text + "'");
  Schedule s;
  if (kind == "balls")
    s.kind = Kind::Balls;
  else if (kind == "intervals")
    s.kind = Kind::Intervals;
  else
    fail(ErrorCode::InvalidInput, "unknown schedule kind '" + kind + "'");
  s.first = static_cast<int>(lo);
  s.last = static_cast<int>(hi);
  return s;
}

std::string Schedule::text() const {
  return std::string(kind == Kind::Balls ? "balls:" : "intervals:") + std::to_string(first) + ".." +
         std::to_string(last);
}

std::pair<FiniteSet, FiniteSet> Schedule::window(const GroupSpec& g, std::size_t k, const Limits& limits) const {
  int p = parameter(k);
  if (kind == Kind::Balls) {
    FiniteSet b = ball(g, p, limits);
    return {b, b};
  }
  if (!g.is_numeric()) fail(ErrorCode::InvalidInput, "interval schedules need Z or N");
  FiniteSet iv = interval(g, 0, std::int64_t{1} << p, limits);
  return {iv, iv};
}

}  // namespace lacuna
