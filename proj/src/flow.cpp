#include "lacuna/flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace lacuna {
namespace {
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
}

MaxFlow::MaxFlow(std::size_t nodes) : head_(nodes, kNone), level_(nodes), iter_(nodes) {}

std::size_t MaxFlow::add_arc(std::size_t from, std::size_t to, double capacity) {
  std::size_t id = arcs_.size();
  arcs_.push_back({to, head_[from], capacity});
  head_[from] = id;
  arcs_.push_back({from, head_[to], 0.0});
  head_[to] = id + 1;
  original_.push_back(capacity);
  original_.push_back(0.0);
  return id;
}

bool MaxFlow::bfs(std::size_t s, std::size_t t) {
  std::fill(level_.begin(), level_.end(), kNone);
  std::queue<std::size_t> q;
  level_[s] = 0;
  q.push(s);
  while (!q.empty()) {
    std::size_t v = q.front();
    q.pop();
    for (std::size_t a = head_[v]; a != kNone; a = arcs_[a].next) {
      if (arcs_[a].cap > eps_ && level_[arcs_[a].to] == kNone) {
        level_[arcs_[a].to] = level_[v] + 1;
        q.push(arcs_[a].to);
      }
    }
  }
  return level_[t] != kNone;
}

double MaxFlow::dfs(std::size_t v, std::size_t t, double pushed) {
  if (v == t) return pushed;
  for (std::size_t& a = iter_[v]; a != kNone; a = arcs_[a].next) {
    Arc& arc = arcs_[a];
    if (arc.cap <= eps_ || level_[arc.to] != level_[v] + 1) continue;
    double got = dfs(arc.to, t, std::min(pushed, arc.cap));
    if (got > eps_) {
      arc.cap -= got;
      arcs_[a ^ 1].cap += got;
      return got;
    }
  }
  return 0.0;
}

double MaxFlow::solve(std::size_t source, std::size_t sink) {
  double total = 0.0;
  while (bfs(source, sink)) {
    iter_ = head_;
    while (true) {
      double f = dfs(source, sink, std::numeric_limits<double>::infinity());
      if (f <= eps_) break;
      total += f;
    }
  }
  return total;
}

double MaxFlow::flow(std::size_t arc) const { return original_[arc] - arcs_[arc].cap; }

std::vector<bool> MaxFlow::source_side(std::size_t source) const {
  std::vector<bool> seen(head_.size(), false);
  std::queue<std::size_t> q;
  seen[source] = true;
  q.push(source);
  while (!q.empty()) {
    std::size_t v = q.front();
    q.pop();
    for (std::size_t a = head_[v]; a != kNone; a = arcs_[a].next)
      if (arcs_[a].cap > eps_ && !seen[arcs_[a].to]) {
        seen[arcs_[a].to] = true;
        q.push(arcs_[a].to);
      }
  }
  return seen;
}

}  // namespace lacuna
