#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lacuna {

// Dinic's algorithm. Capacities are double; integral networks stay exact
// because all arithmetic is on small integers.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes);

  // Returns the arc index (for flow lookup).
  std::size_t add_arc(std::size_t from, std::size_t to, double capacity);
  double solve(std::size_t source, std::size_t sink);

  double flow(std::size_t arc) const;
  // Nodes reachable from the source in the final residual graph.
  std::vector<bool> source_side(std::size_t source) const;

  std::size_t num_nodes() const { return head_.size(); }

 private:
  struct Arc {
    std::size_t to;
    std::size_t next;
    double cap;
  };
  bool bfs(std::size_t s, std::size_t t);
  double dfs(std::size_t v, std::size_t t, double pushed);

  std::vector<Arc> arcs_;
  std::vector<std::size_t> head_;
  std::vector<std::size_t> level_;
  std::vector<std::size_t> iter_;
  std::vector<double> original_;
  double eps_ = 1e-12;
};

}  // namespace lacuna
