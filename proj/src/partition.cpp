#include "lacuna/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "lacuna/errors.hpp"
#include "lacuna/flow.hpp"
#include "lacuna/serialize.hpp"

namespace lacuna {
namespace {

constexpr double kRelTie = 1e-12;

bool nearly_equal(double a, double b) { return std::abs(a - b) <= kRelTie * std::max({1.0, a, b}); }

struct Loads {
  std::vector<double> row1;
  std::vector<double> col2;
};

Loads loads_of(const Window& w, const std::vector<std::uint8_t>& a) {
  Loads l{std::vector<double>(w.num_rows(), 0.0), std::vector<double>(w.num_cols(), 0.0)};
  for (std::size_t k = 0; k < w.entries.size(); ++k) {
    double m2 = std::norm(w.entries[k].weight);
    if (a[k] == 1)
      l.row1[w.entries[k].row] += m2;
    else
      l.col2[w.entries[k].col] += m2;
  }
  return l;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

PartitionCertificate finish(const Window& w, std::vector<std::uint8_t> a, Optimality opt, std::string method) {
  PartitionCertificate c;
  c.window_id = window_id(w);
  c.assignment = std::move(a);
  LineConstants k = partition_constants(w, c.assignment);
  c.c1 = k.c1;
  c.c2 = k.c2;
  c.c = std::max(k.c1, k.c2);
  c.optimality = opt;
  c.method = std::move(method);
  return c;
}

bool flow_feasible(const Window& w, std::int64_t cap, std::vector<std::uint8_t>* assignment) {
  std::size_t nr = w.num_rows(), nc = w.num_cols();
  std::vector<std::int64_t> deg(nc, 0);
  for (const auto& e : w.entries) ++deg[e.col];
  // nodes: source, columns, rows, sink
  std::size_t src = 0, sink = 1 + nc + nr;
  MaxFlow net(nc + nr + 2);
  double demand = 0.0;
  for (std::size_t t = 0; t < nc; ++t) {
    std::int64_t d = std::max<std::int64_t>(0, deg[t] - cap);
    if (d > 0) net.add_arc(src, 1 + t, static_cast<double>(d));
    demand += static_cast<double>(d);
  }
  std::vector<std::size_t> arc(w.entries.size());
  for (std::size_t k = 0; k < w.entries.size(); ++k)
    arc[k] = net.add_arc(1 + w.entries[k].col, 1 + nc + w.entries[k].row, 1.0);
  for (std::size_t s = 0; s < nr; ++s) net.add_arc(1 + nc + s, sink, static_cast<double>(cap));
  double got = net.solve(src, sink);
  if (got + 0.5 < demand) return false;
  if (assignment) {
    assignment->assign(w.entries.size(), 2);
    for (std::size_t k = 0; k < w.entries.size(); ++k)
      if (net.flow(arc[k]) > 0.5) (*assignment)[k] = 1;
  }
  return true;
}

}  // namespace

const char* optimality_name(Optimality o) { return o == Optimality::Exact ? "exact" : "heuristic"; }

Optimality parse_optimality(const std::string& s) {
  if (s == "exact") return Optimality::Exact;
  if (s == "heuristic") return Optimality::Heuristic;
  fail(ErrorCode::InvalidInput, "unknown optimality flag '" + s + "'");
}

LineConstants partition_constants(const Window& w, const std::vector<std::uint8_t>& assignment) {
  if (assignment.size() != w.entries.size())
    fail(ErrorCode::InvalidInput, "assignment length differs from the entry count",
         {{"assignment", assignment.size()}, {"entries", w.entries.size()}});
  for (auto a : assignment)
    if (a != 1 && a != 2) fail(ErrorCode::InvalidInput, "assignment values must be 1 or 2");
  Loads l = loads_of(w, assignment);
  return {std::sqrt(max_of(l.row1)), std::sqrt(max_of(l.col2))};
}

std::int64_t partition_count(const Window& w, const std::vector<std::uint8_t>& assignment) {
  std::vector<std::int64_t> r(w.num_rows(), 0), c(w.num_cols(), 0);
  std::int64_t best = 0;
  for (std::size_t k = 0; k < w.entries.size(); ++k) {
    if (assignment[k] == 1)
      best = std::max(best, ++r[w.entries[k].row]);
    else
      best = std::max(best, ++c[w.entries[k].col]);
  }
  return best;
}

PartitionCertificate min_partition_01(const Window& w) {
  if (!w.is_01()) fail(ErrorCode::WrongVariant, "min_partition_01 needs a window with all weights equal to 1");
  std::vector<std::int64_t> rdeg(w.num_rows(), 0), cdeg(w.num_cols(), 0);
  for (const auto& e : w.entries) {
    ++rdeg[e.row];
    ++cdeg[e.col];
  }
  std::int64_t lo = 0, hi = 0;
  if (!w.entries.empty()) {
    lo = 1;
    hi = std::min(*std::max_element(rdeg.begin(), rdeg.end()), *std::max_element(cdeg.begin(), cdeg.end()));
  }
  while (lo < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (flow_feasible(w, mid, nullptr))
      hi = mid;
    else
      lo = mid + 1;
  }
  std::vector<std::uint8_t> a(w.entries.size(), 2);
  if (!w.entries.empty()) flow_feasible(w, lo, &a);
  PartitionCertificate c = finish(w, std::move(a), Optimality::Exact, "max-flow");
  c.count = lo;
  c.parameters = {{"search", "binary"}, {"range", {w.entries.empty() ? 0 : 1, hi}}};
  return c;
}

namespace {

struct BranchAndBound {
  const Window& w;
  std::vector<std::size_t> order;
  std::vector<double> m2;
  std::vector<double> row1, col2;
  std::vector<std::uint8_t> current;
  std::vector<std::uint8_t> fixed;  // 0 free, else forced side
  double bound = 0.0;
  bool inclusive = false;  // accept value <= bound instead of < bound
  std::vector<std::uint8_t> found;
  bool any = false;

  bool accept(double v) const { return inclusive ? v <= bound * (1 + kRelTie) : v < bound * (1 - kRelTie); }

  void run(std::size_t depth, double current_max) {
    if (!accept(current_max)) return;
    if (depth == order.size()) {
      found = current;
      any = true;
      if (!inclusive) bound = current_max;
      return;
    }
    std::size_t k = order[depth];
    const auto& e = w.entries[k];
    double a = row1[e.row] + m2[k];
    double b = col2[e.col] + m2[k];
    std::uint8_t first = a <= b ? 1 : 2;
    for (std::uint8_t side : {first, static_cast<std::uint8_t>(3 - first)}) {
      if (fixed[k] && fixed[k] != side) continue;
      double& load = side == 1 ? row1[e.row] : col2[e.col];
      load += m2[k];
      current[k] = side;
      run(depth + 1, std::max(current_max, load));
      load -= m2[k];
      if (inclusive && any) return;
    }
  }
};

}  // namespace

PartitionCertificate min_partition_weighted_exact(const Window& w, const WeightedOptions& opt) {
  if (w.entries.size() > opt.exact_entry_limit)
    fail(ErrorCode::LimitExceeded, "exact weighted partition is limited by entry count",
         {{"entries", w.entries.size()}, {"limit", opt.exact_entry_limit}});
  std::size_t n = w.entries.size();
  BranchAndBound bb{w, {}, {}, std::vector<double>(w.num_rows(), 0.0), std::vector<double>(w.num_cols(), 0.0),
                    std::vector<std::uint8_t>(n, 1), std::vector<std::uint8_t>(n, 0), 0.0, false, {}, false};
  bb.m2.resize(n);
  for (std::size_t k = 0; k < n; ++k) bb.m2[k] = std::norm(w.entries[k].weight);
  bb.order.resize(n);
  std::iota(bb.order.begin(), bb.order.end(), 0);
  std::stable_sort(bb.order.begin(), bb.order.end(), [&](std::size_t a, std::size_t b) { return bb.m2[a] > bb.m2[b]; });

  // Incumbent from the heuristic, then strict improvement.
  std::vector<std::uint8_t> best(n, 1);
  double best_val = 0.0;
  if (n > 0) {
    best = min_partition_weighted_heuristic(w).assignment;
    Loads l = loads_of(w, best);
    best_val = std::max(max_of(l.row1), max_of(l.col2));
    bb.bound = best_val;
    bb.run(0, 0.0);
    if (bb.any) {
      Loads l2 = loads_of(w, bb.found);
      best_val = std::max(max_of(l2.row1), max_of(l2.col2));
    }
    // Lexicographically smallest optimal assignment in entry order.
    bb.inclusive = true;
    bb.bound = best_val;
    for (std::size_t k = 0; k < n; ++k) {
      bb.fixed[k] = 1;
      bb.any = false;
      bb.run(0, 0.0);
      if (!bb.any) bb.fixed[k] = 2;
    }
    best = bb.fixed;
  }
  PartitionCertificate c = finish(w, std::move(best), Optimality::Exact, "branch-and-bound");
  c.parameters = {{"exact_entry_limit", opt.exact_entry_limit}};
  return c;
}

PartitionCertificate min_partition_weighted_heuristic(const Window& w) {
  std::size_t n = w.entries.size();
  std::vector<double> m2(n);
  for (std::size_t k = 0; k < n; ++k) m2[k] = std::norm(w.entries[k].weight);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m2[a] > m2[b]; });

  std::vector<double> row1(w.num_rows(), 0.0), col2(w.num_cols(), 0.0);
  std::vector<std::uint8_t> a(n, 1);
  double cur = 0.0;
  for (std::size_t k : order) {
    const auto& e = w.entries[k];
    double r = row1[e.row] + m2[k];
    double c = col2[e.col] + m2[k];
    double if1 = std::max(cur, r), if2 = std::max(cur, c);
    bool side1 = if1 < if2 || (nearly_equal(if1, if2) && r <= c);
    if (side1) {
      row1[e.row] = r;
      a[k] = 1;
    } else {
      col2[e.col] = c;
      a[k] = 2;
    }
    cur = std::max(cur, side1 ? r : c);
  }

  // Single-entry moves on (max load, number of lines at the max).
  std::multiset<double> all(row1.begin(), row1.end());
  all.insert(col2.begin(), col2.end());
  auto objective = [&]() {
    if (all.empty()) return std::pair<double, std::size_t>{0.0, 0};
    double mx = *all.rbegin();
    std::size_t cnt = static_cast<std::size_t>(std::distance(all.lower_bound(mx * (1 - kRelTie)), all.end()));
    return std::pair<double, std::size_t>{mx, cnt};
  };
  auto replace = [&](double old_v, double new_v) {
    all.erase(all.find(old_v));
    all.insert(new_v);
  };
  int passes = 0;
  bool improved = true;
  while (improved && passes < 1000) {
    improved = false;
    ++passes;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& e = w.entries[k];
      auto before = objective();
      double& from = a[k] == 1 ? row1[e.row] : col2[e.col];
      double& to = a[k] == 1 ? col2[e.col] : row1[e.row];
      double f0 = from, t0 = to;
      replace(f0, f0 - m2[k]);
      replace(t0, t0 + m2[k]);
      auto after = objective();
      bool better = after.first < before.first * (1 - kRelTie) ||
                    (nearly_equal(after.first, before.first) && after.second < before.second);
      if (better) {
        from = f0 - m2[k];
        to = t0 + m2[k];
        a[k] = static_cast<std::uint8_t>(3 - a[k]);
        improved = true;
      } else {
        replace(f0 - m2[k], f0);
        replace(t0 + m2[k], t0);
      }
    }
  }
  PartitionCertificate c = finish(w, std::move(a), Optimality::Heuristic, "greedy-local-search");
  c.parameters = {{"passes", passes}};
  return c;
}

PartitionCertificate min_partition_weighted(const Window& w, const WeightedOptions& opt) {
  if (w.entries.size() <= opt.exact_entry_limit) return min_partition_weighted_exact(w, opt);
  return min_partition_weighted_heuristic(w);
}

void Verification::check(bool ok, const std::string& what) {
  if (!ok) {
    pass = false;
    failures.push_back(what);
  }
}

Verification verify_certificate(const PartitionCertificate& cert, const Window& w, double tol) {
  std::string id = window_id(w);
  if (id != cert.window_id)
    fail(ErrorCode::DanglingReference, "certificate refers to a different window",
         {{"certificate_window", cert.window_id}, {"available_window", id}});
  Verification v;
  if (cert.assignment.size() != w.entries.size()) {
    v.check(false, "assignment length " + std::to_string(cert.assignment.size()) + " differs from entry count " +
                       std::to_string(w.entries.size()));
    return v;
  }
  bool values_ok = std::all_of(cert.assignment.begin(), cert.assignment.end(), [](auto a) { return a == 1 || a == 2; });
  v.check(values_ok, "assignment values must be 1 or 2");
  if (!values_ok) return v;
  LineConstants k = partition_constants(w, cert.assignment);
  double c = std::max(k.c1, k.c2);
  v.recomputed = {{"c1", k.c1}, {"c2", k.c2}, {"c", c}};
  auto close = [&](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
  v.check(close(cert.c1, k.c1), "C1 stored " + json(cert.c1).dump() + " recomputed " + json(k.c1).dump());
  v.check(close(cert.c2, k.c2), "C2 stored " + json(cert.c2).dump() + " recomputed " + json(k.c2).dump());
  v.check(close(cert.c, c), "C stored " + json(cert.c).dump() + " recomputed " + json(c).dump());
  if (cert.count) {
    std::int64_t cnt = partition_count(w, cert.assignment);
    v.recomputed["count"] = cnt;
    v.check(w.is_01(), "integer count given for a weighted window");
    v.check(cnt == *cert.count,
            "count stored " + std::to_string(*cert.count) + " recomputed " + std::to_string(cnt));
  }
  return v;
}

}  // namespace lacuna
