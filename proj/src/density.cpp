#include "lacuna/density.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <queue>

#include "lacuna/errors.hpp"
#include "lacuna/flow.hpp"
#include "lacuna/rng.hpp"
#include "lacuna/serialize.hpp"

namespace lacuna {
namespace {

using Adj = std::vector<std::vector<std::pair<std::uint32_t, double>>>;

// Window restricted to its nonempty rows and columns, in compact indices.
struct Bipartite {
  std::vector<std::size_t> row_ids, col_ids;
  Adj radj, cadj;
  std::size_t a() const { return row_ids.size(); }
  std::size_t b() const { return col_ids.size(); }
};

Bipartite compact(const Window& w) {
  Bipartite g;
  std::vector<std::ptrdiff_t> rmap(w.num_rows(), -1), cmap(w.num_cols(), -1);
  for (const auto& e : w.entries) {
    rmap[e.row] = 0;
    cmap[e.col] = 0;
  }
  for (std::size_t i = 0; i < w.num_rows(); ++i)
    if (rmap[i] == 0) {
      rmap[i] = static_cast<std::ptrdiff_t>(g.row_ids.size());
      g.row_ids.push_back(i);
    }
  for (std::size_t j = 0; j < w.num_cols(); ++j)
    if (cmap[j] == 0) {
      cmap[j] = static_cast<std::ptrdiff_t>(g.col_ids.size());
      g.col_ids.push_back(j);
    }
  g.radj.resize(g.a());
  g.cadj.resize(g.b());
  for (const auto& e : w.entries) {
    auto r = static_cast<std::uint32_t>(rmap[e.row]), c = static_cast<std::uint32_t>(cmap[e.col]);
    double m2 = std::norm(e.weight);
    g.radj[r].emplace_back(c, m2);
    g.cadj[c].emplace_back(r, m2);
  }
  return g;
}

struct Candidate {
  double ratio = 0.0;
  std::vector<std::size_t> rows, cols;  // original indices, sorted
};

bool lex_less(const Candidate& x, const Candidate& y) {
  if (x.rows != y.rows) return x.rows < y.rows;
  return x.cols < y.cols;
}

class Best {
 public:
  explicit Best(const Window& w) : w_(w) {}

  // Cheap screen before exact recomputation.
  bool worth(double approx) const { return !have_ || approx >= best_.ratio * (1 - 1e-9); }

  void offer(std::vector<std::size_t> rows, std::vector<std::size_t> cols) {
    if (rows.empty() || rows.size() != cols.size()) return;
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());
    Candidate c{witness_density(w_, rows, cols), std::move(rows), std::move(cols)};
    if (!have_) {
      best_ = std::move(c);
      have_ = true;
      return;
    }
    double tol = 1e-12 * std::max(1.0, best_.ratio);
    if (c.ratio > best_.ratio + tol || (std::abs(c.ratio - best_.ratio) <= tol && lex_less(c, best_)))
      best_ = std::move(c);
  }

  bool have() const { return have_; }
  const Candidate& get() const { return best_; }

 private:
  const Window& w_;
  Candidate best_;
  bool have_ = false;
};

// Top-n lines of one side by mass (ties: lower index), padded with the
// lowest-index zero-mass lines.
std::vector<std::uint32_t> top_n(const std::vector<double>& mass, const std::vector<std::uint32_t>& touched,
                                 std::size_t n, double* total) {
  std::vector<std::uint32_t> sel(touched);
  auto cmp = [&](std::uint32_t x, std::uint32_t y) { return mass[x] != mass[y] ? mass[x] > mass[y] : x < y; };
  if (sel.size() > n) {
    std::nth_element(sel.begin(), sel.begin() + static_cast<std::ptrdiff_t>(n), sel.end(), cmp);
    sel.resize(n);
  }
  double s = 0.0;
  for (auto x : sel) s += mass[x];
  if (total) *total = s;
  if (sel.size() < n) {
    std::vector<bool> in(mass.size(), false);
    for (auto x : sel) in[x] = true;
    for (std::uint32_t x = 0; x < mass.size() && sel.size() < n; ++x)
      if (!in[x]) sel.push_back(x);
  }
  return sel;
}

std::vector<std::size_t> originals(const std::vector<std::uint32_t>& ids, const std::vector<std::size_t>& map) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (auto x : ids) out.push_back(map[x]);
  return out;
}

// Mass per line of the other side from a chosen set.
void project(const Adj& adj, const std::vector<std::uint32_t>& chosen, std::vector<double>& mass,
             std::vector<std::uint32_t>& touched) {
  for (auto t : touched) mass[t] = 0.0;
  touched.clear();
  for (auto x : chosen)
    for (auto [y, m] : adj[x]) {
      if (mass[y] == 0.0) touched.push_back(y);
      mass[y] += m;
    }
}

// Alternating best responses from a row set of size n.
void alternate(const Bipartite& g, std::vector<std::uint32_t> rows, Best& best) {
  std::size_t n = rows.size();
  if (n == 0 || n > std::min(g.a(), g.b())) return;
  std::vector<double> cmass(g.b(), 0.0), rmass(g.a(), 0.0);
  std::vector<std::uint32_t> ct, rt;
  double last = -1.0;
  for (int it = 0; it < 100; ++it) {
    project(g.radj, rows, cmass, ct);
    double total = 0.0;
    std::vector<std::uint32_t> cols = top_n(cmass, ct, n, &total);
    project(g.cadj, cols, rmass, rt);
    std::vector<std::uint32_t> next = top_n(rmass, rt, n, &total);
    double ratio = total / static_cast<double>(n);
    if (ratio <= last * (1 + 1e-13)) break;
    last = ratio;
    rows = next;
    if (best.worth(ratio)) best.offer(originals(rows, g.row_ids), originals(cols, g.col_ids));
  }
}

std::vector<std::size_t> size_grid(std::size_t max_n) {
  std::vector<std::size_t> out;
  if (max_n <= 256) {
    for (std::size_t n = 1; n <= max_n; ++n) out.push_back(n);
    return out;
  }
  for (std::size_t n = 1; n <= 64; ++n) out.push_back(n);
  double x = 64.0;
  while (true) {
    x *= 1.05;
    auto n = static_cast<std::size_t>(x);
    if (n >= max_n) break;
    if (n > out.back()) out.push_back(n);
  }
  out.push_back(max_n);
  return out;
}

// Densest bipartite subgraph by mass / ((|R|+|C|)/2), via parametric min cut.
// Returns the upper bound on that ratio and feeds balanced candidates.
double goldberg(const Bipartite& g, Best& best) {
  std::size_t ne = 0;
  double total = 0.0, maxw = 0.0, maxrow = 0.0, maxcol = 0.0;
  for (const auto& r : g.radj) {
    double s = 0.0;
    for (auto [c, m] : r) {
      s += m;
      maxw = std::max(maxw, m);
      ++ne;
    }
    total += s;
    maxrow = std::max(maxrow, s);
  }
  for (const auto& c : g.cadj) {
    double s = 0.0;
    for (auto [r, m] : c) s += m;
    maxcol = std::max(maxcol, s);
  }
  double lo = maxw, hi = 2.0 * std::min(maxrow, maxcol);
  std::vector<std::uint32_t> best_r, best_c;
  auto consider = [&](std::vector<std::uint32_t> rs, std::vector<std::uint32_t> cs) {
    // Balance by trimming the larger side or growing the smaller one.
    std::vector<double> cm(g.b(), 0.0), rm(g.a(), 0.0);
    std::vector<std::uint32_t> ct, rt;
    if (rs.size() > cs.size()) {
      project(g.cadj, cs, rm, rt);
      std::vector<std::uint32_t> keep = top_n(rm, rt, cs.size(), nullptr);
      best.offer(originals(keep, g.row_ids), originals(cs, g.col_ids));
      project(g.radj, rs, cm, ct);
      std::vector<std::uint32_t> grow = top_n(cm, ct, rs.size(), nullptr);
      best.offer(originals(rs, g.row_ids), originals(grow, g.col_ids));
      alternate(g, keep, best);
    } else if (cs.size() > rs.size()) {
      project(g.radj, rs, cm, ct);
      std::vector<std::uint32_t> keep = top_n(cm, ct, rs.size(), nullptr);
      best.offer(originals(rs, g.row_ids), originals(keep, g.col_ids));
      project(g.cadj, cs, rm, rt);
      std::vector<std::uint32_t> grow = top_n(rm, rt, cs.size(), nullptr);
      best.offer(originals(grow, g.row_ids), originals(cs, g.col_ids));
      alternate(g, grow, best);
    } else {
      best.offer(originals(rs, g.row_ids), originals(cs, g.col_ids));
      alternate(g, rs, best);
    }
  };
  for (int it = 0; it < 100 && hi - lo > 1e-11 * hi; ++it) {
    double lam = 0.5 * (lo + hi);
    std::size_t src = 0, sink = 1 + ne + g.a() + g.b();
    MaxFlow net(sink + 1);
    std::size_t e = 0;
    for (std::uint32_t r = 0; r < g.a(); ++r)
      for (auto [c, m] : g.radj[r]) {
        std::size_t node = 1 + e++;
        net.add_arc(src, node, m);
        net.add_arc(node, 1 + ne + r, std::numeric_limits<double>::infinity());
        net.add_arc(node, 1 + ne + g.a() + c, std::numeric_limits<double>::infinity());
      }
    for (std::size_t r = 0; r < g.a(); ++r) net.add_arc(1 + ne + r, sink, lam / 2);
    for (std::size_t c = 0; c < g.b(); ++c) net.add_arc(1 + ne + g.a() + c, sink, lam / 2);
    double cut = net.solve(src, sink);
    if (total - cut > 1e-12 * total) {
      std::vector<bool> side = net.source_side(src);
      best_r.clear();
      best_c.clear();
      for (std::uint32_t r = 0; r < g.a(); ++r)
        if (side[1 + ne + r]) best_r.push_back(r);
      for (std::uint32_t c = 0; c < g.b(); ++c)
        if (side[1 + ne + g.a() + c]) best_c.push_back(c);
      lo = lam;
    } else {
      hi = lam;
    }
  }
  if (!best_r.empty() && !best_c.empty()) consider(best_r, best_c);
  return hi * (1 + 1e-9);
}

// Removes the lightest line of the larger side, recording balanced states.
void peel(const Bipartite& g, Best& best) {
  std::vector<double> rm(g.a(), 0.0), cm(g.b(), 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < g.a(); ++r)
    for (auto [c, m] : g.radj[r]) {
      rm[r] += m;
      cm[c] += m;
      total += m;
    }
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> rq, cq;
  for (std::uint32_t r = 0; r < g.a(); ++r) rq.emplace(rm[r], r);
  for (std::uint32_t c = 0; c < g.b(); ++c) cq.emplace(cm[c], c);
  std::vector<bool> ralive(g.a(), true), calive(g.b(), true);
  std::size_t nr = g.a(), nc = g.b();
  std::vector<std::pair<bool, std::uint32_t>> removed;
  double best_ratio = -1.0;
  std::size_t best_step = 0;
  auto clean = [](auto& q, const std::vector<bool>& alive, const std::vector<double>& mass) {
    while (!q.empty() && (!alive[q.top().second] || q.top().first != mass[q.top().second])) q.pop();
  };
  while (nr > 0 && nc > 0) {
    if (nr == nc) {
      double ratio = total / static_cast<double>(nr);
      if (ratio > best_ratio * (1 + 1e-13)) {
        best_ratio = ratio;
        best_step = removed.size();
      }
    }
    clean(rq, ralive, rm);
    clean(cq, calive, cm);
    bool take_row = nr > nc || (nr == nc && rq.top().first <= cq.top().first);
    if (take_row) {
      std::uint32_t r = rq.top().second;
      rq.pop();
      ralive[r] = false;
      --nr;
      total -= rm[r];
      for (auto [c, m] : g.radj[r])
        if (calive[c]) {
          cm[c] -= m;
          cq.emplace(cm[c], c);
        }
      removed.emplace_back(true, r);
    } else {
      std::uint32_t c = cq.top().second;
      cq.pop();
      calive[c] = false;
      --nc;
      total -= cm[c];
      for (auto [r, m] : g.cadj[c])
        if (ralive[r]) {
          rm[r] -= m;
          rq.emplace(rm[r], r);
        }
      removed.emplace_back(false, c);
    }
  }
  if (best_ratio < 0) return;
  std::vector<bool> rin(g.a(), true), cin(g.b(), true);
  for (std::size_t k = 0; k < best_step; ++k) (removed[k].first ? rin : cin)[removed[k].second] = false;
  std::vector<std::uint32_t> rs, cs;
  for (std::uint32_t r = 0; r < g.a(); ++r)
    if (rin[r]) rs.push_back(r);
  for (std::uint32_t c = 0; c < g.b(); ++c)
    if (cin[c]) cs.push_back(c);
  best.offer(originals(rs, g.row_ids), originals(cs, g.col_ids));
  alternate(g, rs, best);
}

DensityCertificate to_certificate(const Window& w, const Best& best, DensityMode mode, std::string method) {
  DensityCertificate c;
  c.window_id = window_id(w);
  c.mode = mode;
  c.method = std::move(method);
  if (best.have()) {
    c.rows = best.get().rows;
    c.cols = best.get().cols;
    c.n_star = c.rows.size();
    c.d = witness_density(w, c.rows, c.cols);
  }
  return c;
}

}  // namespace

const char* density_mode_name(DensityMode m) { return m == DensityMode::Exact ? "exact" : "heuristic"; }

double witness_density(const Window& w, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  if (rows.size() != cols.size())
    fail(ErrorCode::InvalidInput, "density witness sides differ in size", {{"rows", rows.size()}, {"cols", cols.size()}});
  if (rows.empty()) return 0.0;
  std::vector<bool> rin(w.num_rows(), false), cin(w.num_cols(), false);
  for (auto r : rows) rin.at(r) = true;
  for (auto c : cols) cin.at(c) = true;
  double s = 0.0;
  for (const auto& e : w.entries)
    if (rin[e.row] && cin[e.col]) s += std::norm(e.weight);
  return s / static_cast<double>(rows.size());
}

DensityCertificate exact_density(const Window& w, std::size_t side_limit) {
  Bipartite g = compact(w);
  Best best(w);
  bool by_rows = g.a() <= g.b();
  std::size_t a = std::min(g.a(), g.b());
  if (a > side_limit)
    fail(ErrorCode::LimitExceeded, "exact density search exceeds the size guard; use heuristic_density",
         {{"nonempty_rows", g.a()}, {"nonempty_cols", g.b()}, {"side_limit", side_limit}});
  if (a > 30) fail(ErrorCode::LimitExceeded, "exact density search is limited to 30 lines per side");
  const Adj& adj = by_rows ? g.radj : g.cadj;
  std::size_t other = by_rows ? g.b() : g.a();
  std::vector<double> mass(other, 0.0);
  std::vector<std::uint32_t> touched_count(other, 0), touched;
  std::vector<std::ptrdiff_t> pos(other, -1);
  std::uint64_t mask = 0;
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << a); ++i) {
    int bit = std::countr_zero(i);
    std::uint64_t flag = std::uint64_t{1} << bit;
    bool adding = !(mask & flag);
    mask ^= flag;
    for (auto [y, m] : adj[static_cast<std::size_t>(bit)]) {
      if (adding) {
        mass[y] += m;
        if (touched_count[y]++ == 0) {
          pos[y] = static_cast<std::ptrdiff_t>(touched.size());
          touched.push_back(y);
        }
      } else {
        mass[y] -= m;
        if (--touched_count[y] == 0) {
          mass[y] = 0.0;
          std::uint32_t last = touched.back();
          touched[static_cast<std::size_t>(pos[y])] = last;
          pos[last] = pos[y];
          touched.pop_back();
          pos[y] = -1;
        }
      }
    }
    auto n = static_cast<std::size_t>(std::popcount(mask));
    double total = 0.0;
    std::vector<std::uint32_t> sel = top_n(mass, touched, n, &total);
    if (!best.worth(total / static_cast<double>(n))) continue;
    std::vector<std::uint32_t> chosen;
    for (std::uint32_t x = 0; x < a; ++x)
      if (mask & (std::uint64_t{1} << x)) chosen.push_back(x);
    if (by_rows)
      best.offer(originals(chosen, g.row_ids), originals(sel, g.col_ids));
    else
      best.offer(originals(sel, g.row_ids), originals(chosen, g.col_ids));
  }
  DensityCertificate c = to_certificate(w, best, DensityMode::Exact, "subset-enumeration");
  return c;
}

DensityCertificate heuristic_density(const Window& w, std::size_t restarts, std::uint64_t seed) {
  Bipartite g = compact(w);
  Best best(w);
  std::optional<double> upper;
  std::size_t max_n = std::min(g.a(), g.b());
  if (max_n > 0) {
    upper = goldberg(g, best);
    peel(g, best);
    std::vector<double> rm(g.a(), 0.0);
    for (std::size_t r = 0; r < g.a(); ++r)
      for (auto [c, m] : g.radj[r]) rm[r] += m;
    std::vector<std::uint32_t> order(g.a());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return rm[x] > rm[y]; });
    for (std::size_t n : size_grid(max_n))
      alternate(g, std::vector<std::uint32_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n)), best);
    for (std::size_t k = 0; k < restarts; ++k) {
      Rng rng(derive_seed(seed, k));
      std::size_t n = 1 + static_cast<std::size_t>(rng.below(max_n));
      std::vector<std::uint32_t> pool(g.a());
      std::iota(pool.begin(), pool.end(), 0);
      for (std::size_t i = 0; i < n; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
      pool.resize(n);
      alternate(g, pool, best);
    }
  }
  DensityCertificate c = to_certificate(w, best, DensityMode::Heuristic, "min-cut+peeling+alternation");
  c.upper_bound = upper;
  c.restarts = restarts;
  c.seed = seed;
  return c;
}

DensityCertificate density(const Window& w, const DensityOptions& opt) {
  Bipartite g = compact(w);
  if (std::min(g.a(), g.b()) <= opt.exact_side_limit) return exact_density(w, opt.exact_side_limit);
  return heuristic_density(w, opt.restarts, opt.seed);
}

Verification verify_certificate(const DensityCertificate& cert, const Window& w, double tol) {
  std::string id = window_id(w);
  if (id != cert.window_id)
    fail(ErrorCode::DanglingReference, "certificate refers to a different window",
         {{"certificate_window", cert.window_id}, {"available_window", id}});
  Verification v;
  bool sizes = cert.rows.size() == cert.n_star && cert.cols.size() == cert.n_star;
  v.check(sizes, "witness sizes differ from N*");
  auto in_range = [](const std::vector<std::size_t>& xs, std::size_t n) {
    std::vector<std::size_t> s(xs);
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) == s.end() && (s.empty() || s.back() < n);
  };
  bool ok = in_range(cert.rows, w.num_rows()) && in_range(cert.cols, w.num_cols());
  v.check(ok, "witness indices repeat or fall outside the window");
  if (!sizes || !ok) return v;
  double d = witness_density(w, cert.rows, cert.cols);
  v.recomputed = {{"d", d}, {"n_star", cert.n_star}};
  v.check(std::abs(d - cert.d) <= tol * std::max(1.0, d),
          "D stored " + json(cert.d).dump() + " recomputed " + json(d).dump());
  if (cert.upper_bound) v.check(d <= *cert.upper_bound * (1 + 1e-9), "D exceeds the stored upper bound");
  return v;
}

std::vector<GrowthPoint> density_growth_scan(const FiniteSet& lambda, const Schedule& schedule,
                                             const DensityOptions& opt, const Limits& limits) {
  std::vector<GrowthPoint> out;
  for (std::size_t k = 0; k < schedule.steps(); ++k) {
    auto [e, f] = schedule.window(lambda.group(), k, limits);
    Window w = relation_window(lambda, e, f, limits);
    out.push_back({schedule.parameter(k), e.size(), density(w, opt)});
  }
  return out;
}

}  // namespace lacuna
