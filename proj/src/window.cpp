#include "lacuna/window.hpp"

#include <algorithm>
#include <unordered_map>

#include "lacuna/errors.hpp"

namespace lacuna {
namespace {

GroupSpec arithmetic_group(const GroupSpec& a, const GroupSpec& b) {
  if (!compatible(a, b))
    fail(ErrorCode::InvalidInput, "incompatible groups " + a.name() + " and " + b.name());
  return a.is_numeric() ? GroupSpec::integers() : a;
}

Element apply(const GroupSpec& g, ProductTag tag, const Element& s, const Element& t) {
  switch (tag) {
    case ProductTag::Product: return mul(g, s, t);
    case ProductTag::ProductInvRight: return mul(g, s, inv(g, t));
    case ProductTag::InvLeftProduct: return mul(g, inv(g, s), t);
    case ProductTag::Custom: break;
  }
  fail(ErrorCode::InvalidInput, "custom products need a table");
}

// The unique t with p(s, t) = x.
Element solve_col(const GroupSpec& g, ProductTag tag, const Element& s, const Element& x) {
  switch (tag) {
    case ProductTag::Product: return mul(g, inv(g, s), x);
    case ProductTag::ProductInvRight: return mul(g, inv(g, x), s);
    case ProductTag::InvLeftProduct: return mul(g, s, x);
    case ProductTag::Custom: break;
  }
  fail(ErrorCode::InvalidInput, "custom products need a table");
}

const CustomTable& checked_table(const ProductKind& p, const FiniteSet& rows, const FiniteSet& cols) {
  if (!p.table) fail(ErrorCode::InvalidInput, "custom product without a table");
  const CustomTable& t = *p.table;
  if (t.values.size() != rows.size())
    fail(ErrorCode::InvalidInput, "custom table incomplete",
         {{"expected_rows", rows.size()}, {"table_rows", t.values.size()}});
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    if (t.values[i].size() != cols.size())
      fail(ErrorCode::InvalidInput, "custom table incomplete",
           {{"row", i}, {"expected_cols", cols.size()}, {"table_cols", t.values[i].size()}});
    for (const Element& x : t.values[i])
      if (!is_valid(t.group, x)) fail(ErrorCode::InvalidInput, "custom table value outside its group", {{"row", i}});
  }
  return t;
}

struct Fiber {
  std::size_t size = 0;
  std::size_t line = 0;
  Element value;
};

// Largest fibers of a table by rows and by columns.
std::pair<Fiber, Fiber> table_fibers(const CustomTable& t, std::size_t nrows, std::size_t ncols) {
  Fiber best_row, best_col;
  for (std::size_t i = 0; i < nrows; ++i) {
    std::unordered_map<Element, std::size_t, ElementHash> count;
    for (std::size_t j = 0; j < ncols; ++j) {
      std::size_t c = ++count[t.values[i][j]];
      if (c > best_row.size) best_row = {c, i, t.values[i][j]};
    }
  }
  for (std::size_t j = 0; j < ncols; ++j) {
    std::unordered_map<Element, std::size_t, ElementHash> count;
    for (std::size_t i = 0; i < nrows; ++i) {
      std::size_t c = ++count[t.values[i][j]];
      if (c > best_col.size) best_col = {c, j, t.values[i][j]};
    }
  }
  return {best_row, best_col};
}

}  // namespace

ProductKind ProductKind::custom(CustomTable table) {
  return {ProductTag::Custom, std::make_shared<const CustomTable>(std::move(table))};
}

ProductKind ProductKind::parse(const std::string& name) {
  if (name == "st") return product();
  if (name == "st^-1") return inv_right();
  if (name == "s^-1t") return inv_left();
  fail(ErrorCode::InvalidInput, "unknown product '" + name + "'", {{"expected", "st, st^-1 or s^-1t"}});
}

std::string ProductKind::name() const {
  switch (tag) {
    case ProductTag::Product: return "st";
    case ProductTag::ProductInvRight: return "st^-1";
    case ProductTag::InvLeftProduct: return "s^-1t";
    case ProductTag::Custom: return "custom";
  }
  return "?";
}

WeightFunction WeightFunction::indicator(const FiniteSet& set, std::string description) {
  WeightFunction f{set.group(), {}, std::move(description)};
  for (const Element& e : set.elements()) f.values.emplace_back(e, cplx(1.0, 0.0));
  return f;
}

WeightFunction WeightFunction::scaled(cplx factor) const {
  WeightFunction f = *this;
  for (auto& v : f.values) v.second *= factor;
  return f;
}

bool Window::is_01() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const WindowEntry& e) { return e.weight == cplx(1.0, 0.0); });
}

Eigen::MatrixXcd Window::dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(cols.size()));
  for (const auto& e : entries) m(e.row, e.col) = e.weight;
  return m;
}

Window make_window(FiniteSet rows, FiniteSet cols, std::vector<WindowEntry> entries, Provenance provenance) {
  for (const auto& e : entries) {
    if (e.row >= rows.size() || e.col >= cols.size())
      fail(ErrorCode::InvalidInput, "window entry index out of bounds", {{"row", e.row}, {"col", e.col}});
    if (e.weight == cplx(0.0, 0.0))
      fail(ErrorCode::InvalidInput, "window entries must be nonzero", {{"row", e.row}, {"col", e.col}});
    if (!std::isfinite(e.weight.real()) || !std::isfinite(e.weight.imag()))
      fail(ErrorCode::InvalidInput, "window weight is not finite", {{"row", e.row}, {"col", e.col}});
  }
  std::sort(entries.begin(), entries.end(), [](const WindowEntry& a, const WindowEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t k = 1; k < entries.size(); ++k)
    if (entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col)
      fail(ErrorCode::InvalidInput, "duplicate window entry", {{"row", entries[k].row}, {"col", entries[k].col}});
  return Window{std::move(rows), std::move(cols), std::move(entries), std::move(provenance)};
}

Window window_from_dense(const Eigen::MatrixXcd& m, std::string description) {
  GroupSpec z = GroupSpec::integers();
  Limits big{std::size_t(1) << 40, ~std::uint64_t{0}};
  std::vector<WindowEntry> entries;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != cplx(0.0, 0.0))
        entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), m(i, j)});
  return make_window(interval(z, 0, m.rows() - 1, big), interval(z, 0, m.cols() - 1, big), std::move(entries),
                     {"dense", std::move(description)});
}

Window build_window(const WeightFunction& phi, const ProductKind& p, const FiniteSet& rows,
                    const FiniteSet& cols, const Limits& limits) {
  std::vector<WindowEntry> entries;
  if (p.tag == ProductTag::Custom) {
    const CustomTable& t = checked_table(p, rows, cols);
    auto [rf, cf] = table_fibers(t, rows.size(), cols.size());
    if (rf.size > t.fiber_cap || cf.size > t.fiber_cap) {
      bool by_row = rf.size >= cf.size;
      const Fiber& f = by_row ? rf : cf;
      fail(ErrorCode::InvalidInput, "fiber bound violated",
           {{"direction", by_row ? "row" : "column"},
            {"line", f.line},
            {"value", format_element(t.group, f.value)},
            {"fiber_size", f.size},
            {"cap", t.fiber_cap}});
    }
    if (!compatible(t.group, phi.group)) fail(ErrorCode::InvalidInput, "table and weight groups differ");
    std::unordered_map<Element, cplx, ElementHash> lookup;
    for (const auto& [x, w] : phi.values)
      if (!lookup.emplace(x, w).second) fail(ErrorCode::InvalidInput, "weight function lists an element twice");
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) {
        auto it = lookup.find(t.values[i][j]);
        if (it != lookup.end() && it->second != cplx(0.0, 0.0))
          entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), it->second});
      }
  } else {
    GroupSpec g = arithmetic_group(rows.group(), cols.group());
    arithmetic_group(g, phi.group);
    std::unordered_map<Element, bool, ElementHash> seen;
    for (const auto& [x, w] : phi.values)
      if (!seen.emplace(x, true).second) fail(ErrorCode::InvalidInput, "weight function lists an element twice");
    if (static_cast<std::uint64_t>(rows.size()) * phi.values.size() > limits.max_tuples)
      fail(ErrorCode::LimitExceeded, "window construction exceeds the tuple cap",
           {{"rows", rows.size()}, {"support", phi.values.size()}, {"cap", limits.max_tuples}});
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (const auto& [x, w] : phi.values) {
        if (w == cplx(0.0, 0.0)) continue;
        std::ptrdiff_t j = cols.find(solve_col(g, p.tag, rows[i], x));
        if (j >= 0) entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w});
      }
  }
  return make_window(rows, cols, std::move(entries), {p.name(), phi.description});
}

Window relation_window(const FiniteSet& lambda, const FiniteSet& rows, const FiniteSet& cols,
                       const Limits& limits) {
  return build_window(WeightFunction::indicator(lambda, "indicator"), ProductKind::product(), rows, cols,
                      limits);
}

FiberBounds fiber_bound_check(const ProductKind& p, const FiniteSet& rows, const FiniteSet& cols,
                              const Limits& limits) {
  if (p.tag == ProductTag::Custom) {
    const CustomTable& t = checked_table(p, rows, cols);
    auto [rf, cf] = table_fibers(t, rows.size(), cols.size());
    return {rf.size, cf.size};
  }
  if (static_cast<std::uint64_t>(rows.size()) * cols.size() > limits.max_tuples)
    fail(ErrorCode::LimitExceeded, "fiber scan exceeds the tuple cap", {{"cap", limits.max_tuples}});
  GroupSpec g = arithmetic_group(rows.group(), cols.group());
  CustomTable t{g, {}, 0};
  t.values.assign(rows.size(), std::vector<Element>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) t.values[i][j] = apply(g, p.tag, rows[i], cols[j]);
  auto [rf, cf] = table_fibers(t, rows.size(), cols.size());
  return {rf.size, cf.size};
}

Window restrict_window(const Window& w, const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& cols) {
  std::vector<std::ptrdiff_t> rmap(w.num_rows(), -1), cmap(w.num_cols(), -1);
  std::vector<Element> re, ce;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rmap.at(rows[k]) = static_cast<std::ptrdiff_t>(k);
    re.push_back(w.rows[rows[k]]);
  }
  for (std::size_t k = 0; k < cols.size(); ++k) {
    cmap.at(cols[k]) = static_cast<std::ptrdiff_t>(k);
    ce.push_back(w.cols[cols[k]]);
  }
  std::vector<WindowEntry> entries;
  for (const auto& e : w.entries)
    if (rmap[e.row] >= 0 && cmap[e.col] >= 0)
      entries.push_back({static_cast<std::uint32_t>(rmap[e.row]), static_cast<std::uint32_t>(cmap[e.col]), e.weight});
  return make_window(FiniteSet(w.rows.group(), std::move(re)), FiniteSet(w.cols.group(), std::move(ce)),
                     std::move(entries), w.provenance);
}

}  // namespace lacuna
