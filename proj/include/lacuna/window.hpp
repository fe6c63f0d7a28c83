#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lacuna/group.hpp"

namespace lacuna {

using cplx = std::complex<double>;

enum class ProductTag { Product, ProductInvRight, InvLeftProduct, Custom };

// Explicit map E×F -> G; values[i][j] = p(E[i], F[j]).
struct CustomTable {
  GroupSpec group;
  std::vector<std::vector<Element>> values;
  std::size_t fiber_cap = 1;
};

struct ProductKind {
  ProductTag tag = ProductTag::Product;
  std::shared_ptr<const CustomTable> table;

  static ProductKind product() { return {ProductTag::Product, nullptr}; }
  static ProductKind inv_right() { return {ProductTag::ProductInvRight, nullptr}; }
  static ProductKind inv_left() { return {ProductTag::InvLeftProduct, nullptr}; }
  static ProductKind custom(CustomTable table);
  static ProductKind parse(const std::string& name);

  std::string name() const;  // "st", "st^-1", "s^-1t", "custom"
};

// A finitely supported function on G.
struct WeightFunction {
  GroupSpec group;
  std::vector<std::pair<Element, cplx>> values;
  std::string description;

  static WeightFunction indicator(const FiniteSet& set, std::string description);
  WeightFunction scaled(cplx factor) const;
};

struct WindowEntry {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  cplx weight;
};

struct Provenance {
  std::string product;
  std::string phi;
};

struct Window {
  FiniteSet rows;
  FiniteSet cols;
  std::vector<WindowEntry> entries;  // nonzero, sorted by (row, col)
  Provenance provenance;

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_cols() const { return cols.size(); }
  bool is_01() const;
  Eigen::MatrixXcd dense() const;
};

// Validates bounds and nonzero weights, sorts entries, rejects duplicates.
Window make_window(FiniteSet rows, FiniteSet cols, std::vector<WindowEntry> entries, Provenance provenance);

// Rows and columns indexed 0..S-1 and 0..T-1 in Z.
Window window_from_dense(const Eigen::MatrixXcd& m, std::string description = "dense matrix");

Window build_window(const WeightFunction& phi, const ProductKind& p, const FiniteSet& rows,
                    const FiniteSet& cols, const Limits& limits = {});

Window relation_window(const FiniteSet& lambda, const FiniteSet& rows, const FiniteSet& cols,
                       const Limits& limits = {});

struct FiberBounds {
  std::size_t row_direction = 0;  // max_{s,x} |{t : p(s,t) = x}|
  std::size_t col_direction = 0;  // max_{t,x} |{s : p(s,t) = x}|
};

FiberBounds fiber_bound_check(const ProductKind& p, const FiniteSet& rows, const FiniteSet& cols,
                              const Limits& limits = {});

// Window restricted to the given row and column indices (kept in the given order).
Window restrict_window(const Window& w, const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& cols);

}  // namespace lacuna
