#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "lacuna/group.hpp"
#include "lacuna/json_io.hpp"

namespace lacuna {

using SparseOp = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;

// Finitely supported map G -> d x d complex blocks.
struct CoefficientMap {
  GroupSpec group;
  Eigen::Index dim = 1;
  std::vector<std::pair<Element, Eigen::MatrixXcd>> terms;

  static CoefficientMap scalar(const FiniteSet& support, std::complex<double> value);
  static CoefficientMap blocks(const FiniteSet& support, std::vector<Eigen::MatrixXcd> values);
  std::size_t max_length() const;
};

struct TruncatedOperator {
  GroupSpec group;
  int radius = 0;
  FiniteSet basis;
  Eigen::Index dim = 1;
  SparseOp matrix;
};

// Compression of sum_x lambda(x) (x) f(x) to l2(ball(R)) (x) C^d. For Z the
// ball is [-R, R]; N is not a group and is rejected.
TruncatedOperator build_operator(const CoefficientMap& f, int radius, const Limits& limits = {});

struct NormSettings {
  double tolerance = 1e-8;
  int max_iterations = 100000;
  std::uint64_t seed = 0;
};

struct NormReport {
  double norm = 0;
  int iterations = 0;
  double residual = 0;  // ||T*T v - rho v|| at the returned iterate
};

NormReport op_norm(const SparseOp& t, const NormSettings& settings = {});
inline NormReport op_norm(const TruncatedOperator& t, const NormSettings& settings = {}) {
  return op_norm(t.matrix, settings);
}

// Exact reduction of sum_{x in L} lambda(x) on ball(R) when L is a set of
// letters: the span of class-sequence indicators reduces the operator.
SparseOp letter_orbit_operator(const GroupSpec& g, const FiniteSet& letters, int radius, const Limits& limits = {});

struct RatioSettings {
  NormSettings norm;
  bool allow_orbit = true;
  double tolerance = 1e-6;
  Limits limits;
};

struct LSetRatio {
  double ratio = 0;
  double truncated_norm = 0;
  double rhs = 0;
  int radius = 0;
  std::size_t basis_size = 0;
  std::string method;
  bool supported = false;  // support of a inside the truncation
  NormReport norm;
};

// max(||(sum a*a)^{1/2}||, ||(sum a a*)^{1/2}||)
double column_row_bound(const CoefficientMap& a);

// Truncated norm of sum lambda(x) (x) a(x) over the column/row bound. Sets in
// Z or N use the Hankel window (s, t) -> a(s + t) on {0..R}^2.
LSetRatio lset_ratio(const CoefficientMap& a, int radius, const RatioSettings& settings = {});

json to_json(const LSetRatio& r);

}  // namespace lacuna
