#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lacuna/partition.hpp"
#include "lacuna/sdp.hpp"
#include "lacuna/window.hpp"

namespace lacuna {

struct Gamma2Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double psd_min_eig = 0.0;
  double diag_slack = 0.0;
  double reconstruction = 0.0;  // max |Phi - <x, y>|
};

struct Gamma2Certificate {
  std::string matrix_id;
  Eigen::MatrixXcd matrix;
  double value = 0.0;
  Eigen::MatrixXcd x;  // row s is x(s)
  Eigen::MatrixXcd y;  // row t is y(t); Phi(s,t) = sum_k x_k(s) conj(y_k(t))
  double max_row_norm = 0.0;
  double max_col_norm = 0.0;
  Gamma2Residuals residuals;
  double lower_bound = 0.0;  // Schur-action oracle
  double gap = 0.0;          // value - lower_bound
  double dual_bound = 0.0;   // SDP dual objective
  int iterations = 0;
  std::size_t components = 0;
  SdpSettings settings;
};

Gamma2Certificate gamma2(const Eigen::MatrixXcd& phi, const SdpSettings& settings = {});

struct LowRankResult {
  bool fit = false;
  double value = std::numeric_limits<double>::infinity();
  double lower = 0.0;  // best trace-norm bound seen during rebalancing
  Eigen::MatrixXcd x, y;
  double reconstruction = 0.0;
  int rank = 0;
  int iterations = 0;
};

struct LowRankOptions {
  std::optional<int> rank;  // default min(S, T)
  int restarts = 4;
  std::uint64_t seed = 0;
  int max_iterations = 3000;
};

// Rebalanced SVD factorizations Phi = X Y* minimizing max row norm of X
// times max row norm of Y.
LowRankResult lowrank_oracle(const Eigen::MatrixXcd& phi, const LowRankOptions& opt = {});

struct SchurLowerResult {
  double value = 0.0;
  Eigen::MatrixXcd a;  // contraction with ||Phi o A|| / ||A|| = value
  int iterations = 0;
};

SchurLowerResult schur_action_lower(const Eigen::MatrixXcd& phi, int restarts = 8, std::uint64_t seed = 0,
                                    int iterations = 200);

enum class SignKind { Signs, Phases };
const char* sign_kind_name(SignKind k);
SignKind parse_sign_kind(const std::string& s);

// Matrices psi_k of a common shape, stored sparsely.
struct MatrixFamily {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<std::vector<WindowEntry>> members;
  std::string grouping;

  static MatrixFamily entrywise(const Window& w);
  // One member per value p(s,t) of the window's product map.
  static MatrixFamily by_group_element(const Window& w);
  static MatrixFamily single(const Eigen::MatrixXcd& m);

  Eigen::MatrixXcd combine(const std::vector<cplx>& z) const;
};

struct SignAverage {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::vector<std::optional<double>> values;
  SignKind kind = SignKind::Signs;
  std::uint64_t seed = 0;
  std::string grouping;
};

SignAverage sign_average_gamma2(const MatrixFamily& family, std::size_t trials, std::uint64_t seed,
                                SignKind kind = SignKind::Signs, const SdpSettings& settings = {},
                                unsigned threads = 1);

Verification verify_certificate(const Gamma2Certificate& cert, double tol = 1e-6);

}  // namespace lacuna
