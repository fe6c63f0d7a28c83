#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace lacuna {

struct SdpSettings {
  double tolerance = 1e-7;   // relative primal, dual and gap residuals
  int max_iterations = 150;
  double step_fraction = 0.95;
  Eigen::Index max_dim = 40;  // cap on rows and on columns
  bool decompose = true;      // solve connected support components separately
  int lower_bound_restarts = 4;
  std::uint64_t lower_bound_seed = 0;
};

struct SdpResiduals {
  double primal = 0.0;  // relative
  double dual = 0.0;    // relative
  double gap = 0.0;     // relative
  double psd_min_eig = 0.0;
  double diag_slack = 0.0;  // min over i of t - Z_ii
};

struct SdpSolution {
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Eigen::MatrixXcd block;  // Hermitian [[P, Phi], [Phi*, Q]]
  SdpResiduals residuals;
  int iterations = 0;
};

// min t  s.t.  [[P, Phi], [Phi*, Q]] PSD, all diagonal entries <= t.
// Complex PSD is handled through the real symmetric 2n x 2n embedding.
SdpSolution solve_gamma2_sdp(const Eigen::MatrixXcd& phi, const SdpSettings& settings);

}  // namespace lacuna
