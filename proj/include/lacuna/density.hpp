#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lacuna/partition.hpp"
#include "lacuna/schedule.hpp"
#include "lacuna/window.hpp"

namespace lacuna {

enum class DensityMode { Exact, Heuristic };

struct DensityCertificate {
  std::string window_id;
  double d = 0.0;
  std::size_t n_star = 0;
  std::vector<std::size_t> rows;  // witness, sorted indices
  std::vector<std::size_t> cols;
  DensityMode mode = DensityMode::Exact;
  std::string method;
  std::optional<double> upper_bound;  // certified by a parametric min cut
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
};

const char* density_mode_name(DensityMode m);

struct DensityOptions {
  std::size_t exact_side_limit = 14;
  std::size_t restarts = 32;
  std::uint64_t seed = 0;
};

// Sum of |psi|^2 over rows × cols divided by the common size.
double witness_density(const Window& w, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols);

DensityCertificate exact_density(const Window& w, std::size_t side_limit = 14);
DensityCertificate heuristic_density(const Window& w, std::size_t restarts = 32, std::uint64_t seed = 0);
// Exact within the side limit, heuristic otherwise.
DensityCertificate density(const Window& w, const DensityOptions& opt = {});

Verification verify_certificate(const DensityCertificate& cert, const Window& w, double tol = 1e-9);

struct GrowthPoint {
  int parameter = 0;
  std::size_t window_size = 0;
  DensityCertificate certificate;
};

std::vector<GrowthPoint> density_growth_scan(const FiniteSet& lambda, const Schedule& schedule,
                                             const DensityOptions& opt = {}, const Limits& limits = {});

}  // namespace lacuna
