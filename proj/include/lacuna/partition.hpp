#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lacuna/json_io.hpp"
#include "lacuna/window.hpp"

namespace lacuna {

enum class Optimality { Exact, Heuristic };

const char* optimality_name(Optimality o);
Optimality parse_optimality(const std::string& s);

struct PartitionCertificate {
  std::string window_id;
  std::vector<std::uint8_t> assignment;  // 1 or 2 per window entry, entry order
  double c1 = 0.0;
  double c2 = 0.0;
  double c = 0.0;
  Optimality optimality = Optimality::Exact;
  std::string method;
  std::optional<std::int64_t> count;  // integer bound for 0/1 windows
  std::uint64_t seed = 0;
  json parameters = json::object();
};

struct SplitCertificate {
  std::string window_id;
  std::vector<cplx> psi1;  // per window entry
  std::vector<cplx> psi2;
  double r1 = 0.0;
  double r2 = 0.0;
  double value = 0.0;
  double residual = 0.0;
  double lower_bound = 0.0;  // from the dual of the convex program
  int iterations = 0;
  json parameters = json::object();
};

struct LineConstants {
  double c1 = 0.0;  // max row l2 norm over part one
  double c2 = 0.0;  // max column l2 norm over part two
};

LineConstants partition_constants(const Window& w, const std::vector<std::uint8_t>& assignment);
LineConstants split_constants(const Window& w, const std::vector<cplx>& psi1, const std::vector<cplx>& psi2);

// Largest number of part-one entries in a row / part-two entries in a column.
std::int64_t partition_count(const Window& w, const std::vector<std::uint8_t>& assignment);

PartitionCertificate min_partition_01(const Window& w);

struct WeightedOptions {
  std::size_t exact_entry_limit = 20;
};

PartitionCertificate min_partition_weighted_exact(const Window& w, const WeightedOptions& opt = {});
PartitionCertificate min_partition_weighted_heuristic(const Window& w);
// Exact when the entry count is within the limit, heuristic otherwise.
PartitionCertificate min_partition_weighted(const Window& w, const WeightedOptions& opt = {});

struct SplitSettings {
  double tolerance = 1e-7;  // relative duality gap on the squared value
  int max_newton_steps = 5000;
};

SplitCertificate min_split(const Window& w, const SplitSettings& settings = {});

struct Verification {
  bool pass = true;
  std::vector<std::string> failures;
  json recomputed = json::object();

  void check(bool ok, const std::string& what);
};

// Throws DanglingReference when the window does not match the certificate.
Verification verify_certificate(const PartitionCertificate& cert, const Window& w, double tol = 1e-9);
Verification verify_certificate(const SplitCertificate& cert, const Window& w, double tol = 1e-9);

}  // namespace lacuna
