#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lacuna/density.hpp"
#include "lacuna/gamma2.hpp"
#include "lacuna/group.hpp"
#include "lacuna/json_io.hpp"
#include "lacuna/partition.hpp"
#include "lacuna/regular_rep.hpp"
#include "lacuna/schedule.hpp"
#include "lacuna/window.hpp"

namespace lacuna {

// Everything that determines a run. Thread count is not part of it.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::optional<Schedule> schedule;
  double plateau_slope = 0.05;
  double growth_slope = 0.2;
  double bridge_slack = 1e-9;
  double roundtrip_slack = 0.1;
  double mc_slack = 0.05;
  std::size_t mc_samples = 2000;
  std::size_t sign_trials = 0;  // sign-average gamma2 per certify window; 0 skips
  DensityOptions density;
  SdpSettings sdp;
  SplitSettings split;
  NormSettings norm;
  Limits limits;

  json to_json() const;
  static ExperimentConfig from_json(const json& j);
  std::string hash() const;
};

enum class Verdict { ConsistentWithLSet, NotAnLSetEvidence, Inconclusive };
const char* verdict_name(Verdict v);
Verdict parse_verdict(const std::string& s);

struct VerdictAnalysis {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> d_slopes;  // per e-fold of window size
  std::vector<double> c_slopes;
  double mean_d_slope = 0;
};

VerdictAnalysis classify(const std::vector<double>& window_sizes, const std::vector<double>& d,
                         const std::vector<double>& c, double plateau_slope, double growth_slope);

struct LSetStep {
  int parameter = 0;
  std::size_t window_size = 0;
  std::size_t entries = 0;
  std::string window_id;
  DensityCertificate density;
  PartitionCertificate partition;
  SplitCertificate split;
  double bridge_partition = 0;  // c1^2 + c2^2
  double bridge_split = 0;      // 2 (r1^2 + r2^2), since |a + b|^2 <= 2|a|^2 + 2|b|^2
  LSetRatio ratio;
  std::optional<SignAverage> sign_average;
};

struct LSetReport {
  FiniteSet set;
  ExperimentConfig config;
  std::vector<LSetStep> steps;
  VerdictAnalysis analysis;

  json to_json() const;
  std::string csv() const;
};

// Radius of the regular representation truncation used at a schedule step.
int ratio_radius(const Schedule& s, std::size_t k);

LSetReport certify_lset(const FiniteSet& lambda, const ExperimentConfig& config, unsigned threads = 1);

struct RoundtripReport {
  WeightFunction phi;
  std::string product;
  FiniteSet rows;
  FiniteSet cols;
  std::string window_id;
  SignAverage average;
  SplitCertificate split;
  double bound = 0;  // 2 * C_hat * (1 + slack)
  bool holds = false;
  ExperimentConfig config;

  json to_json() const;
};

RoundtripReport sign_average_roundtrip(const WeightFunction& phi, const ProductKind& product, const FiniteSet& rows,
                                const FiniteSet& cols, const ExperimentConfig& config, SignKind kind = SignKind::Signs,
                                bool group_signs = false, unsigned threads = 1);

struct LppInstance {
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
};

struct LppReport {
  std::size_t d = 0;
  std::size_t n = 0;
  std::vector<LppInstance> instances;
  double min_ratio = 0;   // min rhs / lhs
  double worst_margin = 0;  // max lhs / rhs
  bool pass = false;
  ExperimentConfig config;

  json to_json() const;
};

LppReport lpp_inequality_test(std::size_t d, std::size_t n, const ExperimentConfig& config, unsigned threads = 1);

struct RepnormReport {
  FiniteSet set;
  std::complex<double> coefficient;
  std::vector<LSetRatio> rows;
  bool monotone = true;  // truncated norms nondecreasing in R
  NormSettings norm;

  json to_json() const;
};

RepnormReport repnorm_schedule(const FiniteSet& lambda, std::complex<double> coefficient, const std::vector<int>& radii,
                               const RatioSettings& settings = {});

json freeness_to_json(const FiniteSet& s, const FreenessResult& r);
json leinert_to_json(const FiniteSet& s, const LeinertResult& r);

// Monte Carlo mean over uniform phases z of ||sum z_j xi_j||_1.
double phase_average_trace_norm(const std::vector<Eigen::MatrixXcd>& xi, std::size_t samples, std::uint64_t seed);

// Window of the indicator of lambda for p(s, t) = s + t on {lo..hi}^2.
Window paley_window(const FiniteSet& lambda, std::int64_t lo, std::int64_t hi, const Limits& limits = {});

}  // namespace lacuna
