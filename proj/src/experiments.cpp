#include "lacuna/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lacuna/errors.hpp"
#include "lacuna/parallel.hpp"
#include "lacuna/rng.hpp"
#include "lacuna/serialize.hpp"

namespace lacuna {
namespace {

using Eigen::MatrixXcd;

void require(const Verification& v, const std::string& what) {
  if (!v.pass) fail(ErrorCode::VerificationFailed, what + " certificate failed to verify", {{"failures", v.failures}});
}

double top_sqrt_eig(const MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

json policy_json(const ExperimentConfig& c) {
  return {{"plateau_slope", c.plateau_slope},
          {"growth_slope", c.growth_slope},
          {"slope_unit", "change in D per e-fold of window size"},
          {"rule",
           "not-an-L-set-evidence if the mean D slope exceeds growth_slope; consistent-with-L-set if the last D "
           "and C slopes are both below plateau_slope; inconclusive otherwise"}};
}

}  // namespace

json ExperimentConfig::to_json() const {
  return {{"seed", seed},
          {"trials", trials},
          {"schedule", schedule ? json(schedule->text()) : json(nullptr)},
          {"plateau_slope", plateau_slope},
          {"growth_slope", growth_slope},
          {"bridge_slack", bridge_slack},
          {"roundtrip_slack", roundtrip_slack},
          {"mc_slack", mc_slack},
          {"mc_samples", mc_samples},
          {"sign_trials", sign_trials},
          {"density", {{"exact_side_limit", density.exact_side_limit}, {"restarts", density.restarts}, {"seed", density.seed}}},
          {"sdp",
           {{"tolerance", sdp.tolerance},
            {"max_iterations", sdp.max_iterations},
            {"step_fraction", sdp.step_fraction},
            {"max_dim", sdp.max_dim},
            {"decompose", sdp.decompose},
            {"lower_bound_restarts", sdp.lower_bound_restarts},
            {"lower_bound_seed", sdp.lower_bound_seed}}},
          {"split", {{"tolerance", split.tolerance}, {"max_newton_steps", split.max_newton_steps}}},
          {"norm", {{"tolerance", norm.tolerance}, {"max_iterations", norm.max_iterations}, {"seed", norm.seed}}},
          {"limits", {{"max_elements", limits.max_elements}, {"max_tuples", limits.max_tuples}}}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidInput, "experiment config must be an object");
  ExperimentConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.trials = j.value("trials", c.trials);
    if (j.contains("schedule") && !j["schedule"].is_null()) c.schedule = Schedule::parse(j["schedule"].get<std::string>());
    c.plateau_slope = j.value("plateau_slope", c.plateau_slope);
    c.growth_slope = j.value("growth_slope", c.growth_slope);
    c.bridge_slack = j.value("bridge_slack", c.bridge_slack);
    c.roundtrip_slack = j.value("roundtrip_slack", c.roundtrip_slack);
    c.mc_slack = j.value("mc_slack", c.mc_slack);
    c.mc_samples = j.value("mc_samples", c.mc_samples);
    c.sign_trials = j.value("sign_trials", c.sign_trials);
    if (j.contains("density")) {
      const json& d = j["density"];
      c.density.exact_side_limit = d.value("exact_side_limit", c.density.exact_side_limit);
      c.density.restarts = d.value("restarts", c.density.restarts);
      c.density.seed = d.value("seed", c.density.seed);
    }
    if (j.contains("sdp")) {
      const json& s = j["sdp"];
      c.sdp.tolerance = s.value("tolerance", c.sdp.tolerance);
      c.sdp.max_iterations = s.value("max_iterations", c.sdp.max_iterations);
      c.sdp.step_fraction = s.value("step_fraction", c.sdp.step_fraction);
      c.sdp.max_dim = s.value("max_dim", c.sdp.max_dim);
      c.sdp.decompose = s.value("decompose", c.sdp.decompose);
      c.sdp.lower_bound_restarts = s.value("lower_bound_restarts", c.sdp.lower_bound_restarts);
      c.sdp.lower_bound_seed = s.value("lower_bound_seed", c.sdp.lower_bound_seed);
    }
    if (j.contains("split")) {
      c.split.tolerance = j["split"].value("tolerance", c.split.tolerance);
      c.split.max_newton_steps = j["split"].value("max_newton_steps", c.split.max_newton_steps);
    }
    if (j.contains("norm")) {
      c.norm.tolerance = j["norm"].value("tolerance", c.norm.tolerance);
      c.norm.max_iterations = j["norm"].value("max_iterations", c.norm.max_iterations);
      c.norm.seed = j["norm"].value("seed", c.norm.seed);
    }
    if (j.contains("limits")) {
      c.limits.max_elements = j["limits"].value("max_elements", c.limits.max_elements);
      c.limits.max_tuples = j["limits"].value("max_tuples", c.limits.max_tuples);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidInput, "malformed experiment config", {{"parser", e.what()}});
  }
  return c;
}

std::string ExperimentConfig::hash() const { return content_hash(to_json()); }

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ConsistentWithLSet: return "consistent-with-L-set";
    case Verdict::NotAnLSetEvidence: return "not-an-L-set-evidence";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict parse_verdict(const std::string& s) {
  for (Verdict v : {Verdict::ConsistentWithLSet, Verdict::NotAnLSetEvidence, Verdict::Inconclusive})
    if (s == verdict_name(v)) return v;
  fail(ErrorCode::InvalidInput, "unknown verdict '" + s + "'");
}

VerdictAnalysis classify(const std::vector<double>& window_sizes, const std::vector<double>& d,
                         const std::vector<double>& c, double plateau_slope, double growth_slope) {
  if (window_sizes.size() != d.size() || d.size() != c.size())
    fail(ErrorCode::InvalidInput, "verdict series have different lengths");
  VerdictAnalysis a;
  for (std::size_t k = 1; k < d.size(); ++k) {
    double dl = std::log(window_sizes[k]) - std::log(window_sizes[k - 1]);
    if (!(dl > 0)) fail(ErrorCode::InvalidInput, "window sizes must increase along the schedule");
    a.d_slopes.push_back((d[k] - d[k - 1]) / dl);
    a.c_slopes.push_back((c[k] - c[k - 1]) / dl);
  }
  if (a.d_slopes.empty()) return a;
  a.mean_d_slope = std::accumulate(a.d_slopes.begin(), a.d_slopes.end(), 0.0) / static_cast<double>(a.d_slopes.size());
  if (a.mean_d_slope > growth_slope)
    a.verdict = Verdict::NotAnLSetEvidence;
  else if (a.d_slopes.back() < plateau_slope && a.c_slopes.back() < plateau_slope)
    a.verdict = Verdict::ConsistentWithLSet;
  return a;
}

int ratio_radius(const Schedule& s, std::size_t k) {
  int p = s.parameter(k);
  return s.kind == Schedule::Kind::Balls ? 2 * p : (1 << p);
}

LSetReport certify_lset(const FiniteSet& lambda, const ExperimentConfig& config, unsigned threads) {
  if (lambda.empty()) fail(ErrorCode::InvalidInput, "the set is empty");
  if (!config.schedule || config.schedule->steps() == 0 || config.schedule->last < config.schedule->first)
    fail(ErrorCode::InvalidInput, "certify needs a nonempty schedule");
  const Schedule& sched = *config.schedule;
  LSetReport rep;
  rep.set = lambda;
  rep.config = config;
  const CoefficientMap coeff = CoefficientMap::scalar(lambda, 1.0 / std::sqrt(static_cast<double>(lambda.size())));
  for (std::size_t k = 0; k < sched.steps(); ++k) {
    LSetStep st;
    st.parameter = sched.parameter(k);
    try {
      auto [e, f] = sched.window(lambda.group(), k, config.limits);
      Window w = relation_window(lambda, e, f, config.limits);
      st.window_size = e.size();
      st.entries = w.entries.size();
      st.window_id = window_id(w);
      st.density = density(w, config.density);
      require(verify_certificate(st.density, w), "density");
      st.partition = min_partition_01(w);
      require(verify_certificate(st.partition, w), "partition");
      st.split = min_split(w, config.split);
      require(verify_certificate(st.split, w), "split");
      st.bridge_partition = st.partition.c1 * st.partition.c1 + st.partition.c2 * st.partition.c2;
      st.bridge_split = 2 * (st.split.r1 * st.split.r1 + st.split.r2 * st.split.r2);
      double slack = config.bridge_slack * std::max(1.0, st.density.d);
      if (st.density.d > st.bridge_partition + slack || st.density.d > st.bridge_split + slack)
        fail(ErrorCode::VerificationFailed, "bridge inequality violated",
             {{"d", st.density.d}, {"partition", st.bridge_partition}, {"split", st.bridge_split}});
      RatioSettings rs;
      rs.norm = config.norm;
      rs.limits = config.limits;
      st.ratio = lset_ratio(coeff, ratio_radius(sched, k), rs);
      if (config.sign_trials > 0)
        st.sign_average = sign_average_gamma2(MatrixFamily::entrywise(w), config.sign_trials,
                                              derive_seed(config.seed, k), SignKind::Signs, config.sdp, threads);
    } catch (const Error& err) {
      fail(err.code(), "certify step " + std::to_string(st.parameter) + ": " + err.what(),
           {{"parameter", st.parameter}, {"schedule", sched.text()}, {"cause", err.to_json()}});
    }
    rep.steps.push_back(std::move(st));
  }
  std::vector<double> sizes, d, c;
  for (const auto& s : rep.steps) {
    sizes.push_back(static_cast<double>(s.window_size));
    d.push_back(s.density.d);
    c.push_back(s.partition.c);
  }
  rep.analysis = classify(sizes, d, c, config.plateau_slope, config.growth_slope);
  return rep;
}

json LSetReport::to_json() const {
  json j = {{"schema", "lacuna.lset-report"}, {"version", kSchemaVersion}};
  j["set"] = set_to_json(set);
  j["schedule"] = config.schedule ? config.schedule->text() : "";
  j["config"] = config.to_json();
  j["config_hash"] = config.hash();
  j["policy"] = policy_json(config);
  json steps_j = json::array();
  json sizes = json::array(), dj = json::array(), cj = json::array(), sj = json::array(), rj = json::array();
  for (const auto& s : steps) {
    json x = {{"parameter", s.parameter},
              {"window_size", s.window_size},
              {"entries", s.entries},
              {"window_id", s.window_id},
              {"density", lacuna::to_json(s.density)},
              {"partition", lacuna::to_json(s.partition)},
              {"split", lacuna::to_json(s.split)},
              {"bridge", {{"d", s.density.d}, {"partition_bound", s.bridge_partition}, {"split_bound", s.bridge_split}}},
              {"ratio", lacuna::to_json(s.ratio)}};
    if (s.sign_average) x["sign_average"] = lacuna::to_json(*s.sign_average, false);
    steps_j.push_back(x);
    sizes.push_back(s.window_size);
    dj.push_back(s.density.d);
    cj.push_back(s.partition.c);
    sj.push_back(s.split.value);
    rj.push_back(s.ratio.ratio);
  }
  j["steps"] = steps_j;
  j["series"] = {{"window_size", sizes}, {"d", dj}, {"c", cj}, {"split", sj}, {"ratio", rj},
                 {"d_slopes", analysis.d_slopes}, {"c_slopes", analysis.c_slopes},
                 {"mean_d_slope", analysis.mean_d_slope}};
  j["verdict"] = verdict_name(analysis.verdict);
  return j;
}

std::string LSetReport::csv() const {
  std::ostringstream os;
  os << "parameter,window_size,d,c,split,ratio\n";
  char buf[256];
  for (const auto& s : steps) {
    std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%.17g,%.17g\n", s.parameter, s.window_size, s.density.d,
                  s.partition.c, s.split.value, s.ratio.ratio);
    os << buf;
  }
  return os.str();
}

RoundtripReport sign_average_roundtrip(const WeightFunction& phi, const ProductKind& product, const FiniteSet& rows,
                                const FiniteSet& cols, const ExperimentConfig& config, SignKind kind,
                                bool group_signs, unsigned threads) {
  if (config.trials == 0) fail(ErrorCode::InvalidInput, "roundtrip needs at least one trial");
  RoundtripReport r;
  r.phi = phi;
  r.product = product.name();
  r.rows = rows;
  r.cols = cols;
  r.config = config;
  Window w = build_window(phi, product, rows, cols, config.limits);
  r.window_id = window_id(w);
  MatrixFamily fam = group_signs ? MatrixFamily::by_group_element(w) : MatrixFamily::entrywise(w);
  r.average = sign_average_gamma2(fam, config.trials, config.seed, kind, config.sdp, threads);
  if (r.average.failures == r.average.trials)
    fail(ErrorCode::NonConvergence, "every sign trial failed", {{"trials", r.average.trials}});
  r.split = min_split(w, config.split);
  require(verify_certificate(r.split, w), "split");
  r.bound = 2 * r.average.mean * (1 + config.roundtrip_slack);
  r.holds = r.split.value <= r.bound;
  return r;
}

json RoundtripReport::to_json() const {
  return {{"schema", "lacuna.roundtrip-report"},
          {"version", kSchemaVersion},
          {"phi", weights_to_json(phi)},
          {"product", product},
          {"rows", set_to_json(rows)},
          {"cols", set_to_json(cols)},
          {"window_id", window_id},
          {"sign_average", lacuna::to_json(average, false)},
          {"c_hat", average.mean},
          {"split", lacuna::to_json(split)},
          {"split_value", split.value},
          {"slack", config.roundtrip_slack},
          {"bound", bound},
          {"holds", holds},
          {"relation", "split_value <= 2 * c_hat * (1 + slack)"},
          {"config", config.to_json()},
          {"config_hash", config.hash()}};
}

double phase_average_trace_norm(const std::vector<MatrixXcd>& xi, std::size_t samples, std::uint64_t seed) {
  if (xi.empty() || samples == 0) return 0.0;
  Rng rng(seed);
  double total = 0;
  MatrixXcd m(xi[0].rows(), xi[0].cols());
  for (std::size_t s = 0; s < samples; ++s) {
    m.setZero();
    for (const auto& x : xi) m += rng.phase() * x;
    total += Eigen::JacobiSVD<MatrixXcd>(m).singularValues().sum();
  }
  return total / static_cast<double>(samples);
}

LppReport lpp_inequality_test(std::size_t d, std::size_t n, const ExperimentConfig& config, unsigned threads) {
  if (d == 0 || n == 0) fail(ErrorCode::InvalidInput, "lpp needs d >= 1 and n >= 1");
  if (config.trials == 0 || config.mc_samples == 0) fail(ErrorCode::InvalidInput, "lpp needs trials and mc samples");
  LppReport r;
  r.d = d;
  r.n = n;
  r.config = config;
  r.instances.resize(config.trials);
  const Eigen::Index dim = static_cast<Eigen::Index>(d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  parallel_for(config.trials, threads, [&](std::size_t i) {
    std::uint64_t ts = derive_seed(config.seed, i);
    Rng rng(ts);
    std::vector<MatrixXcd> a(n, MatrixXcd(dim, dim)), xi(n, MatrixXcd(dim, dim));
    for (std::size_t j = 0; j < n; ++j) {
      for (Eigen::Index p = 0; p < dim; ++p)
        for (Eigen::Index q = 0; q < dim; ++q) a[j](p, q) = scale * rng.complex_normal();
      for (Eigen::Index p = 0; p < dim; ++p)
        for (Eigen::Index q = 0; q < dim; ++q) xi[j](p, q) = scale * rng.complex_normal();
    }
    std::complex<double> pairing = 0;
    MatrixXcd col = MatrixXcd::Zero(dim, dim), row = col;
    for (std::size_t j = 0; j < n; ++j) {
      pairing += (xi[j].adjoint() * a[j]).trace();
      col += a[j].adjoint() * a[j];
      row += a[j] * a[j].adjoint();
    }
    LppInstance& inst = r.instances[i];
    inst.lhs = std::abs(pairing);
    inst.rhs = phase_average_trace_norm(xi, config.mc_samples, derive_seed(ts, 1)) * (top_sqrt_eig(col) + top_sqrt_eig(row));
    inst.holds = inst.lhs <= inst.rhs * (1 + config.mc_slack);
  });
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.pass = true;
  for (const auto& inst : r.instances) {
    if (inst.lhs > 0) r.min_ratio = std::min(r.min_ratio, inst.rhs / inst.lhs);
    if (inst.rhs > 0) r.worst_margin = std::max(r.worst_margin, inst.lhs / inst.rhs);
    r.pass = r.pass && inst.holds;
  }
  return r;
}

json LppReport::to_json() const {
  json lhs = json::array(), rhs = json::array();
  std::size_t failures = 0;
  for (const auto& i : instances) {
    lhs.push_back(i.lhs);
    rhs.push_back(i.rhs);
    failures += i.holds ? 0 : 1;
  }
  return {{"schema", "lacuna.lpp-report"},
          {"version", kSchemaVersion},
          {"d", d},
          {"n", n},
          {"trials", instances.size()},
          {"mc_samples", config.mc_samples},
          {"mc_slack", config.mc_slack},
          {"variant", "xi-average"},
          {"variant_note",
           "the printed statement averages ||sum z_j a_j|| in the predual; the proof uses ||sum z_j xi_j||, which is "
           "the variant exercised here"},
          {"lhs", lhs},
          {"rhs", rhs},
          {"failures", failures},
          {"min_ratio", std::isfinite(min_ratio) ? json(min_ratio) : json(nullptr)},
          {"worst_margin", worst_margin},
          {"pass", pass},
          {"config", config.to_json()},
          {"config_hash", config.hash()}};
}

RepnormReport repnorm_schedule(const FiniteSet& lambda, std::complex<double> coefficient, const std::vector<int>& radii,
                               const RatioSettings& settings) {
  if (radii.empty()) fail(ErrorCode::InvalidInput, "repnorm needs at least one radius");
  RepnormReport r;
  r.set = lambda;
  r.coefficient = coefficient;
  r.norm = settings.norm;
  CoefficientMap a = CoefficientMap::scalar(lambda, coefficient);
  for (int radius : radii) {
    r.rows.push_back(lset_ratio(a, radius, settings));
    if (r.rows.size() > 1 && radius > r.rows[r.rows.size() - 2].radius &&
        r.rows.back().truncated_norm < r.rows[r.rows.size() - 2].truncated_norm * (1 - 1e-6))
      r.monotone = false;
  }
  return r;
}

json RepnormReport::to_json() const {
  json rows_j = json::array(), radii = json::array();
  for (const auto& x : rows) {
    rows_j.push_back(lacuna::to_json(x));
    radii.push_back(x.radius);
  }
  return {{"schema", "lacuna.repnorm-report"},
          {"version", kSchemaVersion},
          {"set", set_to_json(set)},
          {"coefficient", complex_to_json(coefficient)},
          {"radii", radii},
          {"rows", rows_j},
          {"monotone", monotone},
          {"label", "truncated at R"},
          {"norm_settings", {{"tolerance", norm.tolerance}, {"max_iterations", norm.max_iterations}, {"seed", norm.seed}}}};
}

json freeness_to_json(const FiniteSet& s, const FreenessResult& r) {
  json w = json::array();
  std::string text;
  for (const auto& f : r.witness) {
    w.push_back({f.index, f.exponent});
    if (!text.empty()) text += " * ";
    text += "(" + format_element(s.group(), s[f.index]) + ")" + (f.exponent < 0 ? "^-1" : "");
  }
  return {{"schema", "lacuna.freeness-report"}, {"version", kSchemaVersion}, {"set", set_to_json(s)}, {"check", "free"},
          {"depth", r.depth}, {"holds", r.holds}, {"examined", r.examined}, {"witness", w}, {"witness_text", text}};
}

json leinert_to_json(const FiniteSet& s, const LeinertResult& r) {
  std::string text;
  for (std::size_t i = 0; i < r.witness.size(); ++i) {
    if (!text.empty()) text += " * ";
    text += "(" + format_element(s.group(), s[r.witness[i]]) + ")" + (i % 2 == 0 ? "^-1" : "");
  }
  return {{"schema", "lacuna.freeness-report"}, {"version", kSchemaVersion}, {"set", set_to_json(s)}, {"check", "leinert"},
          {"depth", r.depth}, {"holds", r.holds}, {"examined", r.examined}, {"witness", r.witness}, {"witness_text", text}};
}

Window paley_window(const FiniteSet& lambda, std::int64_t lo, std::int64_t hi, const Limits& limits) {
  GroupSpec g = lambda.empty() ? GroupSpec::naturals() : lambda.group();
  if (!g.is_numeric()) fail(ErrorCode::InvalidInput, "paley windows need a set in N or Z");
  FiniteSet iv = interval(g, lo, hi, limits);
  return build_window(WeightFunction::indicator(lambda, "indicator"), ProductKind::product(), iv, iv, limits);
}

}  // namespace lacuna
