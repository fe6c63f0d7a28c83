#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lacuna/errors.hpp"
#include "lacuna/experiments.hpp"
#include "lacuna/serialize.hpp"

using namespace lacuna;
using Eigen::MatrixXcd;

namespace {

FiniteSet powers_of_two(int k) {
  std::vector<Element> xs;
  for (int j = 0; j <= k; ++j) xs.push_back(Element::integer(std::int64_t{1} << j));
  return FiniteSet(GroupSpec::naturals(), xs);
}

ExperimentConfig config_with(const std::string& schedule, std::uint64_t seed = 7) {
  ExperimentConfig c;
  c.seed = seed;
  c.schedule = Schedule::parse(schedule);
  return c;
}

}  // namespace

TEST_CASE("verdict rule") {
  std::vector<double> sizes = {10, 100, 1000};
  CHECK(classify(sizes, {1.5, 1.9, 1.95}, {1, 1, 1}, 0.05, 0.2).verdict == Verdict::ConsistentWithLSet);
  CHECK(classify(sizes, {1, 2, 3}, {1, 1, 1}, 0.05, 0.2).verdict == Verdict::NotAnLSetEvidence);
  CHECK(classify(sizes, {1, 1.2, 1.4}, {1, 1, 1}, 0.05, 0.2).verdict == Verdict::Inconclusive);
  CHECK(classify(sizes, {1, 1, 1}, {1, 1.2, 1.4}, 0.05, 0.2).verdict == Verdict::Inconclusive);
  VerdictAnalysis a = classify({std::exp(1.0), std::exp(2.0)}, {1, 1.5}, {2, 2}, 0.05, 0.2);
  REQUIRE(a.d_slopes.size() == 1);
  CHECK(a.d_slopes[0] == doctest::Approx(0.5));
  CHECK(a.c_slopes[0] == doctest::Approx(0.0));
  for (Verdict v : {Verdict::ConsistentWithLSet, Verdict::NotAnLSetEvidence, Verdict::Inconclusive})
    CHECK(parse_verdict(verdict_name(v)) == v);
}

TEST_CASE("ratio radius") {
  CHECK(ratio_radius(Schedule::parse("balls:1..3"), 2) == 6);
  CHECK(ratio_radius(Schedule::parse("intervals:2..5"), 1) == 8);
}

TEST_CASE("config hash and round trip") {
  ExperimentConfig a = config_with("balls:1..3");
  ExperimentConfig b = ExperimentConfig::from_json(a.to_json());
  CHECK(a.hash() == b.hash());
  CHECK(dump_json(a.to_json()) == dump_json(b.to_json()));
  ExperimentConfig c = a;
  c.seed = 8;
  CHECK(c.hash() != a.hash());
  ExperimentConfig d = a;
  d.sdp.tolerance = 1e-6;
  CHECK(d.hash() != a.hash());
}

TEST_CASE("paley windows") {
  Window one = paley_window(FiniteSet(GroupSpec::naturals(), {Element::integer(1)}), 0, 3);
  REQUIRE(one.entries.size() == 2);
  CHECK(one.entries[0].row == 0);
  CHECK(one.entries[0].col == 1);
  CHECK(one.entries[1].row == 1);
  CHECK(one.entries[1].col == 0);
  // s + t = 2^k in {0..31}^2: 2 + 3 + 5 + 9 + 17 + 31
  CHECK(paley_window(powers_of_two(5), 0, 31).entries.size() == 67);
  CHECK(paley_window(FiniteSet(GroupSpec::naturals(), {}), 0, 31).entries.empty());
}

TEST_CASE("certify: free generators") {
  LSetReport r = certify_lset(generators(GroupSpec::free(5)), config_with("balls:1..3"));
  REQUIRE(r.steps.size() == 3);
  CHECK(r.analysis.verdict == Verdict::ConsistentWithLSet);
  for (const auto& s : r.steps) {
    CHECK(s.density.d <= 2.0);
    CHECK(s.partition.c == doctest::Approx(1.0));
    CHECK(s.density.d <= s.bridge_partition + 1e-9);
    CHECK(s.density.d <= s.bridge_split + 1e-9);
    CHECK(s.ratio.ratio >= 1 - 1e-6);
  }
  CHECK(r.steps[2].ratio.ratio == doctest::Approx(1.6695).epsilon(1e-4));
  CHECK(r.steps[2].density.d == doctest::Approx(1.9811320754716981).epsilon(1e-12));
  std::vector<double> sizes, d, c;
  for (const auto& s : r.steps) {
    sizes.push_back(static_cast<double>(s.window_size));
    d.push_back(s.density.d);
    c.push_back(s.partition.c);
  }
  CHECK(classify(sizes, d, c, r.config.plateau_slope, r.config.growth_slope).verdict == r.analysis.verdict);
  auto [e, f] = Schedule::parse("balls:1..3").window(GroupSpec::free(5), 1);
  Window w = relation_window(generators(GroupSpec::free(5)), e, f);
  CHECK(window_id(w) == r.steps[1].window_id);
  CHECK(verify_certificate(r.steps[1].density, w).pass);
  CHECK(verify_certificate(r.steps[1].partition, w).pass);
  CHECK(verify_certificate(r.steps[1].split, w).pass);
}

TEST_CASE("certify: sphere of radius two") {
  LSetReport r = certify_lset(sphere(GroupSpec::free(2), 2), config_with("balls:1..4"));
  CHECK(r.analysis.verdict == Verdict::NotAnLSetEvidence);
  for (std::size_t k = 1; k < r.steps.size(); ++k) CHECK(r.steps[k].density.d > r.steps[k - 1].density.d);
  LSetReport ext = certify_lset(sphere(GroupSpec::free(2), 2), config_with("balls:1..5"));
  CHECK(ext.analysis.verdict == r.analysis.verdict);
}

TEST_CASE("certify: dyadic Paley set and schedule extension") {
  LSetReport r = certify_lset(powers_of_two(10), config_with("intervals:1..10"));
  CHECK(r.analysis.verdict == Verdict::ConsistentWithLSet);
  CHECK(certify_lset(powers_of_two(10), config_with("intervals:1..11")).analysis.verdict == r.analysis.verdict);
  CHECK(certify_lset(generators(GroupSpec::free(5)), config_with("balls:1..4")).analysis.verdict ==
        Verdict::ConsistentWithLSet);
}

TEST_CASE("certify with sign averages is reproducible and thread independent") {
  ExperimentConfig c = config_with("balls:1..2");
  c.sign_trials = 6;
  LSetReport a = certify_lset(generators(GroupSpec::free(2)), c, 1);
  LSetReport b = certify_lset(generators(GroupSpec::free(2)), c, 3);
  CHECK(dump_json(a.to_json()) == dump_json(b.to_json()));
  REQUIRE(a.steps[0].sign_average);
  CHECK(a.steps[0].sign_average->trials == 6);
  CHECK(a.csv().rfind("parameter,window_size,d,c,split,ratio\n", 0) == 0);
}

TEST_CASE("certify errors carry context") {
  CHECK_THROWS_AS(certify_lset(FiniteSet(GroupSpec::free(2), {}), config_with("balls:1..2")), Error);
  ExperimentConfig c = config_with("balls:1..3");
  c.limits.max_elements = 20;
  try {
    certify_lset(generators(GroupSpec::free(2)), c);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LimitExceeded);
    CHECK(e.detail().contains("cause"));
    CHECK(e.detail()["schedule"] == "balls:1..3");
  }
}

TEST_CASE("roundtrip: identity element") {
  GroupSpec g = GroupSpec::free(2);
  ExperimentConfig c;
  c.seed = 3;
  c.trials = 20;
  WeightFunction phi = WeightFunction::indicator(FiniteSet(g, {identity(g)}), "delta_e");
  RoundtripReport r = sign_average_roundtrip(phi, ProductKind::product(), ball(g, 1), ball(g, 1), c);
  CHECK(r.average.mean == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.split.value == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.holds);
}

TEST_CASE("roundtrip: generators and homogeneity") {
  GroupSpec g = GroupSpec::free(2);
  ExperimentConfig c;
  c.seed = 11;
  c.trials = 40;
  WeightFunction phi = WeightFunction::indicator(generators(g), "gens");
  RoundtripReport r = sign_average_roundtrip(phi, ProductKind::product(), ball(g, 2), ball(g, 2), c);
  CHECK(r.holds);
  CHECK(r.split.value <= 2 * r.average.mean * 1.1);
  RoundtripReport s = sign_average_roundtrip(phi.scaled(10.0), ProductKind::product(), ball(g, 2), ball(g, 2), c);
  CHECK(s.average.mean == doctest::Approx(10 * r.average.mean).epsilon(1e-6));
  CHECK(s.split.value == doctest::Approx(10 * r.split.value).epsilon(1e-6));
  RoundtripReport t = sign_average_roundtrip(phi, ProductKind::product(), ball(g, 2), ball(g, 2), c, SignKind::Signs, false, 3);
  CHECK(dump_json(t.to_json()) == dump_json(r.to_json()));
}

TEST_CASE("phase averages of trace norms") {
  MatrixXcd e11 = MatrixXcd::Zero(2, 2);
  e11(0, 0) = 1;
  // E|1 + z| over the circle.
  double two = phase_average_trace_norm({e11, e11}, 20000, 1);
  CHECK(std::abs(two - 4 / std::numbers::pi) < 0.02);
  MatrixXcd m(2, 2);
  m << 1, 2, std::complex<double>(0, 1), -1;
  double one = phase_average_trace_norm({m}, 10, 2);
  CHECK(one == doctest::Approx(Eigen::JacobiSVD<MatrixXcd>(m).singularValues().sum()).epsilon(1e-12));
}

TEST_CASE("lpp inequality") {
  ExperimentConfig c;
  c.seed = 5;
  c.trials = 50;
  c.mc_samples = 500;
  LppReport n1 = lpp_inequality_test(3, 1, c);
  CHECK(n1.pass);
  CHECK(n1.min_ratio >= 2 * (1 - 1e-12));
  LppReport r = lpp_inequality_test(3, 4, c);
  CHECK(r.pass);
  CHECK(r.instances.size() == 50);
  for (const auto& i : r.instances) CHECK(i.lhs <= i.rhs * (1 + c.mc_slack));
  CHECK(r.worst_margin == doctest::Approx(1 / r.min_ratio));
  LppReport t = lpp_inequality_test(3, 4, c, 3);
  CHECK(dump_json(t.to_json()) == dump_json(r.to_json()));
  CHECK(r.to_json()["variant"] == "xi-average");
}

TEST_CASE("repnorm schedule") {
  RepnormReport r = repnorm_schedule(generators(GroupSpec::free(5)), 1.0 / std::sqrt(5.0), {2, 4, 6, 8});
  CHECK(r.monotone);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[3].ratio == doctest::Approx(1.71069).epsilon(1e-5));
  CHECK(r.rows[3].ratio >= 1.70);
  CHECK(r.rows[3].ratio <= 2.00);
}
