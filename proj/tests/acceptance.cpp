// One line per acceptance criterion; nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>

#include "lacuna/density.hpp"
#include "lacuna/errors.hpp"
#include "lacuna/experiments.hpp"
#include "lacuna/gamma2.hpp"
#include "lacuna/partition.hpp"
#include "lacuna/regular_rep.hpp"
#include "lacuna/rng.hpp"
#include "lacuna/serialize.hpp"

using namespace lacuna;
using Eigen::MatrixXcd;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int n, double limit_seconds, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const Error& e) {
    o = {false, std::string("error ") + error_code_name(e.code()) + ": " + e.what() + " " + e.detail().dump()};
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_seconds > 0 && secs > limit_seconds) {
    o.pass = false;
    o.detail += " [over time limit " + std::to_string(static_cast<int>(limit_seconds)) + "s]";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d: %s (%.1fs) %s\n", n, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Window random_window(Rng& rng, int max_side, std::size_t max_entries, bool binary) {
  Eigen::Index s = 1 + static_cast<Eigen::Index>(rng.below(max_side));
  Eigen::Index t = 1 + static_cast<Eigen::Index>(rng.below(max_side));
  MatrixXcd m = MatrixXcd::Zero(s, t);
  std::size_t want = std::min<std::size_t>(max_entries, 1 + rng.below(static_cast<std::uint64_t>(s * t)));
  for (std::size_t placed = 0; placed < want;) {
    Eigen::Index i = static_cast<Eigen::Index>(rng.below(s)), j = static_cast<Eigen::Index>(rng.below(t));
    if (m(i, j) != std::complex<double>(0)) continue;
    m(i, j) = binary ? std::complex<double>(1) : rng.complex_normal();
    ++placed;
  }
  return window_from_dense(m);
}

std::int64_t exhaustive_count(const Window& w) {
  std::size_t n = w.entries.size();
  std::int64_t best = INT64_MAX;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::int64_t> rc(w.num_rows(), 0), cc(w.num_cols(), 0);
    for (std::size_t k = 0; k < n; ++k) {
      if (mask >> k & 1)
        ++rc[w.entries[k].row];
      else
        ++cc[w.entries[k].col];
    }
    best = std::min(best, std::max(*std::max_element(rc.begin(), rc.end()), *std::max_element(cc.begin(), cc.end())));
  }
  return best;
}

MatrixXcd random_complex(Rng& rng, Eigen::Index s, Eigen::Index t) {
  MatrixXcd m(s, t);
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < t; ++j) m(i, j) = rng.complex_normal();
  return m;
}

FiniteSet powers_of_two(int k) {
  std::vector<Element> xs;
  for (int j = 0; j <= k; ++j) xs.push_back(Element::integer(std::int64_t{1} << j));
  return FiniteSet(GroupSpec::naturals(), xs);
}

ExperimentConfig certify_config(const std::string& schedule) {
  ExperimentConfig c;
  c.seed = 7;
  c.schedule = Schedule::parse(schedule);
  return c;
}

// Reports of criteria 5 to 8, rebuilt from scratch on every call.
std::vector<std::string> reports_5_to_8(unsigned threads) {
  std::vector<std::string> out;
  out.push_back(dump_json(certify_lset(generators(GroupSpec::free(5)), certify_config("balls:1..3"), threads).to_json()));
  out.push_back(dump_json(certify_lset(sphere(GroupSpec::free(2), 2), certify_config("balls:1..4"), threads).to_json()));
  out.push_back(dump_json(certify_lset(powers_of_two(10), certify_config("intervals:1..10"), threads).to_json()));
  out.push_back(dump_json(
      repnorm_schedule(generators(GroupSpec::free(5)), 1.0 / std::sqrt(5.0), {4, 6, 8}).to_json()));
  GroupSpec f2 = GroupSpec::free(2);
  ExperimentConfig rt;
  rt.seed = 7;
  rt.trials = 500;
  out.push_back(dump_json(sign_average_roundtrip(WeightFunction::indicator(generators(f2), "gens(F2)"),
                                          ProductKind::product(), ball(f2, 2), ball(f2, 2), rt, SignKind::Signs,
                                          false, threads)
                              .to_json()));
  ExperimentConfig lp;
  lp.seed = 7;
  lp.trials = 1000;
  lp.mc_samples = 2000;
  out.push_back(dump_json(lpp_inequality_test(3, 4, lp, threads).to_json()));
  return out;
}

}  // namespace

int main() {
  criterion(1, 60, [] {
    Rng rng(1);
    int mismatches = 0;
    for (int k = 0; k < 500; ++k) {
      Window w = random_window(rng, 6, 12, true);
      if (*min_partition_01(w).count != exhaustive_count(w)) ++mismatches;
    }
    return Outcome{mismatches == 0, "mismatches " + std::to_string(mismatches) + " of 500"};
  });

  criterion(2, 120, [] {
    Rng rng(2);
    int violations = 0;
    double worst = -INFINITY;
    for (int k = 0; k < 200; ++k) {
      Window w = random_window(rng, 10, 100, k % 4 == 0);
      double d = exact_density(w, 10).d;
      std::vector<PartitionCertificate> certs = {min_partition_weighted_heuristic(w)};
      if (w.entries.size() <= 20) certs.push_back(min_partition_weighted_exact(w));
      if (w.is_01()) certs.push_back(min_partition_01(w));
      for (const auto& c : certs) {
        double bound = c.c1 * c.c1 + c.c2 * c.c2;
        worst = std::max(worst, d - bound);
        if (d > bound + 1e-9) ++violations;
      }
    }
    return Outcome{violations == 0, "violations " + std::to_string(violations) + fmt(", max D - (C1^2+C2^2) = %.3g", worst)};
  });

  criterion(3, 300, [] {
    Rng rng(3);
    double up = 0, lo = 0;
    bool order = true;
    for (int k = 0; k < 100; ++k) {
      MatrixXcd m = random_complex(rng, 5, 5);
      Gamma2Certificate g = gamma2(m);
      LowRankResult o = lowrank_oracle(m);
      SchurLowerResult l = schur_action_lower(m);
      if (!o.fit) order = false;
      // the SDP value carries its own 1e-7 relative tolerance
      order = order && l.value <= g.value * (1 + 1e-6) && g.value <= o.value * (1 + 1e-6);
      up = std::max(up, (o.value - g.value) / g.value);
      lo = std::max(lo, (g.value - l.value) / g.value);
    }
    double id_err = 0;
    for (int n = 1; n <= 10; ++n) id_err = std::max(id_err, std::abs(gamma2(MatrixXcd::Identity(n, n)).value - 1));
    MatrixXcd h(2, 2);
    h << 1, 1, 1, -1;
    double h_err = std::abs(gamma2(h).value - std::numbers::sqrt2);
    bool ok = order && up <= 1e-3 && lo <= 5e-3 && id_err <= 1e-6 && h_err <= 1e-4;
    return Outcome{ok, fmt("oracle gap %.3g, lower gap %.3g, ", up, lo) + fmt("|gamma2(I)-1| %.3g, |gamma2(H2)-sqrt2| %.3g", id_err, h_err) +
                           (order ? "" : ", ordering violated")};
  });

  criterion(4, 0, [] {
    Rng rng(4);
    SdpSettings tight;
    tight.tolerance = 1e-9;
    double perm = 0, scale = 0, block = 0;
    for (int k = 0; k < 50; ++k) {
      Eigen::Index s = 2 + static_cast<Eigen::Index>(rng.below(4)), t = 2 + static_cast<Eigen::Index>(rng.below(4));
      MatrixXcd m = random_complex(rng, s, t);
      double base = gamma2(m, tight).value;
      std::vector<Eigen::Index> rp(static_cast<std::size_t>(s)), cp(static_cast<std::size_t>(t));
      std::iota(rp.begin(), rp.end(), 0);
      std::iota(cp.begin(), cp.end(), 0);
      for (std::size_t i = rp.size() - 1; i > 0; --i) std::swap(rp[i], rp[rng.below(i + 1)]);
      for (std::size_t i = cp.size() - 1; i > 0; --i) std::swap(cp[i], cp[rng.below(i + 1)]);
      MatrixXcd p(s, t);
      for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = 0; j < t; ++j) p(i, j) = m(rp[static_cast<std::size_t>(i)], cp[static_cast<std::size_t>(j)]);
      Eigen::VectorXcd dr(s), dc(t);
      for (Eigen::Index i = 0; i < s; ++i) dr[i] = rng.phase();
      for (Eigen::Index j = 0; j < t; ++j) dc[j] = rng.phase();
      perm = std::max(perm, std::abs(gamma2(p, tight).value - base));
      scale = std::max(scale, std::abs(gamma2(MatrixXcd(dr.asDiagonal() * m * dc.asDiagonal()), tight).value - base));
      MatrixXcd other = random_complex(rng, 3, 2);
      MatrixXcd d = MatrixXcd::Zero(s + 3, t + 2);
      d.topLeftCorner(s, t) = m;
      d.bottomRightCorner(3, 2) = other;
      SdpSettings whole;
      whole.decompose = false;
      block = std::max(block, std::abs(gamma2(d, whole).value - std::max(base, gamma2(other).value)));
    }
    bool ok = perm < 1e-8 && scale < 1e-8 && block <= 1e-6;
    return Outcome{ok, fmt("max change: permutation %.3g, scaling %.3g; block-diagonal error %.3g", perm, scale, block)};
  });

  criterion(5, 600, [] {
    LSetReport f5 = certify_lset(generators(GroupSpec::free(5)), certify_config("balls:1..3"));
    LSetReport sph = certify_lset(sphere(GroupSpec::free(2), 2), certify_config("balls:1..4"));
    LSetReport pal = certify_lset(powers_of_two(10), certify_config("intervals:1..10"));
    bool slopes = true;
    const auto& ds = f5.analysis.d_slopes;
    for (std::size_t k = 1; k < ds.size(); ++k) slopes = slopes && ds[k] <= ds[k - 1];
    bool increasing = true;
    for (std::size_t k = 1; k < sph.steps.size(); ++k)
      increasing = increasing && sph.steps[k].density.d > sph.steps[k - 1].density.d;
    bool ok = f5.analysis.verdict == Verdict::ConsistentWithLSet && slopes &&
              sph.analysis.verdict == Verdict::NotAnLSetEvidence && increasing &&
              pal.analysis.verdict == Verdict::ConsistentWithLSet;
    return Outcome{ok, std::string("F5 gens ") + verdict_name(f5.analysis.verdict) + ", sphere(F2,2) " +
                           verdict_name(sph.analysis.verdict) + ", Paley " + verdict_name(pal.analysis.verdict)};
  });

  criterion(6, 180, [] {
    RepnormReport r = repnorm_schedule(generators(GroupSpec::free(5)), 1.0 / std::sqrt(5.0), {4, 6, 8});
    double r8 = r.rows.back().ratio;
    bool ok = r.monotone && r8 >= 1.70 && r8 <= 2.00 && r.rows[0].ratio <= r.rows[1].ratio &&
              r.rows[1].ratio <= r.rows[2].ratio;
    return Outcome{ok, fmt("ratios R=4 %.6f, R=6 %.6f, R=8 %.6f", r.rows[0].ratio, r.rows[1].ratio, r8)};
  });

  criterion(7, 600, [] {
    GroupSpec f2 = GroupSpec::free(2);
    ExperimentConfig c;
    c.seed = 7;
    c.trials = 500;
    RoundtripReport r = sign_average_roundtrip(WeightFunction::indicator(generators(f2), "gens(F2)"), ProductKind::product(),
                                        ball(f2, 2), ball(f2, 2), c);
    bool ok = r.split.value <= 2 * r.average.mean * 1.1 && r.average.failures == 0;
    return Outcome{ok, fmt("split %.6f, C_hat %.6f (stderr %.2g)", r.split.value, r.average.mean, r.average.stderr_)};
  });

  criterion(8, 300, [] {
    ExperimentConfig c;
    c.seed = 7;
    c.trials = 1000;
    c.mc_samples = 2000;
    LppReport r = lpp_inequality_test(3, 4, c);
    std::size_t bad = 0;
    for (const auto& i : r.instances) bad += i.lhs > i.rhs * 1.05;
    bool ok = r.pass && bad == 0 && r.instances.size() == 1000;
    return Outcome{ok, fmt("min RHS/LHS %.6f, worst LHS/RHS %.6f", r.min_ratio, r.worst_margin)};
  });

  criterion(9, 0, [] {
    std::vector<std::string> a = reports_5_to_8(1), b = reports_5_to_8(1), c = reports_5_to_8(4);
    std::size_t same = 0;
    for (std::size_t k = 0; k < a.size(); ++k) same += a[k] == b[k] && a[k] == c[k];
    return Outcome{same == a.size(), std::to_string(same) + " of " + std::to_string(a.size()) +
                                         " reports byte-identical across reruns and thread counts"};
  });

  return failures == 0 ? 0 : 1;
}
