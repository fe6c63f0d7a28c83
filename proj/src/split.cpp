#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "lacuna/errors.hpp"
#include "lacuna/partition.hpp"
#include "lacuna/serialize.hpp"

namespace lacuna {
namespace {

// Convex program over theta in [0,1]^entries (psi1 = theta psi):
//   minimize tau  s.t.  sum_{e in row} w_e theta_e^2 <= tau,
//                       sum_{e in col} w_e (1 - theta_e)^2 <= tau,
// solved by a log-barrier Newton method.
struct SplitProblem {
  std::size_t n = 0;  // entries
  std::vector<double> w;
  std::vector<std::size_t> row_of, col_of;          // constraint index per entry
  std::vector<std::vector<std::size_t>> members;    // entries per constraint
  std::vector<bool> is_row;

  double load(std::size_t c, const Eigen::VectorXd& th) const {
    double s = 0.0;
    for (std::size_t e : members[c]) {
      double x = is_row[c] ? th[e] : 1.0 - th[e];
      s += w[e] * x * x;
    }
    return s;
  }

  bool slacks(const Eigen::VectorXd& z, std::vector<double>& r) const {
    double tau = z[static_cast<Eigen::Index>(n)];
    r.resize(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
      r[c] = tau - load(c, z);
      if (!(r[c] > 0.0)) return false;
    }
    return true;
  }
};

}  // namespace

LineConstants split_constants(const Window& w, const std::vector<cplx>& psi1, const std::vector<cplx>& psi2) {
  if (psi1.size() != w.entries.size() || psi2.size() != w.entries.size())
    fail(ErrorCode::InvalidInput, "split arrays differ from the entry count");
  std::vector<double> r(w.num_rows(), 0.0), c(w.num_cols(), 0.0);
  for (std::size_t k = 0; k < w.entries.size(); ++k) {
    r[w.entries[k].row] += std::norm(psi1[k]);
    c[w.entries[k].col] += std::norm(psi2[k]);
  }
  double r1 = r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
  double r2 = c.empty() ? 0.0 : *std::max_element(c.begin(), c.end());
  return {std::sqrt(r1), std::sqrt(r2)};
}

SplitCertificate min_split(const Window& win, const SplitSettings& settings) {
  SplitCertificate cert;
  cert.window_id = window_id(win);
  cert.parameters = {{"method", "log-barrier-newton"}, {"tolerance", settings.tolerance}};
  std::size_t n = win.entries.size();
  if (n == 0) return cert;

  SplitProblem p;
  p.n = n;
  p.w.resize(n);
  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::norm(win.entries[k].weight));
  for (std::size_t k = 0; k < n; ++k) p.w[k] = std::norm(win.entries[k].weight) / scale;
  std::vector<std::ptrdiff_t> rid(win.num_rows(), -1), cid(win.num_cols(), -1);
  p.row_of.resize(n);
  p.col_of.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto& rr = rid[win.entries[k].row];
    if (rr < 0) {
      rr = static_cast<std::ptrdiff_t>(p.members.size());
      p.members.emplace_back();
      p.is_row.push_back(true);
    }
    p.row_of[k] = static_cast<std::size_t>(rr);
    p.members[p.row_of[k]].push_back(k);
  }
  for (std::size_t k = 0; k < n; ++k) {
    auto& cc = cid[win.entries[k].col];
    if (cc < 0) {
      cc = static_cast<std::ptrdiff_t>(p.members.size());
      p.members.emplace_back();
      p.is_row.push_back(false);
    }
    p.col_of[k] = static_cast<std::size_t>(cc);
    p.members[p.col_of[k]].push_back(k);
  }
  std::size_t m = p.members.size();
  Eigen::Index N = static_cast<Eigen::Index>(n + 1);

  Eigen::VectorXd z = Eigen::VectorXd::Constant(N, 0.5);
  double maxload = 0.0;
  for (std::size_t c = 0; c < m; ++c) maxload = std::max(maxload, p.load(c, z));
  z[N - 1] = 1.5 * maxload + 1e-3;
  double t = static_cast<double>(m) / z[N - 1];

  std::vector<double> r;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool pattern_ready = false;
  int steps = 0;
  double lower = 0.0;
  while (true) {
    // Centering by damped Newton.
    while (true) {
      if (++steps > settings.max_newton_steps)
        fail(ErrorCode::NonConvergence, "split barrier method did not converge",
             {{"steps", steps}, {"t", t}, {"tau", z[N - 1] * scale}, {"gap", static_cast<double>(m) / t * scale}});
      p.slacks(z, r);
      Eigen::VectorXd g = Eigen::VectorXd::Zero(N);
      g[N - 1] = t;
      trip.clear();
      double htt = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        double inv_r = 1.0 / r[c], inv_r2 = inv_r * inv_r;
        const auto& mem = p.members[c];
        for (std::size_t a = 0; a < mem.size(); ++a) {
          std::size_t e = mem[a];
          double x = p.is_row[c] ? z[static_cast<Eigen::Index>(e)] : 1.0 - z[static_cast<Eigen::Index>(e)];
          double ga = p.is_row[c] ? 2 * p.w[e] * x : -2 * p.w[e] * x;
          g[static_cast<Eigen::Index>(e)] += ga * inv_r;
          trip.emplace_back(static_cast<int>(e), static_cast<int>(e), 2 * p.w[e] * inv_r);
          for (std::size_t b = 0; b < mem.size(); ++b) {
            std::size_t f = mem[b];
            double y = p.is_row[c] ? z[static_cast<Eigen::Index>(f)] : 1.0 - z[static_cast<Eigen::Index>(f)];
            double gb = p.is_row[c] ? 2 * p.w[f] * y : -2 * p.w[f] * y;
            trip.emplace_back(static_cast<int>(e), static_cast<int>(f), ga * gb * inv_r2);
          }
          trip.emplace_back(static_cast<int>(e), static_cast<int>(N - 1), -ga * inv_r2);
          trip.emplace_back(static_cast<int>(N - 1), static_cast<int>(e), -ga * inv_r2);
        }
        g[N - 1] -= inv_r;
        htt += inv_r2;
      }
      trip.emplace_back(static_cast<int>(N - 1), static_cast<int>(N - 1), htt);
      Eigen::SparseMatrix<double> H(N, N);
      H.setFromTriplets(trip.begin(), trip.end());
      if (!pattern_ready) {
        ldlt.analyzePattern(H);
        pattern_ready = true;
      }
      ldlt.factorize(H);
      if (ldlt.info() != Eigen::Success)
        fail(ErrorCode::NonConvergence, "split Newton system is singular", {{"steps", steps}});
      Eigen::VectorXd dz = ldlt.solve(-g);
      double dec2 = -g.dot(dz);
      if (dec2 / 2 < 1e-11 ) break;
      // Barrier change measured relative to the current slacks; the absolute
      // barrier value is too large to resolve small decrements late in the run.
      p.slacks(z, r);
      std::vector<double> r0 = r;
      double step = 1.0;
      while (true) {
        Eigen::VectorXd trial = z + step * dz;
        if (p.slacks(trial, r)) {
          double delta = t * step * dz[N - 1];
          for (std::size_t c = 0; c < m; ++c) delta -= std::log1p((r[c] - r0[c]) / r0[c]);
          if (delta <= -0.25 * step * dec2) {
            z = trial;
            break;
          }
        }
        step *= 0.5;
        if (step < 1e-14) break;
      }
      if (step < 1e-14) break;
    }
    // Dual point from the barrier multipliers.
    p.slacks(z, r);
    std::vector<double> lam(m);
    double total = 0.0;
    for (std::size_t c = 0; c < m; ++c) total += (lam[c] = 1.0 / r[c]);
    lower = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      double a = lam[p.row_of[e]] / total, b = lam[p.col_of[e]] / total;
      lower += p.w[e] * a * b / (a + b);
    }
    double tau = z[N - 1];
    if (tau - lower <= settings.tolerance * std::max(tau, 1e-300)) break;
    t *= 10.0;
  }

  cert.psi1.resize(n);
  cert.psi2.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double th = std::clamp(z[static_cast<Eigen::Index>(k)], 0.0, 1.0);
    cert.psi1[k] = th * win.entries[k].weight;
    cert.psi2[k] = win.entries[k].weight - cert.psi1[k];
  }
  LineConstants kc = split_constants(win, cert.psi1, cert.psi2);
  cert.r1 = kc.c1;
  cert.r2 = kc.c2;
  cert.value = std::max(kc.c1, kc.c2);
  for (std::size_t k = 0; k < n; ++k)
    cert.residual = std::max(cert.residual, std::abs(win.entries[k].weight - cert.psi1[k] - cert.psi2[k]));
  cert.lower_bound = std::min(cert.value, std::sqrt(lower * scale));
  cert.iterations = steps;
  return cert;
}

Verification verify_certificate(const SplitCertificate& cert, const Window& w, double tol) {
  std::string id = window_id(w);
  if (id != cert.window_id)
    fail(ErrorCode::DanglingReference, "certificate refers to a different window",
         {{"certificate_window", cert.window_id}, {"available_window", id}});
  Verification v;
  if (cert.psi1.size() != w.entries.size() || cert.psi2.size() != w.entries.size()) {
    v.check(false, "split arrays differ from the entry count");
    return v;
  }
  LineConstants k = split_constants(w, cert.psi1, cert.psi2);
  double residual = 0.0;
  for (std::size_t e = 0; e < w.entries.size(); ++e)
    residual = std::max(residual, std::abs(w.entries[e].weight - cert.psi1[e] - cert.psi2[e]));
  double value = std::max(k.c1, k.c2);
  v.recomputed = {{"r1", k.c1}, {"r2", k.c2}, {"value", value}, {"residual", residual}};
  auto close = [&](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
  v.check(close(cert.r1, k.c1), "R1 stored " + json(cert.r1).dump() + " recomputed " + json(k.c1).dump());
  v.check(close(cert.r2, k.c2), "R2 stored " + json(cert.r2).dump() + " recomputed " + json(k.c2).dump());
  v.check(close(cert.value, value), "value stored " + json(cert.value).dump() + " recomputed " + json(value).dump());
  v.check(residual <= 1e-9, "residual " + json(residual).dump() + " exceeds 1e-9");
  v.check(close(cert.residual, residual) || std::abs(cert.residual - residual) <= 1e-12,
          "residual stored " + json(cert.residual).dump() + " recomputed " + json(residual).dump());
  v.check(cert.lower_bound <= value * (1 + 1e-9) + 1e-12, "lower bound exceeds the achieved value");
  return v;
}

}  // namespace lacuna
