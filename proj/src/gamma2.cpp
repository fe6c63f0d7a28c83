#include "lacuna/gamma2.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lacuna/errors.hpp"
#include "lacuna/parallel.hpp"
#include "lacuna/rng.hpp"
#include "lacuna/serialize.hpp"

namespace lacuna {
namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct BlockFactor {
  MatrixXcd x, y;
};

void balance(MatrixXcd& x, MatrixXcd& y) {
  double rx = x.size() ? x.rowwise().norm().maxCoeff() : 0.0;
  double ry = y.size() ? y.rowwise().norm().maxCoeff() : 0.0;
  if (rx > 0 && ry > 0) {
    double c = std::sqrt(ry / rx);
    x *= c;
    y /= c;
  }
}

// Connected components of the bipartite support graph; rows are 0..S-1 and
// columns S..S+T-1. Lines without entries are left out.
std::vector<std::pair<std::vector<Index>, std::vector<Index>>> components(const MatrixXcd& phi) {
  Index S = phi.rows(), T = phi.cols();
  std::vector<Index> parent(static_cast<std::size_t>(S + T));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Index v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  std::vector<bool> used(static_cast<std::size_t>(S + T), false);
  for (Index s = 0; s < S; ++s)
    for (Index t = 0; t < T; ++t)
      if (phi(s, t) != cplx(0, 0)) {
        used[static_cast<std::size_t>(s)] = used[static_cast<std::size_t>(S + t)] = true;
        Index a = find(s), b = find(S + t);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
  std::vector<std::pair<std::vector<Index>, std::vector<Index>>> out;
  std::unordered_map<Index, std::size_t> slot;
  for (Index v = 0; v < S + T; ++v) {
    if (!used[static_cast<std::size_t>(v)]) continue;
    Index r = find(v);
    auto it = slot.find(r);
    if (it == slot.end()) {
      it = slot.emplace(r, out.size()).first;
      out.emplace_back();
    }
    if (v < S)
      out[it->second].first.push_back(v);
    else
      out[it->second].second.push_back(v - S);
  }
  return out;
}

BlockFactor factor_block(const MatrixXcd& block, Index S) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(block);
  const VectorXd& ev = es.eigenvalues();
  double floor = 1e-10;
  std::vector<Index> keep;
  for (Index i = ev.size() - 1; i >= 0; --i)
    if (ev[i] > floor) keep.push_back(i);
  if (keep.empty()) keep.push_back(ev.size() - 1);
  MatrixXcd V(block.rows(), static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    V.col(static_cast<Index>(k)) = es.eigenvectors().col(keep[k]) * std::sqrt(std::max(ev[keep[k]], 0.0));
  BlockFactor f{V.topRows(S), V.bottomRows(block.rows() - S)};
  balance(f.x, f.y);
  return f;
}

}  // namespace

Gamma2Certificate gamma2(const MatrixXcd& phi, const SdpSettings& settings) {
  if (phi.rows() > settings.max_dim || phi.cols() > settings.max_dim)
    fail(ErrorCode::LimitExceeded, "matrix exceeds the gamma2 dimension cap",
         {{"rows", phi.rows()}, {"cols", phi.cols()}, {"cap", settings.max_dim}});
  if (!phi.allFinite()) fail(ErrorCode::InvalidInput, "matrix has non-finite entries");
  Gamma2Certificate c;
  c.matrix = phi;
  c.matrix_id = matrix_id(phi);
  c.settings = settings;
  c.residuals.diag_slack = 0.0;
  Index S = phi.rows(), T = phi.cols();

  std::vector<std::pair<std::vector<Index>, std::vector<Index>>> comps;
  if (settings.decompose) {
    comps = components(phi);
  } else if (phi.cwiseAbs().maxCoeff() > 0) {
    comps.emplace_back();
    for (Index s = 0; s < S; ++s) comps.back().first.push_back(s);
    for (Index t = 0; t < T; ++t) comps.back().second.push_back(t);
  }
  c.components = comps.size();
  std::vector<BlockFactor> factors;
  bool first = true;
  for (const auto& [rows, cols] : comps) {
    MatrixXcd sub(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) sub(static_cast<Index>(i), static_cast<Index>(j)) = phi(rows[i], cols[j]);
    SdpSolution sol = solve_gamma2_sdp(sub, settings);
    factors.push_back(factor_block(sol.block, sub.rows()));
    c.value = std::max(c.value, sol.primal_objective);
    c.dual_bound = std::max(c.dual_bound, sol.dual_objective);
    c.iterations += sol.iterations;
    auto& r = c.residuals;
    r.primal = std::max(r.primal, sol.residuals.primal);
    r.dual = std::max(r.dual, sol.residuals.dual);
    r.gap = std::max(r.gap, sol.residuals.gap);
    r.psd_min_eig = first ? sol.residuals.psd_min_eig : std::min(r.psd_min_eig, sol.residuals.psd_min_eig);
    r.diag_slack = first ? sol.residuals.diag_slack : std::min(r.diag_slack, sol.residuals.diag_slack);
    first = false;
  }
  Index k = 0;
  for (const auto& f : factors) k += f.x.cols();
  k = std::max<Index>(k, 1);
  c.x = MatrixXcd::Zero(S, k);
  c.y = MatrixXcd::Zero(T, k);
  Index off = 0;
  for (std::size_t q = 0; q < comps.size(); ++q) {
    const auto& f = factors[q];
    for (std::size_t i = 0; i < comps[q].first.size(); ++i) c.x.block(comps[q].first[i], off, 1, f.x.cols()) = f.x.row(static_cast<Index>(i));
    for (std::size_t j = 0; j < comps[q].second.size(); ++j) c.y.block(comps[q].second[j], off, 1, f.y.cols()) = f.y.row(static_cast<Index>(j));
    off += f.x.cols();
  }
  balance(c.x, c.y);
  c.max_row_norm = S ? c.x.rowwise().norm().maxCoeff() : 0.0;
  c.max_col_norm = T ? c.y.rowwise().norm().maxCoeff() : 0.0;
  c.residuals.reconstruction = phi.size() ? (phi - c.x * c.y.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (settings.lower_bound_restarts > 0 && phi.size())
    c.lower_bound = schur_action_lower(phi, settings.lower_bound_restarts, settings.lower_bound_seed).value;
  c.gap = c.value - c.lower_bound;
  return c;
}

LowRankResult lowrank_oracle(const MatrixXcd& phi, const LowRankOptions& opt) {
  LowRankResult out;
  Index S = phi.rows(), T = phi.cols();
  std::vector<Index> rs, cs;
  for (Index s = 0; s < S; ++s)
    if (phi.row(s).cwiseAbs().maxCoeff() > 0) rs.push_back(s);
  for (Index t = 0; t < T; ++t)
    if (phi.col(t).cwiseAbs().maxCoeff() > 0) cs.push_back(t);
  int k = opt.rank.value_or(static_cast<int>(std::min(S, T)));
  if (rs.empty()) {
    out.fit = true;
    out.value = 0.0;
    out.x = MatrixXcd::Zero(S, 1);
    out.y = MatrixXcd::Zero(T, 1);
    return out;
  }
  Index a = static_cast<Index>(rs.size()), b = static_cast<Index>(cs.size());
  MatrixXcd P(a, b);
  for (Index i = 0; i < a; ++i)
    for (Index j = 0; j < b; ++j) P(i, j) = phi(rs[static_cast<std::size_t>(i)], cs[static_cast<std::size_t>(j)]);
  Eigen::JacobiSVD<MatrixXcd> sv0(P);
  const VectorXd& s0 = sv0.singularValues();
  int r = 0;
  for (Index i = 0; i < s0.size(); ++i)
    if (s0[i] > 1e-12 * s0[0]) ++r;
  out.rank = r;
  if (k < r) {
    out.fit = false;
    out.reconstruction = s0[k];
    return out;
  }

  double best = std::numeric_limits<double>::infinity();
  MatrixXcd bx, by;
  for (int restart = 0; restart < std::max(1, opt.restarts); ++restart) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(restart)));
    VectorXd u2(a), v2(b);
    for (Index i = 0; i < a; ++i) u2[i] = restart == 0 ? 1.0 : 0.5 + rng.uniform();
    for (Index j = 0; j < b; ++j) v2[j] = restart == 0 ? 1.0 : 0.5 + rng.uniform();
    u2 /= u2.sum();
    v2 /= v2.sum();
    for (int it = 0; it < opt.max_iterations; ++it) {
      VectorXd u = u2.cwiseSqrt(), v = v2.cwiseSqrt();
      MatrixXcd M = u.asDiagonal() * P * v.asDiagonal();
      Eigen::JacobiSVD<MatrixXcd> sv(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
      VectorXd sig = sv.singularValues().head(r);
      MatrixXcd U = sv.matrixU().leftCols(r), V = sv.matrixV().leftCols(r);
      VectorXd ru = (U.cwiseAbs2() * sig), rv = (V.cwiseAbs2() * sig);
      double trace = sig.sum();
      out.lower = std::max(out.lower, trace);
      double upper = std::sqrt((ru.cwiseQuotient(u2)).maxCoeff() * (rv.cwiseQuotient(v2)).maxCoeff());
      ++out.iterations;
      if (upper < best) {
        VectorXd sq = sig.cwiseSqrt();
        MatrixXcd cx = u.cwiseInverse().asDiagonal() * U * sq.asDiagonal();
        MatrixXcd cy = v.cwiseInverse().asDiagonal() * V * sq.asDiagonal();
        // tiny weights amplify rounding; keep only factorizations that reproduce P
        if ((P - cx * cy.adjoint()).cwiseAbs().maxCoeff() <= 1e-9 * (1 + upper)) {
          best = upper;
          bx = std::move(cx);
          by = std::move(cy);
        }
      }
      if (upper - trace <= 1e-13 * upper) break;
      u2 = ru / trace;
      v2 = rv / trace;
      for (Index i = 0; i < a; ++i) u2[i] = std::max(u2[i], 1e-12);
      for (Index j = 0; j < b; ++j) v2[j] = std::max(v2[j], 1e-12);
      u2 /= u2.sum();
      v2 /= v2.sum();
    }
  }
  if (bx.size() == 0) {
    out.fit = false;
    return out;
  }
  out.x = MatrixXcd::Zero(S, r);
  out.y = MatrixXcd::Zero(T, r);
  for (Index i = 0; i < a; ++i) out.x.row(rs[static_cast<std::size_t>(i)]) = bx.row(i);
  for (Index j = 0; j < b; ++j) out.y.row(cs[static_cast<std::size_t>(j)]) = by.row(j);
  balance(out.x, out.y);
  out.value = out.x.rowwise().norm().maxCoeff() * out.y.rowwise().norm().maxCoeff();
  out.reconstruction = (phi - out.x * out.y.adjoint()).cwiseAbs().maxCoeff();
  out.fit = true;
  return out;
}

SchurLowerResult schur_action_lower(const MatrixXcd& phi, int restarts, std::uint64_t seed, int iterations) {
  SchurLowerResult best;
  Index S = phi.rows(), T = phi.cols();
  if (S == 0 || T == 0) return best;
  for (int restart = 0; restart < std::max(1, restarts); ++restart) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
    VectorXcd u(T), v(S);
    for (Index t = 0; t < T; ++t) u[t] = restart == 0 ? cplx(1, 0) : rng.complex_normal();
    for (Index s = 0; s < S; ++s) v[s] = restart == 0 ? cplx(1, 0) : rng.complex_normal();
    u.normalize();
    v.normalize();
    double last = -1.0;
    for (int it = 0; it < iterations; ++it) {
      MatrixXcd B = v.conjugate().asDiagonal() * phi * u.asDiagonal();
      Eigen::JacobiSVD<MatrixXcd> sb(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
      MatrixXcd A = (sb.matrixU() * sb.matrixV().adjoint()).conjugate();
      MatrixXcd P = phi.cwiseProduct(A);
      Eigen::JacobiSVD<MatrixXcd> sp(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
      double anorm = Eigen::JacobiSVD<MatrixXcd>(A).singularValues()[0];
      double value = anorm > 0 ? sp.singularValues()[0] / anorm : 0.0;
      ++best.iterations;
      if (value > best.value) {
        best.value = value;
        best.a = A;
      }
      v = sp.matrixU().col(0);
      u = sp.matrixV().col(0);
      if (value <= last * (1 + 1e-15)) break;
      last = value;
    }
  }
  return best;
}

const char* sign_kind_name(SignKind k) { return k == SignKind::Signs ? "signs" : "phases"; }

SignKind parse_sign_kind(const std::string& s) {
  if (s == "signs") return SignKind::Signs;
  if (s == "phases") return SignKind::Phases;
  fail(ErrorCode::InvalidInput, "unknown sign kind '" + s + "'", {{"expected", "signs or phases"}});
}

MatrixFamily MatrixFamily::entrywise(const Window& w) {
  MatrixFamily f;
  f.rows = static_cast<Index>(w.num_rows());
  f.cols = static_cast<Index>(w.num_cols());
  f.grouping = "entry";
  for (const auto& e : w.entries) f.members.push_back({e});
  return f;
}

MatrixFamily MatrixFamily::by_group_element(const Window& w) {
  ProductKind p = ProductKind::parse(w.provenance.product);
  GroupSpec g = w.rows.group().is_numeric() ? GroupSpec::integers() : w.rows.group();
  MatrixFamily f;
  f.rows = static_cast<Index>(w.num_rows());
  f.cols = static_cast<Index>(w.num_cols());
  f.grouping = "group-element";
  std::unordered_map<Element, std::size_t, ElementHash> slot;
  for (const auto& e : w.entries) {
    const Element& s = w.rows[e.row];
    const Element& t = w.cols[e.col];
    Element x = p.tag == ProductTag::Product           ? mul(g, s, t)
                : p.tag == ProductTag::ProductInvRight ? mul(g, s, inv(g, t))
                                                       : mul(g, inv(g, s), t);
    auto [it, fresh] = slot.emplace(x, f.members.size());
    if (fresh) f.members.emplace_back();
    f.members[it->second].push_back(e);
  }
  return f;
}

MatrixFamily MatrixFamily::single(const MatrixXcd& m) {
  Window w = window_from_dense(m);
  MatrixFamily f;
  f.rows = m.rows();
  f.cols = m.cols();
  f.grouping = "single";
  f.members.push_back(w.entries);
  return f;
}

MatrixXcd MatrixFamily::combine(const std::vector<cplx>& z) const {
  MatrixXcd m = MatrixXcd::Zero(rows, cols);
  for (std::size_t k = 0; k < members.size(); ++k)
    for (const auto& e : members[k]) m(e.row, e.col) += z[k] * e.weight;
  return m;
}

SignAverage sign_average_gamma2(const MatrixFamily& family, std::size_t trials, std::uint64_t seed, SignKind kind,
                                const SdpSettings& settings, unsigned threads) {
  if (trials < 1) fail(ErrorCode::InvalidInput, "trials must be >= 1");
  SignAverage out;
  out.trials = trials;
  out.kind = kind;
  out.seed = seed;
  out.grouping = family.grouping;
  out.values.assign(trials, std::nullopt);
  SdpSettings local = settings;
  local.lower_bound_restarts = 0;
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    std::vector<cplx> z(family.members.size());
    for (auto& zk : z) zk = kind == SignKind::Signs ? cplx(rng.sign(), 0.0) : rng.phase();
    try {
      out.values[i] = gamma2(family.combine(z), local).value;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonConvergence) throw;
    }
  });
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& v : out.values)
    if (v) {
      sum += *v;
      ++n;
    }
  out.failures = trials - n;
  if (n == 0) fail(ErrorCode::NonConvergence, "every sign trial failed", {{"trials", trials}});
  out.mean = sum / static_cast<double>(n);
  for (const auto& v : out.values)
    if (v) sq += (*v - out.mean) * (*v - out.mean);
  out.stderr_ = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return out;
}

Verification verify_certificate(const Gamma2Certificate& c, double tol) {
  Verification v;
  v.check(matrix_id(c.matrix) == c.matrix_id, "matrix id does not match the embedded matrix");
  bool shapes = c.x.rows() == c.matrix.rows() && c.y.rows() == c.matrix.cols() && c.x.cols() == c.y.cols();
  v.check(shapes, "witness shapes do not match the matrix");
  if (!shapes) return v;
  double recon = c.matrix.size() ? (c.matrix - c.x * c.y.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  double rx = c.x.rows() ? c.x.rowwise().norm().maxCoeff() : 0.0;
  double ry = c.y.rows() ? c.y.rowwise().norm().maxCoeff() : 0.0;
  v.recomputed = {{"reconstruction", recon}, {"max_row_norm", rx}, {"max_col_norm", ry}, {"product", rx * ry}};
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  v.check(recon <= tol * (1 + c.value), "reconstruction error " + json(recon).dump() + " exceeds tolerance");
  v.check(rx * ry <= c.value * (1 + tol) + 1e-12, "witness norms exceed the stated value");
  v.check(close(c.max_row_norm, rx), "max row norm stored " + json(c.max_row_norm).dump() + " recomputed " + json(rx).dump());
  v.check(close(c.max_col_norm, ry), "max col norm stored " + json(c.max_col_norm).dump() + " recomputed " + json(ry).dump());
  v.check(c.lower_bound <= c.value + tol, "lower bound exceeds the value");
  v.check(close(c.gap, c.value - c.lower_bound), "gap does not equal value minus lower bound");
  v.check(c.value + tol >= (c.matrix.size() ? c.matrix.cwiseAbs().maxCoeff() : 0.0), "value below the largest entry modulus");
  return v;
}

}  // namespace lacuna
