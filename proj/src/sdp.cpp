#include "lacuna/sdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "lacuna/errors.hpp"

namespace lacuna {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Coef {
  Index i, j;
  double v;
};

// One equality constraint <A_k, X> + a_k . x = b_k; A_k stored with both
// symmetric positions listed.
struct Constraint {
  std::array<Coef, 4> sdp;
  int nsdp = 0;
  std::array<std::pair<Index, double>, 2> lp;
  int nlp = 0;
  double b = 0.0;
};

struct Direction {
  MatrixXd dX, dZ;
  VectorXd dx, dz, dy;
};

class Gamma2Ipm {
 public:
  Gamma2Ipm(const Eigen::MatrixXcd& phi, const SdpSettings& settings) : st_(settings) {
    S_ = phi.rows();
    T_ = phi.cols();
    n_ = S_ + T_;
    N_ = 2 * n_;
    L_ = n_ + 1;
    for (Index s = 0; s < S_; ++s)
      for (Index t = 0; t < T_; ++t) {
        Index a = s, b = S_ + t;
        Constraint re;
        re.sdp = {Coef{a, b, 0.25}, Coef{b, a, 0.25}, Coef{n_ + a, n_ + b, 0.25}, Coef{n_ + b, n_ + a, 0.25}};
        re.nsdp = 4;
        re.b = phi(s, t).real();
        cons_.push_back(re);
        Constraint im;
        im.sdp = {Coef{n_ + a, b, 0.25}, Coef{b, n_ + a, 0.25}, Coef{a, n_ + b, -0.25}, Coef{n_ + b, a, -0.25}};
        im.nsdp = 4;
        im.b = phi(s, t).imag();
        cons_.push_back(im);
      }
    for (Index i = 0; i < n_; ++i) {
      Constraint d;
      d.sdp[0] = {i, i, 0.5};
      d.sdp[1] = {n_ + i, n_ + i, 0.5};
      d.nsdp = 2;
      d.lp[0] = {i, 1.0};
      d.lp[1] = {n_, -1.0};
      d.nlp = 2;
      cons_.push_back(d);
    }
    m_ = static_cast<Index>(cons_.size());
    b_.resize(m_);
    for (Index k = 0; k < m_; ++k) b_[k] = cons_[static_cast<std::size_t>(k)].b;
    c_ = VectorXd::Zero(L_);
    c_[n_] = 1.0;
  }

  SdpSolution run() {
    double xi = std::max(10.0, std::sqrt(static_cast<double>(N_)));
    MatrixXd X = xi * MatrixXd::Identity(N_, N_), Z = xi * MatrixXd::Identity(N_, N_);
    VectorXd x = VectorXd::Constant(L_, xi), z = VectorXd::Constant(L_, xi), y = VectorXd::Zero(m_);
    double nu = static_cast<double>(N_ + L_);
    double bnorm = b_.norm();
    SdpSolution sol;
    SdpResiduals res;
    int it = 0;
    for (;; ++it) {
      VectorXd rp = b_ - apply(X, x);
      MatrixXd Rd;
      VectorXd rd;
      adjoint(y, Rd, rd);
      Rd = -Z - Rd;
      rd = c_ - z - rd;
      double pobj = x[n_], dobj = b_.dot(y);
      res.primal = rp.norm() / (1.0 + bnorm);
      res.dual = std::sqrt(Rd.squaredNorm() + rd.squaredNorm()) / 2.0;
      res.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      double max_rp = rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0;
      if (res.primal <= st_.tolerance && res.dual <= st_.tolerance && res.gap <= st_.tolerance &&
          max_rp <= st_.tolerance)
        break;
      if (it >= st_.max_iterations)
        fail(ErrorCode::NonConvergence, "gamma2 SDP did not converge",
             {{"iterations", it}, {"primal", res.primal}, {"dual", res.dual}, {"gap", res.gap}});

      double mu = ((X.cwiseProduct(Z)).sum() + x.dot(z)) / nu;
      Eigen::LLT<MatrixXd> zc(Z);
      MatrixXd Zinv;
      if (zc.info() == Eigen::Success) {
        Zinv = zc.solve(MatrixXd::Identity(N_, N_));
      } else {
        // numerically singular near the optimum
        Eigen::SelfAdjointEigenSolver<MatrixXd> ez(Z);
        VectorXd ev = ez.eigenvalues();
        double floor = 1e-15 * std::max(1.0, ev.cwiseAbs().maxCoeff());
        if (ev.minCoeff() < -1e3 * floor)
          fail(ErrorCode::NonConvergence, "dual iterate lost definiteness", {{"iteration", it}, {"min_eig", ev.minCoeff()}});
        ev = ev.cwiseMax(floor);
        Zinv = ez.eigenvectors() * ev.cwiseInverse().asDiagonal() * ez.eigenvectors().transpose();
      }
      Zinv = 0.5 * (Zinv + Zinv.transpose()).eval();
      MatrixXd M = schur(X, Zinv, x, z);
      Eigen::LLT<MatrixXd> mc(M);
      if (mc.info() != Eigen::Success) {
        M.diagonal().array() += 1e-14 * M.diagonal().maxCoeff();
        mc.compute(M);
        if (mc.info() != Eigen::Success)
          fail(ErrorCode::NonConvergence, "Schur complement lost definiteness", {{"iteration", it}});
      }

      MatrixXd XZ = X * Z;
      Direction pred = direction(mc, X, x, z, Zinv, rp, Rd, rd, -XZ, -x.cwiseProduct(z));
      double ap = std::min(1.0, max_step(X, pred.dX, x, pred.dx));
      double ad = std::min(1.0, max_step(Z, pred.dZ, z, pred.dz));
      double mu_aff = (((X + ap * pred.dX).cwiseProduct(Z + ad * pred.dZ)).sum() +
                       (x + ap * pred.dx).dot(z + ad * pred.dz)) /
                      nu;
      double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

      MatrixXd Rc = sigma * mu * MatrixXd::Identity(N_, N_) - XZ - pred.dX * pred.dZ;
      VectorXd rc = (sigma * mu - (x.cwiseProduct(z)).array() - (pred.dx.cwiseProduct(pred.dz)).array()).matrix();
      Direction d = direction(mc, X, x, z, Zinv, rp, Rd, rd, Rc, rc);
      ap = std::min(1.0, st_.step_fraction * max_step(X, d.dX, x, d.dx));
      ad = std::min(1.0, st_.step_fraction * max_step(Z, d.dZ, z, d.dz));
      X += ap * d.dX;
      x += ap * d.dx;
      y += ad * d.dy;
      Z += ad * d.dZ;
      z += ad * d.dz;
      X = 0.5 * (X + X.transpose()).eval();
      Z = 0.5 * (Z + Z.transpose()).eval();
    }
    sol.iterations = it;
    sol.primal_objective = x[n_];
    sol.dual_objective = b_.dot(y);
    MatrixXd X11 = X.topLeftCorner(n_, n_), X22 = X.bottomRightCorner(n_, n_);
    MatrixXd X12 = X.topRightCorner(n_, n_), X21 = X.bottomLeftCorner(n_, n_);
    sol.block.resize(n_, n_);
    sol.block.real() = 0.5 * (X11 + X22);
    sol.block.imag() = 0.5 * (X21 - X12);
    Eigen::MatrixXcd h = 0.5 * (sol.block + sol.block.adjoint());
    sol.block = h;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sol.block, Eigen::EigenvaluesOnly);
    res.psd_min_eig = es.eigenvalues().minCoeff();
    res.diag_slack = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n_; ++i) res.diag_slack = std::min(res.diag_slack, sol.primal_objective - sol.block(i, i).real());
    sol.residuals = res;
    return sol;
  }

 private:
  VectorXd apply(const MatrixXd& X, const VectorXd& x) const {
    VectorXd out(m_);
    for (Index k = 0; k < m_; ++k) {
      const Constraint& c = cons_[static_cast<std::size_t>(k)];
      double s = 0.0;
      for (int q = 0; q < c.nsdp; ++q) s += c.sdp[static_cast<std::size_t>(q)].v * X(c.sdp[static_cast<std::size_t>(q)].i, c.sdp[static_cast<std::size_t>(q)].j);
      for (int q = 0; q < c.nlp; ++q) s += c.lp[static_cast<std::size_t>(q)].second * x[c.lp[static_cast<std::size_t>(q)].first];
      out[k] = s;
    }
    return out;
  }

  void adjoint(const VectorXd& y, MatrixXd& mat, VectorXd& vec) const {
    mat = MatrixXd::Zero(N_, N_);
    vec = VectorXd::Zero(L_);
    for (Index k = 0; k < m_; ++k) {
      const Constraint& c = cons_[static_cast<std::size_t>(k)];
      for (int q = 0; q < c.nsdp; ++q) {
        const Coef& e = c.sdp[static_cast<std::size_t>(q)];
        mat(e.i, e.j) += y[k] * e.v;
      }
      for (int q = 0; q < c.nlp; ++q) vec[c.lp[static_cast<std::size_t>(q)].first] += y[k] * c.lp[static_cast<std::size_t>(q)].second;
    }
  }

  // M_kl = tr(A_k X A_l Z^-1) + sum_j a_kj a_lj x_j / z_j
  MatrixXd schur(const MatrixXd& X, const MatrixXd& Zinv, const VectorXd& x, const VectorXd& z) const {
    MatrixXd M(m_, m_);
    VectorXd ratio = x.cwiseQuotient(z);
    for (Index k = 0; k < m_; ++k) {
      const Constraint& ck = cons_[static_cast<std::size_t>(k)];
      for (Index l = k; l < m_; ++l) {
        const Constraint& cl = cons_[static_cast<std::size_t>(l)];
        double s = 0.0;
        for (int p = 0; p < ck.nsdp; ++p) {
          const Coef& a = ck.sdp[static_cast<std::size_t>(p)];
          for (int q = 0; q < cl.nsdp; ++q) {
            const Coef& b = cl.sdp[static_cast<std::size_t>(q)];
            s += a.v * b.v * X(a.j, b.i) * Zinv(b.j, a.i);
          }
        }
        for (int p = 0; p < ck.nlp; ++p)
          for (int q = 0; q < cl.nlp; ++q)
            if (ck.lp[static_cast<std::size_t>(p)].first == cl.lp[static_cast<std::size_t>(q)].first)
              s += ck.lp[static_cast<std::size_t>(p)].second * cl.lp[static_cast<std::size_t>(q)].second *
                   ratio[ck.lp[static_cast<std::size_t>(p)].first];
        M(k, l) = s;
        M(l, k) = s;
      }
    }
    return M;
  }

  Direction direction(const Eigen::LLT<MatrixXd>& mc, const MatrixXd& X, const VectorXd& x, const VectorXd& z,
                      const MatrixXd& Zinv, const VectorXd& rp, const MatrixXd& Rd, const VectorXd& rd,
                      const MatrixXd& Rc, const VectorXd& rc) const {
    Direction d;
    VectorXd rhs = rp - apply(Rc * Zinv, rc.cwiseQuotient(z)) + apply(X * Rd * Zinv, x.cwiseProduct(rd).cwiseQuotient(z));
    d.dy = mc.solve(rhs);
    MatrixXd aty;
    VectorXd atyl;
    adjoint(d.dy, aty, atyl);
    d.dZ = Rd - aty;
    d.dz = rd - atyl;
    d.dX = (Rc - X * d.dZ) * Zinv;
    d.dX = 0.5 * (d.dX + d.dX.transpose()).eval();
    d.dx = (rc - x.cwiseProduct(d.dz)).cwiseQuotient(z);
    return d;
  }

  static double max_step(const MatrixXd& X, const MatrixXd& dX, const VectorXd& x, const VectorXd& dx) {
    double a = std::numeric_limits<double>::infinity();
    Eigen::LLT<MatrixXd> lc(X);
    if (lc.info() != Eigen::Success) return 0.0;
    MatrixXd W = lc.matrixL().solve(dX);
    W = lc.matrixL().solve(W.transpose()).transpose().eval();
    W = 0.5 * (W + W.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(W, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0) a = -1.0 / lmin;
    for (Index j = 0; j < x.size(); ++j)
      if (dx[j] < 0) a = std::min(a, -x[j] / dx[j]);
    return a;
  }

  SdpSettings st_;
  Index S_ = 0, T_ = 0, n_ = 0, N_ = 0, L_ = 0, m_ = 0;
  std::vector<Constraint> cons_;
  VectorXd b_, c_;
};

}  // namespace

SdpSolution solve_gamma2_sdp(const Eigen::MatrixXcd& phi, const SdpSettings& settings) {
  if (!(settings.tolerance > 0)) fail(ErrorCode::InvalidInput, "SDP tolerance must be positive");
  double alpha = phi.size() ? phi.cwiseAbs().maxCoeff() : 0.0;
  if (alpha == 0.0) {
    SdpSolution s;
    s.block = Eigen::MatrixXcd::Zero(phi.rows() + phi.cols(), phi.rows() + phi.cols());
    return s;
  }
  Gamma2Ipm ipm(phi / alpha, settings);
  SdpSolution s = ipm.run();
  s.primal_objective *= alpha;
  s.dual_objective *= alpha;
  s.block *= alpha;
  s.residuals.psd_min_eig *= alpha;
  s.residuals.diag_slack *= alpha;
  return s;
}

}  // namespace lacuna
