#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sdg/krylov.hpp"

namespace sdg {

namespace {

using Clock = std::chrono::steady_clock;
using Mat = Eigen::MatrixXd;

double dot(const Mat& x, const Mat& y) { return x.cwiseProduct(y).sum(); }

struct DenseCtx {
  const KroneckerOperator& op;
  const Preconditioner& pc;
  Mat A(const Mat& x) const { return op.apply_dense(x); }
  Mat Pinv(const Mat& x) const { return pc.apply_inverse_dense(x); }
};

DenseSolveResult finish(Mat U, const DenseCtx& ctx, const Mat& F, Termination reason,
                        double iterations, std::vector<HistoryEntry> history,
                        Clock::time_point t0, double norm_f) {
  DenseSolveResult res;
  res.report.iterations = iterations;
  res.report.final_rank = static_cast<int>(std::min(U.rows(), U.cols()));
  res.report.relative_residual = norm_f > 0.0 ? (F - ctx.A(U)).norm() / norm_f : 0.0;
  res.report.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  res.report.memory_kb = 8.0 * U.rows() * U.cols() / 1024.0;
  res.report.history = std::move(history);
  res.report.reason = reason;
  res.solution = std::move(U);
  return res;
}

DenseSolveResult dense_cg(const DenseCtx& ctx, const Mat& F, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  const double norm_f = F.norm();
  Mat U = Mat::Zero(F.rows(), F.cols());
  if (norm_f == 0.0) return finish(U, ctx, F, Termination::converged, 0, {}, t0, norm_f);
  Mat R = F;
  Mat Z = ctx.Pinv(R);
  Mat P = Z;
  double rz = dot(R, Z);
  std::vector<HistoryEntry> history;
  int it = 0;
  Termination reason = Termination::maxit;
  while (true) {
    if (R.norm() / norm_f <= cfg.eps_tol) {
      reason = Termination::converged;
      break;
    }
    if (it >= cfg.maxit) break;
    Mat Q = ctx.A(P);
    double pq = dot(P, Q);
    if (pq == 0.0 || !std::isfinite(pq)) {
      reason = Termination::breakdown;
      break;
    }
    double gamma = rz / pq;
    U += gamma * P;
    R -= gamma * Q;
    Z = ctx.Pinv(R);
    double rz_next = dot(R, Z);
    double beta = rz == 0.0 ? 0.0 : rz_next / rz;
    rz = rz_next;
    P = Z + beta * P;
    ++it;
    history.push_back({R.norm() / norm_f, static_cast<int>(std::min(F.rows(), F.cols()))});
  }
  return finish(std::move(U), ctx, F, reason, it, std::move(history), t0, norm_f);
}

DenseSolveResult dense_bicgstab(const DenseCtx& ctx, const Mat& F, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  const double norm_f = F.norm();
  Mat U = Mat::Zero(F.rows(), F.cols());
  if (norm_f == 0.0) return finish(U, ctx, F, Termination::converged, 0, {}, t0, norm_f);
  Mat R = F;
  const Mat Rt = R;
  double rho = dot(Rt, R);
  Mat S = R;
  Mat St = ctx.Pinv(S);
  Mat V = ctx.A(St);
  std::vector<HistoryEntry> history;
  const int rank = static_cast<int>(std::min(F.rows(), F.cols()));
  double it = 0.0;
  Termination reason = Termination::maxit;
  while (true) {
    if (R.norm() / norm_f <= cfg.eps_tol) {
      reason = Termination::converged;
      break;
    }
    if (it >= cfg.maxit) break;
    double den = dot(Rt, V);
    if (den == 0.0 || !std::isfinite(den)) {
      reason = Termination::breakdown;
      break;
    }
    double omega = dot(Rt, R) / den;
    Mat Z = R - omega * V;
    Mat Zt = ctx.Pinv(Z);
    Mat Tk = ctx.A(Zt);
    if (Z.norm() / norm_f <= cfg.eps_tol) {
      U += omega * St;
      it += 0.5;
      history.push_back({Z.norm() / norm_f, rank});
      reason = Termination::converged;
      break;
    }
    double tt = dot(Tk, Tk);
    if (tt == 0.0 || !std::isfinite(tt)) {
      reason = Termination::breakdown;
      break;
    }
    double xi = dot(Tk, Z) / tt;
    U += omega * St + xi * Zt;
    R = F - ctx.A(U);
    it += 1.0;
    history.push_back({R.norm() / norm_f, rank});
    if (R.norm() / norm_f <= cfg.eps_tol) {
      reason = Termination::converged;
      break;
    }
    double rho_next = dot(Rt, R);
    double beta = (rho == 0.0 || xi == 0.0) ? 0.0 : (rho_next / rho) * (omega / xi);
    rho = rho_next;
    if (!std::isfinite(beta)) {
      reason = Termination::breakdown;
      break;
    }
    S = R + beta * (S - xi * V);
    St = ctx.Pinv(S);
    V = ctx.A(St);
  }
  return finish(std::move(U), ctx, F, reason, it, std::move(history), t0, norm_f);
}

DenseSolveResult dense_qmrcgstab(const DenseCtx& ctx, const Mat& F, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  const double norm_f = F.norm();
  Mat U = Mat::Zero(F.rows(), F.cols());
  if (norm_f == 0.0) return finish(U, ctx, F, Termination::converged, 0, {}, t0, norm_f);
  Mat R0 = F;
  Mat Z = ctx.Pinv(R0);
  const Mat Rt0 = R0;
  const double norm_r0 = R0.norm();
  Mat Y = Mat::Zero(F.rows(), F.cols());
  Mat V = Y, D = Y;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double tau = Z.norm(), theta = 0.0, eta = 0.0;
  double tau_t = tau, theta_t = 0.0, eta_t = 0.0;
  std::vector<HistoryEntry> history;
  const int rank = static_cast<int>(std::min(F.rows(), F.cols()));
  double it = 0.0;
  Termination reason = Termination::maxit;
  while (true) {
    if (std::sqrt(it + 1.0) * std::abs(tau_t) / norm_r0 <= cfg.eps_tol) {
      reason = Termination::converged;
      break;
    }
    if (it >= cfg.maxit) break;
    double rho_next = dot(Z, Rt0);
    if (rho == 0.0 || omega == 0.0) {
      reason = Termination::breakdown;
      break;
    }
    double beta = (rho_next / rho) * (alpha / omega);
    Y = Z + beta * (Y - omega * V);
    Mat Yt = ctx.A(Y);
    if (Yt.norm() / norm_f <= cfg.eps_tol) {
      it += 0.5;
      history.push_back({Yt.norm() / norm_f, rank});
      reason = Termination::converged;
      break;
    }
    V = ctx.Pinv(Yt);
    double den = dot(V, Rt0);
    if (den == 0.0 || !std::isfinite(den)) {
      reason = Termination::breakdown;
      break;
    }
    alpha = rho_next / den;
    Mat S = Z - alpha * V;
    theta_t = S.norm() / tau;
    double c = 1.0 / std::sqrt(1.0 + theta_t * theta_t);
    tau_t = tau * theta_t * c;
    eta_t = c * c * alpha;
    Mat Dt = Y + (theta * theta * eta == 0.0 ? 0.0 : theta * theta * eta / alpha) * D;
    Mat Ut = U + eta_t * Dt;
    if (S.norm() / norm_f <= cfg.eps_tol) {
      U = Ut;
      it += 0.5;
      history.push_back({S.norm() / norm_f, rank});
      reason = Termination::converged;
      break;
    }
    Mat St = ctx.A(S);
    Mat Tk = ctx.Pinv(St);
    double tt = dot(Tk, Tk);
    if (tt == 0.0 || !std::isfinite(tt)) {
      reason = Termination::breakdown;
      break;
    }
    omega = dot(S, Tk) / tt;
    if (omega == 0.0) {
      reason = Termination::breakdown;
      break;
    }
    Z = S - omega * Tk;
    theta = Z.norm() / tau_t;
    c = 1.0 / std::sqrt(1.0 + theta * theta);
    tau = tau_t * theta * c;
    eta = c * c * omega;
    D = S + (theta_t * theta_t * eta_t / omega) * Dt;
    U = Ut + eta * D;
    rho = rho_next;
    it += 1.0;
    history.push_back({std::sqrt(it + 1.0) * std::abs(tau_t) / norm_r0, rank});
  }
  return finish(std::move(U), ctx, F, reason, it, std::move(history), t0, norm_f);
}

DenseSolveResult dense_gmres(const DenseCtx& ctx, const Mat& F, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  const double norm_f = F.norm();
  Mat U = Mat::Zero(F.rows(), F.cols());
  if (norm_f == 0.0) return finish(U, ctx, F, Termination::converged, 0, {}, t0, norm_f);
  const double beta0 = norm_f;  // zero initial guess
  std::vector<Mat> basis;
  basis.push_back(F / beta0);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(cfg.maxit + 1, cfg.maxit);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(cfg.maxit + 1);
  xi[0] = beta0;
  Eigen::VectorXd gc = Eigen::VectorXd::Zero(cfg.maxit);
  Eigen::VectorXd gs = Eigen::VectorXd::Zero(cfg.maxit);
  std::vector<HistoryEntry> history;
  const int rank = static_cast<int>(std::min(F.rows(), F.cols()));
  int it = 0;
  Termination reason = Termination::maxit;

  auto assemble = [&](int k) {
    Eigen::VectorXd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(xi.head(k));
    Mat Y = Mat::Zero(F.rows(), F.cols());
    for (int i = 0; i < k; ++i) Y += y[i] * basis[i];
    return Mat(ctx.Pinv(Y));
  };

  for (int k = 1; k <= cfg.maxit; ++k) {
    Mat W = ctx.A(ctx.Pinv(basis[k - 1]));
    for (int i = 1; i <= k; ++i) {
      H(i - 1, k - 1) = dot(W, basis[i - 1]);
      W -= H(i - 1, k - 1) * basis[i - 1];
    }
    H(k, k - 1) = W.norm();
    for (int i = 1; i < k; ++i) {
      double a = H(i - 1, k - 1), b = H(i, k - 1);
      H(i - 1, k - 1) = gc[i - 1] * a + gs[i - 1] * b;
      H(i, k - 1) = -gs[i - 1] * a + gc[i - 1] * b;
    }
    double a = H(k - 1, k - 1), b = H(k, k - 1);
    double den = std::hypot(a, b);
    if (den == 0.0) {
      reason = Termination::breakdown;
      it = k;
      U = assemble(k - 1);
      break;
    }
    gc[k - 1] = a / den;
    gs[k - 1] = b / den;
    H(k - 1, k - 1) = den;
    double hk1 = H(k, k - 1);
    H(k, k - 1) = 0.0;
    xi[k] = -gs[k - 1] * xi[k - 1];
    xi[k - 1] = gc[k - 1] * xi[k - 1];
    double rel = std::abs(xi[k]) / norm_f;
    history.push_back({rel, rank});
    it = k;
    if (rel <= cfg.eps_tol) {
      reason = Termination::converged;
      U = assemble(k);
      break;
    }
    if (k == cfg.maxit) {
      U = assemble(k);
      break;
    }
    if (!(hk1 > 0.0)) {
      reason = Termination::breakdown;
      U = assemble(k);
      break;
    }
    basis.push_back(W / hk1);
  }
  return finish(std::move(U), ctx, F, reason, it, std::move(history), t0, norm_f);
}

}  // namespace

DenseSolveResult full_iterative(const KroneckerOperator& op, const Preconditioner& pc,
                                const Eigen::MatrixXd& F, const SolverConfig& cfg) {
  op.validate();
  if (F.rows() != op.spatial_dim() || F.cols() != op.stochastic_dim())
    throw std::invalid_argument("full_iterative: right-hand side dimension mismatch");
  DenseCtx ctx{op, pc};
  switch (cfg.method) {
    case Method::cg: return dense_cg(ctx, F, cfg);
    case Method::bicgstab: return dense_bicgstab(ctx, F, cfg);
    case Method::qmrcgstab: return dense_qmrcgstab(ctx, F, cfg);
    case Method::gmres: return dense_gmres(ctx, F, cfg);
  }
  throw std::invalid_argument("full_iterative: unknown method");
}

}  // namespace sdg
