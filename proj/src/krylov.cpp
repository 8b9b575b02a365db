#include "sdg/krylov.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace sdg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool usable(double x) { return std::isfinite(x) && x != 0.0; }

// ratio with an exact-zero numerator treated as zero even if the denominator
// vanished (degenerate but harmless recurrence coefficients)
double safe_ratio(double num, double den, bool& broke) {
  if (num == 0.0) return 0.0;
  if (!usable(den)) {
    broke = true;
    return 0.0;
  }
  double r = num / den;
  if (!std::isfinite(r)) broke = true;
  return r;
}

struct LrCtx {
  const KroneckerOperator& op;
  const Preconditioner& pc;
  double trunc;
  int cap;

  LowRank T(const LowRank& x) const { return truncate(x, trunc, cap); }
  LowRank A(const LowRank& x) const { return kron_apply(op, x); }
  LowRank Pinv(const LowRank& x) const { return pc.apply_inverse(x); }
};

SolveResult finish(const LrCtx& ctx, LowRank U, const LowRank& F, Termination reason,
                   double iterations, std::vector<HistoryEntry> history, Clock::time_point t0,
                   double norm_f) {
  SolveResult res;
  res.report.wall_seconds = seconds_since(t0);
  res.report.iterations = iterations;
  res.report.final_rank = U.rank();
  res.report.memory_kb = memory_kb(U);
  res.report.history = std::move(history);
  const double fresh =
      norm_f > 0.0 ? norm_stable(axpy(-1.0, ctx.A(U), F)) / norm_f : 0.0;
  res.report.relative_residual = fresh;
  res.report.reason = reason;
  res.solution = std::move(U);
  return res;
}

}  // namespace

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::maxit: return "maxit";
    case Termination::breakdown: return "breakdown";
  }
  return "unknown";
}

std::string method_name(Method m) {
  switch (m) {
    case Method::cg: return "cg";
    case Method::bicgstab: return "bicgstab";
    case Method::qmrcgstab: return "qmrcgstab";
    case Method::gmres: return "gmres";
  }
  return "unknown";
}

double fresh_relative_residual(const KroneckerOperator& op, const LowRank& U, const LowRank& F) {
  const double nf = norm_stable(F);
  if (nf == 0.0) return 0.0;
  return norm_stable(axpy(-1.0, kron_apply(op, U), F)) / nf;
}

SolveResult lr_cg(const KroneckerOperator& op, const Preconditioner& pc, const LowRank& F,
                  const SolverConfig& cfg, const LowRank* guess) {
  LrCtx ctx{op, pc, cfg.eps_trunc, cfg.rank_cap};
  const auto t0 = Clock::now();
  std::vector<HistoryEntry> history;

  const double norm_f = norm_stable(F);
  LowRank U = guess ? *guess : LowRank::zero(op.spatial_dim(), op.stochastic_dim());
  if (norm_f == 0.0)
    return finish(ctx, LowRank::zero(op.spatial_dim(), op.stochastic_dim()), F,
                  Termination::converged, 0, {}, t0, norm_f);

  LowRank R = guess ? ctx.T(axpy(-1.0, ctx.A(U), F)) : F;
  LowRank Z = ctx.T(ctx.Pinv(R));
  LowRank P = Z;
  double rz = inner(R, Z);

  int it = 0;
  Termination reason = Termination::maxit;
  while (true) {
    if (norm(R) / norm_f <= cfg.eps_tol) {
      reason = Termination::converged;
      break;
    }
    if (it >= cfg.maxit) {
      reason = Termination::maxit;
      break;
    }
    bool broke = false;
    LowRank Q = ctx.T(ctx.A(P));
    const double gamma = safe_ratio(rz, inner(P, Q), broke);
    if (broke) {
      reason = Termination::breakdown;
      break;
    }
    U = ctx.T(axpy(gamma, P, U));
    R = ctx.T(axpy(-gamma, Q, R));
    Z = ctx.T(ctx.Pinv(R));
    const double rz_next = inner(R, Z);
    const double beta = safe_ratio(rz_next, rz, broke);
    rz = rz_next;
    if (broke) {
      reason = Termination::breakdown;
      break;
    }
    P = ctx.T(axpy(beta, P, Z));
    ++it;
    history.push_back({norm(R) / norm_f, U.rank()});
  }
  return finish(ctx, std::move(U), F, reason, it, std::move(history), t0, norm_f);
}

SolveResult lr_bicgstab(const KroneckerOperator& op, const Preconditioner& pc, const LowRank& F,
                        const SolverConfig& cfg, const LowRank* guess) {
  LrCtx ctx{op, pc, cfg.eps_trunc, cfg.rank_cap};
  const auto t0 = Clock::now();
  std::vector<HistoryEntry> history;

  const double norm_f = norm_stable(F);
  LowRank U = guess ? *guess : LowRank::zero(op.spatial_dim(), op.stochastic_dim());
  if (norm_f == 0.0)
    return finish(ctx, LowRank::zero(op.spatial_dim(), op.stochastic_dim()), F,
                  Termination::converged, 0, {}, t0, norm_f);

  LowRank R = guess ? ctx.T(axpy(-1.0, ctx.A(U), F)) : F;
  const LowRank Rt = R;  // shadow residual
  double rho = inner(Rt, R);
  LowRank S = R;
  LowRank St = ctx.Pinv(S);
  LowRank V = ctx.A(St);

  int it = 0;
  Termination reason = Termination::maxit;
  while (true) {
    if (norm(R) / norm_f <= cfg.eps_tol) {
      reason = Termination::converged;
      break;
    }
    if (it >= cfg.maxit) {
      reason = Termination::maxit;
      break;
    }
    bool broke = false;
    const double omega = safe_ratio(inner(Rt, R), inner(Rt, V), broke);
    if (broke) {
      reason = Termination::breakdown;
      break;
    }
    LowRank Z = ctx.T(axpy(-omega, V, R));
    LowRank Zt = ctx.T(ctx.Pinv(Z));
    LowRank Tk = ctx.T(ctx.A(Zt));
    if (norm(Z) / norm_f <= cfg.eps_tol) {
      U = ctx.T(axpy(omega, St, U));
      ++it;
      history.push_back({norm(Z) / norm_f, U.rank()});
      reason = Termination::converged;
      break;
    }
    const double xi = safe_ratio(inner(Tk, Z), inner(Tk, Tk), broke);
    if (broke) {
      reason = Termination::breakdown;
      break;
    }
    U = ctx.T(axpy(omega, St, axpy(xi, Zt, U)));
    R = ctx.T(axpy(-1.0, ctx.A(U), F));
    ++it;
    history.push_back({norm(R) / norm_f, U.rank()});
    if (norm(R) / norm_f <= cfg.eps_tol) {
      reason = Termination::converged;
      break;
    }
    const double rho_next = inner(Rt, R);
    const double beta = safe_ratio(rho_next, rho, broke) * safe_ratio(omega, xi, broke);
    rho = rho_next;
    if (broke || !std::isfinite(beta)) {
      reason = Termination::breakdown;
      break;
    }
    S = ctx.T(axpy(beta, axpy(-xi, V, S), R));
    St = ctx.T(ctx.Pinv(S));
    V = ctx.T(ctx.A(St));
  }
  return finish(ctx, std::move(U), F, reason, it, std::move(history), t0, norm_f);
}

SolveResult lr_qmrcgstab(const KroneckerOperator& op, const Preconditioner& pc, const LowRank& F,
                         const SolverConfig& cfg, const LowRank* guess) {
  LrCtx ctx{op, pc, cfg.eps_trunc, cfg.rank_cap};
  const auto t0 = Clock::now();
  std::vector<HistoryEntry> history;

  const double norm_f = norm_stable(F);
  LowRank U = guess ? *guess : LowRank::zero(op.spatial_dim(), op.stochastic_dim());
  if (norm_f == 0.0)
    return finish(ctx, LowRank::zero(op.spatial_dim(), op.stochastic_dim()), F,
                  Termination::converged, 0, {}, t0, norm_f);

  LowRank R0 = guess ? ctx.T(axpy(-1.0, ctx.A(U), F)) : F;
  LowRank Z = ctx.Pinv(R0);
  const LowRank Rt0 = R0;
  const double norm_r0 = norm_stable(R0);

  LowRank Y = LowRank::zero(op.spatial_dim(), op.stochastic_dim());
  LowRank V = Y, D = Y;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double tau = norm(Z), theta = 0.0, eta = 0.0;
  double tau_t = tau, theta_t = 0.0, eta_t = 0.0;

  int it = 0;
  Termination reason = Termination::maxit;
  while (true) {
    if (std::sqrt(it + 1.0) * std::abs(tau_t) / norm_r0 <= cfg.eps_tol) {
      reason = Termination::converged;
      break;
    }
    if (it >= cfg.maxit) {
      reason = Termination::maxit;
      break;
    }
    bool broke = false;
    const double rho_next = inner(Z, Rt0);
    const double beta = safe_ratio(rho_next, rho, broke) * safe_ratio(alpha, omega, broke);
    if (broke) {
      reason = Termination::breakdown;
      break;
    }
    Y = ctx.T(axpy(beta, axpy(-omega, V, Y), Z));
    LowRank Yt = ctx.T(ctx.A(Y));
    if (norm(Yt) / norm_f <= cfg.eps_tol) {
      ++it;
      history.push_back({norm(Yt) / norm_f, U.rank()});
      reason = Termination::converged;
      break;
    }
    V = ctx.T(ctx.Pinv(Yt));
    alpha = safe_ratio(rho_next, inner(V, Rt0), broke);
    if (broke) {
      reason = Termination::breakdown;
      break;
    }
    LowRank S = ctx.T(axpy(-alpha, V, Z));
    // first quasi-minimization half-step (the listing leaves theta~ and c
    // implicit; this is the standard update)
    theta_t = safe_ratio(norm(S), tau, broke);
    double c = 1.0 / std::sqrt(1.0 + theta_t * theta_t);
    tau_t = tau * theta_t * c;
    eta_t = c * c * alpha;
    LowRank Dt = ctx.T(axpy(safe_ratio(theta * theta * eta, alpha, broke), D, Y));
    LowRank Ut = ctx.T(axpy(eta_t, Dt, U));
    if (broke) {
      reason = Termination::breakdown;
      break;
    }
    if (norm(S) / norm_f <= cfg.eps_tol) {
      U = Ut;
      ++it;
      history.push_back({norm(S) / norm_f, U.rank()});
      reason = Termination::converged;
      break;
    }
    LowRank St = ctx.T(ctx.A(S));
    LowRank Tk = ctx.T(ctx.Pinv(St));
    omega = safe_ratio(inner(S, Tk), inner(Tk, Tk), broke);
    if (broke || omega == 0.0) {
      reason = Termination::breakdown;
      break;
    }
    Z = axpy(-omega, Tk, S);
    theta = safe_ratio(norm(Z), tau_t, broke);
    c = 1.0 / std::sqrt(1.0 + theta * theta);
    tau = tau_t * theta * c;
    eta = c * c * omega;
    D = ctx.T(axpy(safe_ratio(theta_t * theta_t * eta_t, omega, broke), Dt, S));
    U = ctx.T(axpy(eta, D, Ut));
    if (broke) {
      reason = Termination::breakdown;
      break;
    }
    rho = rho_next;
    ++it;
    history.push_back({std::sqrt(it + 1.0) * std::abs(tau_t) / norm_r0, U.rank()});
  }
  return finish(ctx, std::move(U), F, reason, it, std::move(history), t0, norm_f);
}

SolveResult lr_gmres(const KroneckerOperator& op, const Preconditioner& pc, const LowRank& F,
                     const SolverConfig& cfg, const LowRank* guess) {
  LrCtx ctx{op, pc, cfg.eps_trunc, cfg.rank_cap};
  const auto t0 = Clock::now();
  std::vector<HistoryEntry> history;

  const double norm_f = norm_stable(F);
  LowRank U0 = guess ? *guess : LowRank::zero(op.spatial_dim(), op.stochastic_dim());
  if (norm_f == 0.0)
    return finish(ctx, LowRank::zero(op.spatial_dim(), op.stochastic_dim()), F,
                  Termination::converged, 0, {}, t0, norm_f);

  LowRank R0 = guess ? ctx.T(axpy(-1.0, ctx.A(U0), F)) : F;
  const double beta0 = norm_stable(R0);
  if (beta0 / norm_f <= cfg.eps_tol)
    return finish(ctx, std::move(U0), F, Termination::converged, 0, {}, t0, norm_f);

  std::vector<LowRank> basis;
  basis.reserve(cfg.maxit + 1);
  {
    LowRank v1 = R0;
    v1.W /= beta0;
    basis.push_back(std::move(v1));
  }

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(cfg.maxit + 1, cfg.maxit);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(cfg.maxit + 1);
  // the listing reads xi_1 = ||V_1||, which is 1 after normalization and
  // loses the residual scale; the usual seed ||R_0|| is meant
  xi[0] = beta0;
  Eigen::VectorXd givens_c = Eigen::VectorXd::Zero(cfg.maxit);
  Eigen::VectorXd givens_s = Eigen::VectorXd::Zero(cfg.maxit);

  Termination reason = Termination::maxit;
  int it = 0;

  auto assemble_solution = [&](int k) {
    // back-substitute H(0:k-1,0:k-1) y = xi(0:k-1)
    Eigen::VectorXd y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(xi.head(k));
    Eigen::Index total = 0;
    for (int i = 0; i < k; ++i) total += basis[i].rank();
    LowRank Y;
    Y.W.resize(op.spatial_dim(), total);
    Y.V.resize(op.stochastic_dim(), total);
    Eigen::Index at = 0;
    for (int i = 0; i < k; ++i) {
      Y.W.middleCols(at, basis[i].rank()) = y[i] * basis[i].W;
      Y.V.middleCols(at, basis[i].rank()) = basis[i].V;
      at += basis[i].rank();
    }
    Y = ctx.T(Y);
    LowRank Yt = ctx.T(ctx.Pinv(Y));
    return ctx.T(axpy(1.0, Yt, U0));
  };

  LowRank U = U0;
  for (int k = 1; k <= cfg.maxit; ++k) {
    LowRank Z = ctx.T(ctx.Pinv(basis[k - 1]));
    LowRank W = ctx.T(ctx.A(Z));
    for (int i = 1; i <= k; ++i) {
      const double h = inner(W, basis[i - 1]);
      H(i - 1, k - 1) = h;
      W = ctx.T(axpy(-h, basis[i - 1], W));
    }
    const double h_next = norm(W);
    H(k, k - 1) = h_next;

    for (int i = 1; i < k; ++i) {
      const double a = H(i - 1, k - 1);
      const double b = H(i, k - 1);
      H(i - 1, k - 1) = givens_c[i - 1] * a + givens_s[i - 1] * b;
      H(i, k - 1) = -givens_s[i - 1] * a + givens_c[i - 1] * b;
    }
    const double a = H(k - 1, k - 1);
    const double b = H(k, k - 1);
    const double denom = std::hypot(a, b);
    if (denom == 0.0) {
      reason = Termination::breakdown;
      it = k;
      U = assemble_solution(k - 1);
      break;
    }
    givens_c[k - 1] = a / denom;
    givens_s[k - 1] = b / denom;
    H(k - 1, k - 1) = denom;
    H(k, k - 1) = 0.0;
    xi[k] = -givens_s[k - 1] * xi[k - 1];
    xi[k - 1] = givens_c[k - 1] * xi[k - 1];

    const double rel = std::abs(xi[k]) / norm_f;
    history.push_back({rel, W.rank()});
    it = k;
    if (rel <= cfg.eps_tol) {
      reason = Termination::converged;
      U = assemble_solution(k);
      break;
    }
    if (k == cfg.maxit) {
      reason = Termination::maxit;
      U = assemble_solution(k);
      break;
    }
    if (!(h_next > 0.0)) {
      reason = Termination::breakdown;
      U = assemble_solution(k);
      break;
    }
    LowRank v = W;
    v.W /= h_next;
    basis.push_back(std::move(v));
  }
  return finish(ctx, std::move(U), F, reason, it, std::move(history), t0, norm_f);
}

SolveResult lr_solve(const KroneckerOperator& op, const Preconditioner& pc, const LowRank& F,
                     const SolverConfig& cfg, const LowRank* guess) {
  switch (cfg.method) {
    case Method::cg: return lr_cg(op, pc, F, cfg, guess);
    case Method::bicgstab: return lr_bicgstab(op, pc, F, cfg, guess);
    case Method::qmrcgstab: return lr_qmrcgstab(op, pc, F, cfg, guess);
    case Method::gmres: return lr_gmres(op, pc, F, cfg, guess);
  }
  throw std::invalid_argument("lr_solve: unknown method");
}

Eigen::MatrixXd full_direct(const KroneckerOperator& op, const Eigen::MatrixXd& F) {
  op.validate();
  const int nd = op.spatial_dim();
  const int p = op.stochastic_dim();
  if (F.rows() != nd || F.cols() != p)
    throw std::invalid_argument("full_direct: right-hand side dimension mismatch");
  Eigen::SparseMatrix<double> A = op.assemble_global();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("full_direct: factorization failed");
  Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(F.data(), F.size());
  Eigen::VectorXd u = lu.solve(f);
  return Eigen::Map<const Eigen::MatrixXd>(u.data(), nd, p);
}

}  // namespace sdg
