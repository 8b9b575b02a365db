#include "sdg/driver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "sdg/quadrature.hpp"

namespace sdg {

namespace {

constexpr double kPi = 3.14159265358979323846;

ScalarField dirichlet_steady_diffusion() {
  // bottom: x1, top: 0, left: -1, right: 1
  return [](const Point& x) {
    const double tol = 1e-12;
    if (std::abs(x.y() + 1.0) < tol) return x.x();
    if (std::abs(x.y() - 1.0) < tol) return 0.0;
    if (std::abs(x.x() + 1.0) < tol) return -1.0;
    if (std::abs(x.x() - 1.0) < tol) return 1.0;
    return 0.0;
  };
}

ScalarField dirichlet_steady_convection() {
  // 1 on the bottom and on the lower halves of the side walls
  return [](const Point& x) {
    const double tol = 1e-12;
    const bool on_s = (std::abs(x.y()) < tol) ||
                      (std::abs(x.x()) < tol && x.y() <= 0.5 + tol) ||
                      (std::abs(x.x() - 1.0) < tol && x.y() <= 0.5 + tol);
    return on_s ? 1.0 : 0.0;
  };
}

ScalarField dirichlet_unsteady_diffusion() {
  return [](const Point& x) {
    const double tol = 1e-12;
    if (std::abs(x.x()) < tol) return x.y() * (1.0 - x.y());
    return 0.0;
  };
}

}  // namespace

Assembled build_system(const BenchmarkSpec& spec) {
  if (spec.N < 0 || spec.Q < 0 || spec.nx < 1 || spec.ny < 1 || !(spec.ell > 0.0) ||
      spec.kappa < 0.0 || !(spec.nu > 0.0) || !(spec.sigma > 0.0))
    throw std::invalid_argument("build_system: invalid benchmark parameters");

  Assembled sys;

  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (spec.problem == ProblemId::steady_diffusion) {
    x_lo = y_lo = -1.0;
    x_hi = y_hi = 1.0;
  }
  sys.mesh = build_rect_mesh(x_lo, x_hi, y_lo, y_hi, spec.nx, spec.ny);

  CovarianceSpec cov;
  cov.kappa = spec.kappa;
  cov.ell1 = cov.ell2 = spec.ell;
  cov.x_lo = x_lo;
  cov.x_hi = x_hi;
  cov.y_lo = y_lo;
  cov.y_hi = y_hi;

  ProblemData data;
  data.sigma = spec.sigma;
  data.n_modes = spec.N;
  data.penalty_in_modes = spec.penalty_in_modes;

  switch (spec.problem) {
    case ProblemId::steady_diffusion: {
      // a = nu * eta with eta a unit-mean random field; nu scales the whole
      // expansion
      auto kl = std::make_shared<KLExpansion>(assemble_2d_eigenpairs(
          cov, spec.N, [](const Point&) { return 1.0; }));
      const double nu = spec.nu;
      data.mean_diffusion = [nu](const Point&) { return nu; };
      data.mean_velocity = [](const Point&) { return Point(0.0, 1.0); };
      data.diffusion_mode = [kl, nu](int k, const Point& x) {
        return nu * kl->kappa() * std::sqrt(kl->lambda(k - 1)) * kl->phi(k - 1, x);
      };
      data.dirichlet = dirichlet_steady_diffusion();
      break;
    }
    case ProblemId::steady_convection: {
      // b = (cos(eta/5), sin(eta/5)) with zero-mean eta, linearized to
      // (1, eta/5) for the affine Kronecker split (kappa is small here)
      auto kl = std::make_shared<KLExpansion>(assemble_2d_eigenpairs(
          cov, spec.N, [](const Point&) { return 0.0; }));
      const double nu = spec.nu;
      data.mean_diffusion = [nu](const Point&) { return nu; };
      data.mean_velocity = [](const Point&) { return Point(1.0, 0.0); };
      data.velocity_mode = [kl](int k, const Point& x) {
        return Point(0.0, kl->kappa() * std::sqrt(kl->lambda(k - 1)) * kl->phi(k - 1, x) / 5.0);
      };
      data.dirichlet = dirichlet_steady_convection();
      break;
    }
    case ProblemId::unsteady_diffusion: {
      auto kl = std::make_shared<KLExpansion>(assemble_2d_eigenpairs(
          cov, spec.N, [](const Point&) { return 1.0; }));
      data.mean_diffusion = [](const Point&) { return 1.0; };
      data.mean_velocity = [](const Point&) { return Point(1.0, 1.0); };
      data.diffusion_mode = [kl](int k, const Point& x) {
        return kl->kappa() * std::sqrt(kl->lambda(k - 1)) * kl->phi(k - 1, x);
      };
      data.dirichlet = dirichlet_unsteady_diffusion();
      break;
    }
  }

  sys.data = data;
  sys.wind = classify_edges(sys.mesh, data.mean_velocity);
  sys.basis = build_g_matrices(enumerate_indices(std::max(spec.N, 1), spec.Q));
  sys.spatial = assemble_all(sys.mesh, sys.wind, data);

  sys.op.terms.resize(spec.N + 1);
  for (int k = 0; k <= spec.N; ++k) {
    sys.op.terms[k].G = sys.basis.G[k];
    sys.op.terms[k].K = sys.spatial.K[k];
  }

  LowRank rhs;
  const int nd = sys.mesh.n_dofs();
  const int p = sys.basis.P();
  rhs.W.resize(nd, spec.N + 1);
  rhs.V.resize(p, spec.N + 1);
  for (int k = 0; k <= spec.N; ++k) {
    rhs.W.col(k) = sys.spatial.f[k];
    rhs.V.col(k) = sys.basis.g[k];
  }
  sys.rhs = truncate(rhs, spec.solver.eps_trunc, spec.solver.rank_cap);
  return sys;
}

MomentFields compute_moments(const Mesh& mesh, const LowRank& U) {
  if (U.rows() != mesh.n_dofs()) throw std::invalid_argument("compute_moments: dof mismatch");
  MomentFields out;
  out.nodes.reserve(mesh.n_dofs());
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int i = 0; i < 3; ++i) out.nodes.push_back(mesh.vertices[mesh.triangles[t][i]]);

  if (U.rank() == 0) {
    out.mean = Eigen::VectorXd::Zero(mesh.n_dofs());
    out.variance = Eigen::VectorXd::Zero(mesh.n_dofs());
    return out;
  }
  out.mean = U.W * U.V.row(0).transpose();
  // sum over chaos modes i >= 1 of U(:,i)^2 as a small quadratic form
  Eigen::MatrixXd S = U.V.transpose() * U.V - U.V.row(0).transpose() * U.V.row(0);
  out.variance = (U.W * S).cwiseProduct(U.W).rowwise().sum();
  return out;
}

MomentFields compute_moments_dense(const Mesh& mesh, const Eigen::MatrixXd& U) {
  MomentFields out;
  out.nodes.reserve(mesh.n_dofs());
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int i = 0; i < 3; ++i) out.nodes.push_back(mesh.vertices[mesh.triangles[t][i]]);
  out.mean = U.col(0);
  out.variance = U.rightCols(U.cols() - 1).cwiseAbs2().rowwise().sum();
  return out;
}

SteadyResult solve_steady(const BenchmarkSpec& spec) {
  SteadyResult result{build_system(spec), {}, {}};
  const Preconditioner pc = Preconditioner::build(spec.solver.precond, result.system.op);
  SolveResult sol = lr_solve(result.system.op, pc, result.system.rhs, spec.solver);
  result.solution = std::move(sol.solution);
  result.report = std::move(sol.report);
  return result;
}

UnsteadyResult solve_unsteady(const BenchmarkSpec& spec, const LowRank* initial_state) {
  if (spec.nt < 1 || !(spec.T > 0.0))
    throw std::invalid_argument("solve_unsteady: need nt >= 1 and T > 0");
  UnsteadyResult result{build_system(spec), {}, {}};
  const Assembled& sys = result.system;
  const double dt = spec.T / spec.nt;

  KroneckerOperator op_dt;
  op_dt.terms.resize(sys.op.terms.size());
  op_dt.terms[0].G = sys.op.terms[0].G;
  op_dt.terms[0].K = sys.spatial.M + dt * sys.op.terms[0].K;
  for (size_t k = 1; k < sys.op.terms.size(); ++k) {
    op_dt.terms[k].G = sys.op.terms[k].G;
    op_dt.terms[k].K = dt * sys.op.terms[k].K;
  }
  const Preconditioner pc = Preconditioner::build(spec.solver.precond, op_dt);

  LowRank state = initial_state ? *initial_state
                                : LowRank::zero(sys.mesh.n_dofs(), sys.basis.P());
  result.states.reserve(spec.nt);
  result.reports.reserve(spec.nt);
  for (int n = 0; n < spec.nt; ++n) {
    // F^{n+1} = (G_0 (x) M) u^n + dt F, with G_0 = I
    LowRank mu{sys.spatial.M * state.W, state.V};
    LowRank rhs_step = truncate(axpy(dt, sys.rhs, mu), spec.solver.eps_trunc,
                                spec.solver.rank_cap);
    SolveResult step = lr_solve(op_dt, pc, rhs_step, spec.solver, &state);
    if (step.report.reason == Termination::breakdown)
      throw std::runtime_error("solve_unsteady: solver breakdown at step " + std::to_string(n));
    state = step.solution;
    result.states.push_back(state);
    result.reports.push_back(std::move(step.report));
  }
  return result;
}

double state_l2_norm(const LowRank& U, const SparseMat& M) {
  if (U.rank() == 0) return 0.0;
  Eigen::MatrixXd wmw = U.W.transpose() * (M * U.W);
  Eigen::MatrixXd vv = U.V.transpose() * U.V;
  return std::sqrt(std::max(wmw.cwiseProduct(vv).sum(), 0.0));
}

MonteCarloStats monte_carlo_reference(const BenchmarkSpec& spec, int samples,
                                      std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("monte_carlo_reference: samples must be >= 1");
  Assembled sys = build_system(spec);
  const int nd = sys.mesh.n_dofs();

  std::mt19937_64 rng(seed);
  const double bound = std::sqrt(3.0);
  std::uniform_real_distribution<double> uniform(-bound, bound);

  using Arr = Eigen::ArrayXd;
  Arr mean = Arr::Zero(nd), m2 = Arr::Zero(nd), m3 = Arr::Zero(nd), m4 = Arr::Zero(nd);
  int used = 0, skipped = 0;

  for (int s = 0; s < samples; ++s) {
    std::vector<double> xi(spec.N);
    for (double& v : xi) v = uniform(rng);

    ProblemData realized = sys.data;
    realized.n_modes = 0;
    const ProblemData& base = sys.data;
    realized.mean_diffusion = [&base, &xi](const Point& x) {
      double a = base.mean_diffusion(x);
      for (size_t k = 0; k < xi.size(); ++k) a += xi[k] * base.diffusion_mode(k + 1, x);
      return a;
    };
    realized.mean_velocity = [&base, &xi](const Point& x) {
      Point b = base.mean_velocity(x);
      for (size_t k = 0; k < xi.size(); ++k) b += xi[k] * base.velocity_mode(k + 1, x);
      return b;
    };
    // realized penalty weight keeps the sample consistent with the affine
    // Kronecker split of the penalty term
    const ScalarField realized_a = realized.mean_diffusion;
    realized.penalty_weight = [&base, realized_a](const Point& x) {
      return realized_a(x) / base.mean_diffusion(x);
    };

    Eigen::VectorXd u;
    try {
      SparseMat K = assemble_K0(sys.mesh, sys.wind, realized);
      Eigen::VectorXd f = assemble_rhs(sys.mesh, sys.wind, realized, 0);
      Eigen::SparseLU<SparseMat> lu(K);
      if (lu.info() != Eigen::Success) throw std::runtime_error("singular sample");
      u = lu.solve(f);
      if (!u.allFinite()) throw std::runtime_error("non-finite sample");
    } catch (const std::exception&) {
      ++skipped;
      continue;
    }

    ++used;
    const double n = used;
    Arr delta = u.array() - mean;
    Arr delta_n = delta / n;
    Arr delta_n2 = delta_n.square();
    Arr term1 = delta * delta_n * (n - 1.0);
    m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
    m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
    m2 += term1;
    mean += delta_n;
  }

  MonteCarloStats stats;
  stats.samples_used = used;
  stats.samples_skipped = skipped;
  stats.moments.nodes.reserve(nd);
  for (int t = 0; t < sys.mesh.n_triangles(); ++t)
    for (int i = 0; i < 3; ++i)
      stats.moments.nodes.push_back(sys.mesh.vertices[sys.mesh.triangles[t][i]]);
  stats.moments.mean = mean.matrix();
  if (used >= 2) {
    Arr var = m2 / (used - 1.0);
    stats.moments.variance = var.matrix();
    stats.mean_stderr = (var / used).sqrt().matrix();
    Arr m4c = m4 / used;
    Arr se2 = (m4c - ((used - 3.0) / (used - 1.0)) * var.square()) / used;
    stats.variance_stderr = se2.max(0.0).sqrt().matrix();
  } else {
    // unbiased (n-1) variance undefined for a single sample
    stats.moments.variance = Eigen::VectorXd::Zero(nd);
    stats.mean_stderr = Eigen::VectorXd::Zero(nd);
    stats.variance_stderr = Eigen::VectorXd::Zero(nd);
  }
  return stats;
}

std::vector<ConvergenceRow> convergence_study(const std::vector<int>& resolutions, double sigma) {
  std::vector<ConvergenceRow> rows;
  ExactSolution exact;
  exact.value = [](const Point& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
  exact.gradient = [](const Point& x) {
    return Point(kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()),
                 kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()));
  };

  for (int nx : resolutions) {
    Mesh mesh = build_rect_mesh(0.0, 1.0, 0.0, 1.0, nx, nx);
    ProblemData data;
    data.sigma = sigma;
    data.source = [&](const Point& x) { return 2.0 * kPi * kPi * exact.value(x); };
    auto wind = classify_edges(mesh, data.mean_velocity);
    SparseMat K = assemble_K0(mesh, wind, data);
    Eigen::VectorXd f = assemble_rhs(mesh, wind, data, 0);
    Eigen::SparseLU<SparseMat> lu(K);
    Eigen::VectorXd u = lu.solve(f);
    const double err = energy_error(mesh, data, u, &exact);
    ConvergenceRow row{mesh.max_diameter(), err, 0.0};
    if (!rows.empty()) row.rate = std::log2(rows.back().error / err);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> stochastic_degree_errors(int nx, int max_q, double kappa, double ell) {
  Mesh mesh = build_rect_mesh(0.0, 1.0, 0.0, 1.0, nx, nx);
  CovarianceSpec cov;
  cov.kappa = kappa;
  cov.ell1 = cov.ell2 = ell;
  auto kl = std::make_shared<KLExpansion>(
      assemble_2d_eigenpairs(cov, 1, [](const Point&) { return 1.0; }));

  ProblemData data;
  data.n_modes = 1;
  data.source = [](const Point&) { return 1.0; };
  data.diffusion_mode = [kl](int, const Point& x) {
    return kl->kappa() * std::sqrt(kl->lambda(0)) * kl->phi(0, x);
  };
  auto wind = classify_edges(mesh, data.mean_velocity);

  auto sg_solution = [&](int q) {
    ChaosBasis basis = build_g_matrices(enumerate_indices(1, q));
    SpatialOperators ops = assemble_all(mesh, wind, data);
    KroneckerOperator op;
    op.terms.resize(2);
    for (int k = 0; k < 2; ++k) {
      op.terms[k].G = basis.G[k];
      op.terms[k].K = ops.K[k];
    }
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(mesh.n_dofs(), basis.P());
    for (int k = 0; k < 2; ++k) F += ops.f[k] * basis.g[k].transpose();
    return full_direct(op, F);
  };

  const int q_ref = max_q + 3;
  Eigen::MatrixXd u_ref = sg_solution(q_ref);
  GaussRule xi_rule = gauss_legendre(10, -std::sqrt(3.0), std::sqrt(3.0));
  const double density = 1.0 / (2.0 * std::sqrt(3.0));

  std::vector<double> errors;
  for (int q = 0; q <= max_q; ++q) {
    Eigen::MatrixXd u_q = sg_solution(q);
    double acc = 0.0;
    for (size_t i = 0; i < xi_rule.point.size(); ++i) {
      const double xi = xi_rule.point[i];
      Eigen::VectorXd diff = Eigen::VectorXd::Zero(mesh.n_dofs());
      for (int j = 0; j < u_ref.cols(); ++j) diff += u_ref.col(j) * legendre_eval(j, xi);
      for (int j = 0; j < u_q.cols(); ++j) diff -= u_q.col(j) * legendre_eval(j, xi);
      ProblemData realized = data;
      realized.n_modes = 0;
      realized.mean_diffusion = [&](const Point& x) {
        return data.mean_diffusion(x) + xi * data.diffusion_mode(1, x);
      };
      const double e = energy_error(mesh, realized, diff, nullptr);
      acc += xi_rule.weight[i] * density * e * e;
    }
    errors.push_back(std::sqrt(acc));
  }
  return errors;
}

}  // namespace sdg
