#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "sdg/driver.hpp"

using namespace sdg;

namespace {

BenchmarkSpec small_spec(ProblemId problem) {
  BenchmarkSpec spec;
  spec.problem = problem;
  spec.nx = spec.ny = 4;
  spec.N = 2;
  spec.Q = 2;
  spec.ell = 1.0;
  spec.kappa = 0.1;
  spec.nu = 1.0;
  spec.solver.eps_tol = 1e-8;
  spec.solver.eps_trunc = 1e-10;
  return spec;
}

}  // namespace

TEST_SUITE("driver") {

TEST_CASE("build_system: term count and factored right-hand side") {
  BenchmarkSpec spec = small_spec(ProblemId::steady_diffusion);
  spec.N = 3;
  Assembled sys = build_system(spec);
  CHECK(sys.op.terms.size() == 4);
  CHECK(sys.basis.P() == 10);  // (3+2)! / (3! 2!)
  CHECK(sys.rhs.rows() == sys.mesh.n_dofs());
  CHECK(sys.rhs.cols() == 10);
  CHECK(sys.rhs.rank() <= 4);

  // dense Kronecker oracle for the right-hand side on the two-triangle mesh
  BenchmarkSpec tiny = spec;
  tiny.nx = tiny.ny = 1;
  Assembled sys1 = build_system(tiny);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(sys1.mesh.n_dofs(), sys1.basis.P());
  for (int k = 0; k <= tiny.N; ++k)
    expected += sys1.spatial.f[k] * sys1.basis.g[k].transpose();
  CHECK((sys1.rhs.dense() - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
}

TEST_CASE("build_system: zero deviation gives zero fluctuation blocks and rank-1 rhs") {
  BenchmarkSpec spec = small_spec(ProblemId::steady_diffusion);
  spec.kappa = 0.0;
  Assembled sys = build_system(spec);
  for (size_t k = 1; k < sys.op.terms.size(); ++k)
    CHECK(Eigen::MatrixXd(sys.op.terms[k].K).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sys.rhs.rank() == 1);
}

TEST_CASE("build_system rejects invalid parameters") {
  BenchmarkSpec spec = small_spec(ProblemId::steady_diffusion);
  spec.nu = 0.0;
  CHECK_THROWS_AS(build_system(spec), std::invalid_argument);
  spec = small_spec(ProblemId::steady_diffusion);
  spec.ell = -1.0;
  CHECK_THROWS_AS(build_system(spec), std::invalid_argument);
}

TEST_CASE("moments: zero deviation gives zero variance") {
  BenchmarkSpec spec = small_spec(ProblemId::steady_diffusion);
  spec.kappa = 0.0;
  SteadyResult result = solve_steady(spec);
  MomentFields moments = compute_moments(result.system.mesh, result.solution);
  CHECK(moments.variance.cwiseAbs().maxCoeff() <= 1e-18);

  // and the mean is the deterministic SIPG solution
  Eigen::SparseLU<SparseMat> lu(result.system.spatial.K[0]);
  Eigen::VectorXd det = lu.solve(result.system.spatial.f[0]);
  CHECK((moments.mean - det).norm() <= 1e-7 * det.norm());
}

TEST_CASE("moments of a rank-1 mean-only state") {
  Mesh mesh = build_rect_mesh(0, 1, 0, 1, 2, 2);
  Eigen::VectorXd w = Eigen::VectorXd::Random(mesh.n_dofs());
  LowRank u;
  u.W = w;
  u.V = Eigen::MatrixXd::Zero(6, 1);
  u.V(0, 0) = 1.0;  // U = w e_1^T
  MomentFields moments = compute_moments(mesh, u);
  CHECK((moments.mean - w).norm() == 0.0);
  CHECK(moments.variance.cwiseAbs().maxCoeff() == 0.0);
  CHECK(static_cast<int>(moments.nodes.size()) == mesh.n_dofs());
}

TEST_CASE("variance is nonnegative up to the numerical floor") {
  BenchmarkSpec spec = small_spec(ProblemId::steady_diffusion);
  spec.kappa = 0.3;
  spec.nu = 0.1;
  SteadyResult result = solve_steady(spec);
  MomentFields moments = compute_moments(result.system.mesh, result.solution);
  CHECK(moments.variance.minCoeff() >= -1e-12);
  CHECK(moments.variance.maxCoeff() > 0.0);
}

TEST_CASE("unsteady: zero data stays identically zero") {
  BenchmarkSpec spec = small_spec(ProblemId::unsteady_diffusion);
  spec.nt = 4;
  spec.T = 0.5;
  Assembled sys = build_system(spec);
  CHECK(sys.rhs.rank() > 0);  // the benchmark itself has nonzero boundary data

  // f = 0, u_d = 0, u0 = 0: every step solves A u = M 0 + dt 0
  sys.rhs = LowRank::zero(sys.mesh.n_dofs(), sys.basis.P());
  const double dt = spec.T / spec.nt;
  KroneckerOperator op_dt;
  op_dt.terms.resize(sys.op.terms.size());
  op_dt.terms[0].G = sys.op.terms[0].G;
  op_dt.terms[0].K = sys.spatial.M + dt * sys.op.terms[0].K;
  for (size_t k = 1; k < sys.op.terms.size(); ++k) {
    op_dt.terms[k].G = sys.op.terms[k].G;
    op_dt.terms[k].K = dt * sys.op.terms[k].K;
  }
  Preconditioner pc = Preconditioner::build(PrecondKind::mean_based, op_dt);
  LowRank state = LowRank::zero(sys.mesh.n_dofs(), sys.basis.P());
  for (int n = 0; n < spec.nt; ++n) {
    LowRank rhs_step = truncate(axpy(dt, sys.rhs, LowRank{sys.spatial.M * state.W, state.V}),
                                spec.solver.eps_trunc, spec.solver.rank_cap);
    SolveResult step = lr_solve(op_dt, pc, rhs_step, spec.solver, &state);
    state = step.solution;
    CHECK(state_l2_norm(state, sys.spatial.M) == 0.0);
  }
}

TEST_CASE("unsteady: homogeneous problem dissipates the discrete norm") {
  BenchmarkSpec spec = small_spec(ProblemId::unsteady_diffusion);
  spec.kappa = 0.15;
  spec.ell = 2.0;
  spec.N = 3;
  spec.nt = 8;
  spec.T = 0.5;
  Assembled sys = build_system(spec);

  // force f = 0, u_d = 0 by zeroing the benchmark right-hand side
  sys.rhs = LowRank::zero(sys.mesh.n_dofs(), sys.basis.P());

  const double dt = spec.T / spec.nt;
  KroneckerOperator op_dt;
  op_dt.terms.resize(sys.op.terms.size());
  op_dt.terms[0].G = sys.op.terms[0].G;
  op_dt.terms[0].K = sys.spatial.M + dt * sys.op.terms[0].K;
  for (size_t k = 1; k < sys.op.terms.size(); ++k) {
    op_dt.terms[k].G = sys.op.terms[k].G;
    op_dt.terms[k].K = dt * sys.op.terms[k].K;
  }
  Preconditioner pc = Preconditioner::build(PrecondKind::mean_based, op_dt);

  std::mt19937 rng(3);
  std::normal_distribution<double> gauss;
  LowRank state;
  state.W.resize(sys.mesh.n_dofs(), 3);
  state.V.resize(sys.basis.P(), 3);
  for (int i = 0; i < state.W.rows(); ++i)
    for (int j = 0; j < 3; ++j) state.W(i, j) = gauss(rng);
  for (int i = 0; i < state.V.rows(); ++i)
    for (int j = 0; j < 3; ++j) state.V(i, j) = gauss(rng);

  SolverConfig cfg = spec.solver;
  cfg.method = Method::gmres;
  double prev = state_l2_norm(state, sys.spatial.M);
  for (int n = 0; n < spec.nt; ++n) {
    LowRank rhs_step{sys.spatial.M * state.W, state.V};
    rhs_step = truncate(rhs_step, cfg.eps_trunc, cfg.rank_cap);
    SolveResult step = lr_solve(op_dt, pc, rhs_step, cfg, &state);
    REQUIRE(step.report.reason == Termination::converged);
    state = step.solution;
    const double now = state_l2_norm(state, sys.spatial.M);
    CHECK(now <= prev * (1.0 + 1e-10));
    prev = now;
  }
}

TEST_CASE("unsteady solution approaches the steady state for time-independent data") {
  BenchmarkSpec spec = small_spec(ProblemId::unsteady_diffusion);
  spec.kappa = 0.1;
  spec.N = 2;
  spec.T = 50.0;
  spec.nt = 1600;
  spec.solver.method = Method::bicgstab;
  UnsteadyResult evolution = solve_unsteady(spec);

  // steady limit of the same operator and data
  const Assembled& sys = evolution.system;
  Preconditioner pc = Preconditioner::build(PrecondKind::mean_based, sys.op);
  SolverConfig cfg = spec.solver;
  SolveResult steady = lr_solve(sys.op, pc, sys.rhs, cfg);
  REQUIRE(steady.report.reason == Termination::converged);

  const double gap = norm_stable(axpy(-1.0, steady.solution, evolution.states.back())) /
                     norm_stable(steady.solution);
  CHECK(gap <= 1e-3);
}

TEST_CASE("monte carlo: zero deviation has vanishing variance and fixed seed reproduces") {
  BenchmarkSpec spec = small_spec(ProblemId::steady_diffusion);
  spec.kappa = 0.0;
  MonteCarloStats stats = monte_carlo_reference(spec, 5, 42);
  CHECK(stats.samples_used == 5);
  CHECK(stats.moments.variance.cwiseAbs().maxCoeff() <= 1e-20);

  spec.kappa = 0.2;
  MonteCarloStats a = monte_carlo_reference(spec, 7, 123);
  MonteCarloStats b = monte_carlo_reference(spec, 7, 123);
  CHECK((a.moments.mean - b.moments.mean).norm() == 0.0);
  CHECK((a.moments.variance - b.moments.variance).norm() == 0.0);

  MonteCarloStats single = monte_carlo_reference(spec, 1, 9);
  CHECK(single.samples_used == 1);
  CHECK(single.moments.variance.cwiseAbs().maxCoeff() == 0.0);  // n-1 convention
}

TEST_CASE("monte carlo moments track the chaos moments on a coarse problem") {
  BenchmarkSpec spec = small_spec(ProblemId::steady_diffusion);
  spec.kappa = 0.05;
  spec.N = 2;
  spec.Q = 3;
  SteadyResult sg = solve_steady(spec);
  MomentFields sg_moments = compute_moments(sg.system.mesh, sg.solution);
  MonteCarloStats mc = monte_carlo_reference(spec, 400, 7);
  for (int i = 0; i < sg_moments.mean.size(); ++i) {
    CHECK(std::abs(sg_moments.mean[i] - mc.moments.mean[i]) <=
          3.0 * mc.mean_stderr[i] + 1e-12);
  }
}

TEST_CASE("spatial convergence study reports first-order energy rates") {
  auto rows = convergence_study({8, 16, 32});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rate == 0.0);
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].error < rows[i - 1].error);
    CHECK(rows[i].rate >= 0.85);
  }
}

TEST_CASE("stochastic interpolation error decreases with the chaos degree") {
  std::vector<double> errors = stochastic_degree_errors(4, 3, 0.5, 1.0);
  REQUIRE(errors.size() == 4);
  for (size_t q = 1; q < errors.size(); ++q) CHECK(errors[q] < errors[q - 1]);
}

TEST_CASE("benchmark definitions: domains, winds, and boundary data") {
  BenchmarkSpec spec = small_spec(ProblemId::steady_diffusion);
  Assembled diff = build_system(spec);
  CHECK(diff.mesh.x_lo == -1.0);
  CHECK(diff.mesh.y_hi == 1.0);
  CHECK(diff.data.mean_velocity({0.3, 0.4}) == Point(0, 1));
  CHECK(diff.data.mean_diffusion({0.3, 0.4}) == spec.nu);
  CHECK(diff.data.dirichlet({0.3, -1.0}) == doctest::Approx(0.3));
  CHECK(diff.data.dirichlet({0.3, 1.0}) == 0.0);
  CHECK(diff.data.dirichlet({-1.0, 0.2}) == -1.0);
  CHECK(diff.data.dirichlet({1.0, 0.2}) == 1.0);
  CHECK(diff.data.source({0.1, 0.1}) == 0.0);

  Assembled conv = build_system(small_spec(ProblemId::steady_convection));
  CHECK(conv.mesh.x_lo == 0.0);
  CHECK(conv.mesh.x_hi == 1.0);
  CHECK(conv.data.mean_velocity({0.3, 0.4}) == Point(1, 0));
  CHECK(conv.data.velocity_mode(1, {0.3, 0.4}).x() == 0.0);  // fluctuation in the angle only
  CHECK(conv.data.dirichlet({0.0, 0.3}) == 1.0);
  CHECK(conv.data.dirichlet({0.0, 0.7}) == 0.0);
  CHECK(conv.data.dirichlet({0.4, 0.0}) == 1.0);
  CHECK(conv.data.dirichlet({1.0, 0.4}) == 1.0);
  CHECK(conv.data.dirichlet({1.0, 0.8}) == 0.0);
  CHECK(conv.data.dirichlet({0.4, 1.0}) == 0.0);

  BenchmarkSpec uspec = small_spec(ProblemId::unsteady_diffusion);
  Assembled unst = build_system(uspec);
  CHECK(uspec.T == 0.5);
  CHECK(uspec.nt == 32);
  CHECK(unst.data.mean_velocity({0.3, 0.4}) == Point(1, 1));
  CHECK(unst.data.mean_diffusion({0.3, 0.4}) == 1.0);
  CHECK(unst.data.dirichlet({0.0, 0.25}) == doctest::Approx(0.25 * 0.75));
  CHECK(unst.data.dirichlet({0.5, 0.0}) == 0.0);
  CHECK(unst.data.dirichlet({1.0, 0.25}) == 0.0);
}

TEST_CASE("random-velocity benchmark solves and keeps moments sane") {
  BenchmarkSpec spec = small_spec(ProblemId::steady_convection);
  spec.nx = spec.ny = 8;
  spec.N = 3;
  spec.Q = 2;
  spec.kappa = 0.05;
  spec.nu = 0.1;
  spec.solver.method = Method::gmres;
  spec.solver.eps_tol = 1e-6;
  spec.solver.eps_trunc = 1e-8;
  SteadyResult result = solve_steady(spec);
  REQUIRE(result.report.reason == Termination::converged);
  MomentFields m = compute_moments(result.system.mesh, result.solution);
  CHECK(m.variance.minCoeff() >= -1e-12);
  CHECK(m.variance.maxCoeff() > 0.0);
  // transported boundary data stays within the data range up to DG over/undershoot
  CHECK(m.mean.minCoeff() > -0.3);
  CHECK(m.mean.maxCoeff() < 1.3);
  CHECK(m.mean.maxCoeff() > 0.5);
}

TEST_CASE("steady boundary-layer benchmark shows the layer near the outflow wall") {
  auto probe = [](double nu) {
    BenchmarkSpec spec;
    spec.problem = ProblemId::steady_diffusion;
    spec.nx = spec.ny = 16;
    spec.N = 2;
    spec.Q = 2;
    spec.kappa = 0.05;
    spec.nu = nu;
    spec.solver.method = Method::gmres;
    SteadyResult result = solve_steady(spec);
    REQUIRE(result.report.reason == Termination::converged);
    MomentFields m = compute_moments(result.system.mesh, result.solution);
    double strip = 0.0, interior = 0.0;
    for (size_t i = 0; i < m.nodes.size(); ++i) {
      if (std::abs(m.nodes[i].x()) > 0.8) continue;  // keep clear of the corner data jumps
      if (m.nodes[i].y() >= 0.75 - 1e-12) strip = std::max(strip, std::abs(m.mean[i]));
      if (std::abs(m.nodes[i].y()) < 0.25) interior = std::max(interior, std::abs(m.mean[i]));
    }
    return std::pair(strip, interior);
  };

  // the convected profile piles up against the u = 0 outflow wall; once the
  // layer is thinner than the mesh the mean overshoots the interior plateau
  auto [strip_sharp, interior_sharp] = probe(1e-3);
  auto [strip_smooth, interior_smooth] = probe(1e-1);
  CHECK(strip_sharp > 1.2);
  CHECK(strip_sharp > interior_sharp);
  CHECK(strip_smooth < 0.8);
  CHECK(interior_smooth == doctest::Approx(0.75).epsilon(0.05));
}

TEST_CASE("csv and json outputs are written with full precision") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "sdg_io_test";
  fs::create_directories(dir);

  MomentFields m;
  m.nodes = {Point(0.125, 0.25), Point(1.0 / 3.0, 0.75)};
  m.mean = Eigen::VectorXd(2);
  m.mean << 0.1, 1.0 / 3.0;
  m.variance = Eigen::VectorXd(2);
  m.variance << 1e-17, 0.0;
  write_moments_csv((dir / "moments.csv").string(), m);

  std::ifstream in(dir / "moments.csv");
  std::string header, line1, line2;
  std::getline(in, header);
  std::getline(in, line1);
  std::getline(in, line2);
  CHECK(header == "x,y,mean,variance");
  CHECK(line1.find("0.10000000000000001") != std::string::npos);  // 17 significant digits
  CHECK(line2.find("0.33333333333333331") != std::string::npos);

  SolveReport rep;
  rep.iterations = 3;
  rep.final_rank = 7;
  rep.relative_residual = 1.25e-7;
  rep.history = {{0.5, 3}, {1.25e-7, 7}};
  write_report_json((dir / "report.json").string(), {rep}, {"steady"});
  write_history_csv((dir / "history.csv").string(), {rep});
  std::ifstream jin(dir / "report.json");
  std::string all((std::istreambuf_iterator<char>(jin)), std::istreambuf_iterator<char>());
  CHECK(all.find("\"final_rank\": 7") != std::string::npos);
  CHECK(all.find("converged") == std::string::npos);  // default reason is maxit
  fs::remove_all(dir);
}

}  // TEST_SUITE
