#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "sdg/driver.hpp"

namespace {

struct Cli {
  std::string problem = "steady-diff";
  int nx = 32, ny = 32;
  int N = 3, Q = 3;
  double ell = 1.0, kappa = 0.05, nu = 1e-4, sigma = 10.0;
  std::string solver = "gmres";
  std::string precond = "mean";
  double eps_trunc = 1e-6, tol = 1e-4;
  int maxit = 100;
  std::string out = "out";
  double T = 0.5;
  int nt = 32;
  std::uint64_t seed = 1;
  int samples = 2000;
  int levels = 4;
  bool penalty_in_modes = false;
};

void add_problem_flags(CLI::App* cmd, Cli& c) {
  cmd->add_option("--problem", c.problem)
      ->check(CLI::IsMember({"steady-diff", "steady-conv", "unsteady-diff"}));
  cmd->add_option("--nx", c.nx);
  cmd->add_option("--ny", c.ny);
  cmd->add_option("--N", c.N);
  cmd->add_option("--Q", c.Q);
  cmd->add_option("--ell", c.ell);
  cmd->add_option("--kappa", c.kappa);
  cmd->add_option("--nu", c.nu);
  cmd->add_option("--sigma", c.sigma);
  cmd->add_option("--solver", c.solver)
      ->check(CLI::IsMember({"cg", "bicgstab", "qmrcgstab", "gmres", "direct"}));
  cmd->add_option("--precond", c.precond)->check(CLI::IsMember({"mean", "ullmann", "none"}));
  cmd->add_option("--eps-trunc", c.eps_trunc);
  cmd->add_option("--tol", c.tol);
  cmd->add_option("--maxit", c.maxit);
  cmd->add_option("--out", c.out);
  cmd->add_option("--T", c.T);
  cmd->add_option("--nt", c.nt);
  cmd->add_option("--seed", c.seed);
  cmd->add_flag("--penalty-in-modes", c.penalty_in_modes);
}

sdg::BenchmarkSpec to_spec(const Cli& c) {
  sdg::BenchmarkSpec spec;
  if (c.problem == "steady-diff") spec.problem = sdg::ProblemId::steady_diffusion;
  if (c.problem == "steady-conv") spec.problem = sdg::ProblemId::steady_convection;
  if (c.problem == "unsteady-diff") spec.problem = sdg::ProblemId::unsteady_diffusion;
  spec.nx = c.nx;
  spec.ny = c.ny;
  spec.N = c.N;
  spec.Q = c.Q;
  spec.ell = c.ell;
  spec.kappa = c.kappa;
  spec.nu = c.nu;
  spec.sigma = c.sigma;
  spec.T = c.T;
  spec.nt = c.nt;
  spec.penalty_in_modes = c.penalty_in_modes;
  if (c.solver == "cg") spec.solver.method = sdg::Method::cg;
  if (c.solver == "bicgstab") spec.solver.method = sdg::Method::bicgstab;
  if (c.solver == "qmrcgstab") spec.solver.method = sdg::Method::qmrcgstab;
  if (c.solver == "gmres") spec.solver.method = sdg::Method::gmres;
  if (c.precond == "mean") spec.solver.precond = sdg::PrecondKind::mean_based;
  if (c.precond == "ullmann") spec.solver.precond = sdg::PrecondKind::ullmann;
  if (c.precond == "none") spec.solver.precond = sdg::PrecondKind::none;
  spec.solver.eps_tol = c.tol;
  spec.solver.eps_trunc = c.eps_trunc;
  spec.solver.maxit = c.maxit;
  return spec;
}

int run_solve(const Cli& c) {
  sdg::BenchmarkSpec spec = to_spec(c);
  std::filesystem::create_directories(c.out);

  if (c.solver == "direct") {
    sdg::Assembled sys = sdg::build_system(spec);
    sdg::SolveReport report;
    report.final_rank = static_cast<int>(std::min<Eigen::Index>(sys.mesh.n_dofs(),
                                                                sys.basis.P()));
    report.memory_kb = 8.0 * sys.mesh.n_dofs() * sys.basis.P() / 1024.0;
    report.reason = sdg::Termination::converged;
    if (spec.problem == sdg::ProblemId::unsteady_diffusion) {
      // backward Euler with a direct solve per step
      const double dt = spec.T / spec.nt;
      sdg::KroneckerOperator op_dt;
      op_dt.terms.resize(sys.op.terms.size());
      op_dt.terms[0].G = sys.op.terms[0].G;
      op_dt.terms[0].K = sys.spatial.M + dt * sys.op.terms[0].K;
      for (size_t k = 1; k < sys.op.terms.size(); ++k) {
        op_dt.terms[k].G = sys.op.terms[k].G;
        op_dt.terms[k].K = dt * sys.op.terms[k].K;
      }
      Eigen::MatrixXd state = Eigen::MatrixXd::Zero(sys.mesh.n_dofs(), sys.basis.P());
      const Eigen::MatrixXd F = sys.rhs.dense();
      std::vector<sdg::SolveReport> reports;
      std::vector<std::string> labels;
      for (int n = 0; n < spec.nt; ++n) {
        Eigen::MatrixXd rhs_step = sys.spatial.M * state + dt * F;
        state = sdg::full_direct(op_dt, rhs_step);
        sdg::SolveReport step = report;
        step.relative_residual =
            (rhs_step - op_dt.apply_dense(state)).norm() / rhs_step.norm();
        reports.push_back(step);
        labels.push_back("step " + std::to_string(n + 1));
      }
      sdg::write_moments_csv(c.out + "/moments.csv",
                             sdg::compute_moments_dense(sys.mesh, state));
      sdg::write_report_json(c.out + "/report.json", reports, labels);
      sdg::write_history_csv(c.out + "/history.csv", reports);
      std::printf("direct unsteady solve: %d steps, final residual %.3e\n", spec.nt,
                  reports.back().relative_residual);
      return 0;
    }
    Eigen::MatrixXd F = sys.rhs.dense();
    Eigen::MatrixXd U = sdg::full_direct(sys.op, F);
    sdg::write_moments_csv(c.out + "/moments.csv", sdg::compute_moments_dense(sys.mesh, U));
    report.relative_residual =
        F.norm() > 0.0 ? (F - sys.op.apply_dense(U)).norm() / F.norm() : 0.0;
    sdg::write_report_json(c.out + "/report.json", {report}, {"direct"});
    sdg::write_history_csv(c.out + "/history.csv", {report});
    std::printf("direct solve: residual %.3e\n", report.relative_residual);
    return 0;
  }

  if (spec.problem == sdg::ProblemId::unsteady_diffusion) {
    sdg::UnsteadyResult result = sdg::solve_unsteady(spec);
    sdg::MomentFields moments =
        sdg::compute_moments(result.system.mesh, result.states.back());
    sdg::write_moments_csv(c.out + "/moments.csv", moments);
    std::vector<std::string> labels;
    for (size_t i = 0; i < result.reports.size(); ++i)
      labels.push_back("step " + std::to_string(i + 1));
    sdg::write_report_json(c.out + "/report.json", result.reports, labels);
    sdg::write_history_csv(c.out + "/history.csv", result.reports);
    const auto& last = result.reports.back();
    std::printf("unsteady solve: %d steps, final rank %d, final residual %.3e\n", spec.nt,
                last.final_rank, last.relative_residual);
    return 0;
  }

  sdg::SteadyResult result = sdg::solve_steady(spec);
  sdg::MomentFields moments = sdg::compute_moments(result.system.mesh, result.solution);
  sdg::write_moments_csv(c.out + "/moments.csv", moments);
  sdg::write_report_json(c.out + "/report.json", {result.report}, {"steady"});
  sdg::write_history_csv(c.out + "/history.csv", {result.report});
  std::printf("%s: %s after %g iterations, rank %d, residual %.3e, %.1f KB\n", c.solver.c_str(),
              sdg::termination_name(result.report.reason).c_str(), result.report.iterations,
              result.report.final_rank, result.report.relative_residual,
              result.report.memory_kb);
  return result.report.reason == sdg::Termination::breakdown ? 1 : 0;
}

int run_mc(const Cli& c) {
  sdg::BenchmarkSpec spec = to_spec(c);
  std::filesystem::create_directories(c.out);
  sdg::MonteCarloStats stats = sdg::monte_carlo_reference(spec, c.samples, c.seed);
  sdg::write_moments_csv(c.out + "/moments.csv", stats.moments);
  std::printf("monte carlo: %d samples used, %d skipped\n", stats.samples_used,
              stats.samples_skipped);
  return 0;
}

int run_convergence(const Cli& c) {
  std::filesystem::create_directories(c.out);
  std::vector<int> resolutions;
  for (int l = 0, nx = 8; l < c.levels; ++l, nx *= 2) resolutions.push_back(nx);
  auto rows = sdg::convergence_study(resolutions, c.sigma);
  std::string path = c.out + "/convergence.csv";
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) {
    std::fprintf(stderr, "cannot open %s\n", path.c_str());
    return 1;
  }
  std::fprintf(f, "h,energy_error,rate\n");
  for (const auto& row : rows)
    std::fprintf(f, "%.17g,%.17g,%.17g\n", row.h, row.error, row.rate);
  std::fclose(f);
  for (const auto& row : rows)
    std::printf("h = %-10.4g energy error = %-12.5e rate = %.3f\n", row.h, row.error, row.rate);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic discontinuous Galerkin solver with low-rank Krylov methods"};
  app.require_subcommand(1);
  Cli c;

  CLI::App* solve = app.add_subcommand("solve", "solve a benchmark problem");
  add_problem_flags(solve, c);

  CLI::App* oracle = app.add_subcommand("oracle", "reference computations");
  CLI::App* mc = oracle->add_subcommand("mc", "Monte Carlo moment reference");
  mc->add_option("--samples", c.samples);
  add_problem_flags(mc, c);

  CLI::App* study = app.add_subcommand("study", "parameter studies");
  CLI::App* conv = study->add_subcommand("convergence", "spatial convergence study");
  conv->add_option("--levels", c.levels);
  add_problem_flags(conv, c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(c);
    if (oracle->parsed() && mc->parsed()) return run_mc(c);
    if (study->parsed() && conv->parsed()) return run_convergence(c);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  std::cerr << app.help();
  return 1;
}
