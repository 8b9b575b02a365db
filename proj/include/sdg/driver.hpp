#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdg/chaos.hpp"
#include "sdg/dg_assembly.hpp"
#include "sdg/krylov.hpp"
#include "sdg/lowrank.hpp"
#include "sdg/mesh.hpp"
#include "sdg/random_field.hpp"

namespace sdg {

enum class ProblemId { steady_diffusion, steady_convection, unsteady_diffusion };

/// Benchmark configurations:
///   steady-diffusion:  D = [-1,1]^2, f = 0, b = (0,1), a = nu * (unit-mean
///                      exponential-covariance field), piecewise boundary data;
///   steady-convection: D = [0,1]^2, a = nu, b = (cos(eta/5), sin(eta/5))
///                      linearized about the zero-mean field eta;
///   unsteady-diffusion: D = [0,1]^2, b = (1,1), unit-mean random diffusion,
///                      backward Euler on [0,T] with nt uniform steps.
struct BenchmarkSpec {
  ProblemId problem = ProblemId::steady_diffusion;
  int nx = 32, ny = 32;
  int N = 3, Q = 3;
  double ell = 1.0;
  double kappa = 0.05;
  double nu = 1e-4;
  double sigma = 10.0;
  SolverConfig solver;
  double T = 0.5;
  int nt = 32;
  bool penalty_in_modes = false;
};

struct Assembled {
  Mesh mesh;
  std::vector<EdgeWind> wind;
  ProblemData data;
  ChaosBasis basis;
  SpatialOperators spatial;
  KroneckerOperator op;   // sum_k G_k (x) K_k
  LowRank rhs;            // sum_k g_k (x) f_k, truncated
};

/// Builds mesh, KL data, chaos basis, spatial operators and the Kronecker
/// system for a benchmark.
Assembled build_system(const BenchmarkSpec& spec);

struct MomentFields {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  std::vector<Point> nodes;  // the three DG nodes per triangle
};

/// Mean = first chaos mode, variance = sum of squares of the others,
/// computed from the factors without reconstructing U.
MomentFields compute_moments(const Mesh& mesh, const LowRank& U);
MomentFields compute_moments_dense(const Mesh& mesh, const Eigen::MatrixXd& U);

struct SteadyResult {
  Assembled system;
  LowRank solution;
  SolveReport report;
};

SteadyResult solve_steady(const BenchmarkSpec& spec);

struct UnsteadyResult {
  Assembled system;
  std::vector<LowRank> states;       // one per time step
  std::vector<SolveReport> reports;  // one per time step
};

/// Backward Euler: (G_0 (x) (M + dt K_0) + sum G_k (x) dt K_k) u^{n+1}
///                = (G_0 (x) M) u^n + dt F. Steps warm-start from u^n.
UnsteadyResult solve_unsteady(const BenchmarkSpec& spec,
                              const LowRank* initial_state = nullptr);

struct MonteCarloStats {
  MomentFields moments;
  Eigen::VectorXd mean_stderr;      // standard error of the sample mean
  Eigen::VectorXd variance_stderr;  // standard error of the sample variance
  int samples_used = 0;
  int samples_skipped = 0;
};

/// Sample mean/variance over deterministic SIPG solves at iid
/// uniform(-sqrt(3), sqrt(3)) draws of the affine coefficient model.
MonteCarloStats monte_carlo_reference(const BenchmarkSpec& spec, int samples, std::uint64_t seed);

struct ConvergenceRow {
  double h;
  double error;
  double rate;  // log2(e_prev / e), 0 for the first row
};

/// Manufactured deterministic Poisson study: u = sin(pi x) sin(pi y) on the
/// unit square, energy-norm errors over the given nx resolutions.
std::vector<ConvergenceRow> convergence_study(const std::vector<int>& resolutions,
                                              double sigma = 10.0);

/// ||u_ref - u_Q||_xi for Q = 0..max_Q against a higher-degree reference,
/// for a one-parameter random diffusion problem; used to observe stochastic
/// interpolation convergence.
std::vector<double> stochastic_degree_errors(int nx, int max_q, double kappa, double ell);

/// Discrete L2(L2;Gamma) norm sqrt(trace(U^T M U)) from factors.
double state_l2_norm(const LowRank& U, const SparseMat& M);

// --- file output (17 significant digits) ---
void write_moments_csv(const std::string& path, const MomentFields& fields);
void write_report_json(const std::string& path, const std::vector<SolveReport>& reports,
                       const std::vector<std::string>& labels);
void write_history_csv(const std::string& path, const std::vector<SolveReport>& reports);

}  // namespace sdg
