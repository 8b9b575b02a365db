#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdg/lowrank.hpp"
#include "sdg/precond.hpp"

namespace sdg {

enum class Method { cg, bicgstab, qmrcgstab, gmres };

struct SolverConfig {
  Method method = Method::gmres;
  double eps_tol = 1e-4;    // relative residual stop
  double eps_trunc = 1e-6;  // truncation tolerance (eps_trunc <= eps_tol)
  int maxit = 100;
  PrecondKind precond = PrecondKind::mean_based;
  int rank_cap = 200;
};

enum class Termination { converged, maxit, breakdown };

struct HistoryEntry {
  double residual;  // relative
  int rank;
};

struct SolveReport {
  double iterations = 0.0;  // halves possible for full-rank BiCGstab-family
  int final_rank = 0;
  double relative_residual = 0.0;  // recomputed from scratch
  double wall_seconds = 0.0;
  double memory_kb = 0.0;
  std::vector<HistoryEntry> history;
  Termination reason = Termination::maxit;
};

std::string termination_name(Termination t);
std::string method_name(Method m);

struct SolveResult {
  LowRank solution;
  SolveReport report;
};

/// Low-rank solvers; the iterate is truncated at eps_trunc exactly at the
/// places the listings mark. `guess` warm-starts (unsteady stepping).
SolveResult lr_cg(const KroneckerOperator& op, const Preconditioner& pc, const LowRank& F,
                  const SolverConfig& cfg, const LowRank* guess = nullptr);
SolveResult lr_bicgstab(const KroneckerOperator& op, const Preconditioner& pc, const LowRank& F,
                        const SolverConfig& cfg, const LowRank* guess = nullptr);
SolveResult lr_qmrcgstab(const KroneckerOperator& op, const Preconditioner& pc, const LowRank& F,
                         const SolverConfig& cfg, const LowRank* guess = nullptr);
SolveResult lr_gmres(const KroneckerOperator& op, const Preconditioner& pc, const LowRank& F,
                     const SolverConfig& cfg, const LowRank* guess = nullptr);
SolveResult lr_solve(const KroneckerOperator& op, const Preconditioner& pc, const LowRank& F,
                     const SolverConfig& cfg, const LowRank* guess = nullptr);

/// Assembles the global sparse Kronecker sum and solves directly; the
/// primary oracle. F and the result are in mat form (N_d x P).
Eigen::MatrixXd full_direct(const KroneckerOperator& op, const Eigen::MatrixXd& F);

/// Full-rank (untruncated) variants of the iterative solvers on dense
/// N_d x P states. BiCGstab-family counts half iterations.
struct DenseSolveResult {
  Eigen::MatrixXd solution;
  SolveReport report;
};

DenseSolveResult full_iterative(const KroneckerOperator& op, const Preconditioner& pc,
                                const Eigen::MatrixXd& F, const SolverConfig& cfg);

/// ||F - A(U)|| / ||F|| recomputed from fresh factored products.
double fresh_relative_residual(const KroneckerOperator& op, const LowRank& U, const LowRank& F);

}  // namespace sdg
