#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>

#include "sdg/lowrank.hpp"

namespace sdg {

enum class PrecondKind { none, mean_based, ullmann };

/// Mean-based P_0 = G_0 (x) K_0 and Ullmann P_1 = Gtilde (x) K_0 with
/// Gtilde = sum_k [trace(K_k^T K_0) / trace(K_0^T K_0)] G_k, both applied
/// through one sparse factorization of K_0. Immutable after build.
class Preconditioner {
 public:
  static Preconditioner build(PrecondKind kind, const KroneckerOperator& op);

  PrecondKind kind() const { return kind_; }
  const Eigen::VectorXd& coefficients() const { return coeff_; }  // c_0..c_N (ullmann)

  /// Factored application: mean-based (K_0^{-1} W, V); Ullmann
  /// (K_0^{-1} W, Gtilde^{-1} V). Rank is unchanged.
  LowRank apply_inverse(const LowRank& X) const;

  /// Same operation on a dense N_d x P matrix (full-rank solvers).
  Eigen::MatrixXd apply_inverse_dense(const Eigen::MatrixXd& X) const;

  /// mat(P vec(X)) for round-trip checks.
  Eigen::MatrixXd apply_dense(const Eigen::MatrixXd& X) const;

 private:
  PrecondKind kind_ = PrecondKind::none;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> k0_lu_;
  Eigen::SparseMatrix<double> k0_;
  Eigen::MatrixXd gtilde_;
  std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> gtilde_lu_;
  Eigen::VectorXd coeff_;
};

}  // namespace sdg
