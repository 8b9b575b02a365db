#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

namespace sdg {

/// Factored matrix U = W V^T with W (N_d x r) and V (P x r).
struct LowRank {
  Eigen::MatrixXd W;
  Eigen::MatrixXd V;

  LowRank() = default;
  LowRank(Eigen::MatrixXd w, Eigen::MatrixXd v);

  int rows() const { return static_cast<int>(W.rows()); }
  int cols() const { return static_cast<int>(V.rows()); }
  int rank() const { return static_cast<int>(W.cols()); }

  static LowRank zero(int n_rows, int n_cols);
  Eigen::MatrixXd dense() const { return W * V.transpose(); }
};

/// A = sum_k G_k (x) K_k with K_k spatial (N_d x N_d) and G_k stochastic
/// (P x P).
struct KroneckerTerm {
  Eigen::SparseMatrix<double> G;
  Eigen::SparseMatrix<double> K;
};

struct KroneckerOperator {
  std::vector<KroneckerTerm> terms;

  int spatial_dim() const { return terms.empty() ? 0 : static_cast<int>(terms[0].K.rows()); }
  int stochastic_dim() const { return terms.empty() ? 0 : static_cast<int>(terms[0].G.rows()); }

  /// Checks square terms of matching dimensions.
  void validate() const;

  /// mat(A vec(U)) for a dense U, i.e. sum_k K_k U G_k^T.
  Eigen::MatrixXd apply_dense(const Eigen::MatrixXd& U) const;

  /// Explicit sparse assembly of sum_k G_k (x) K_k (oracle-scale only).
  Eigen::SparseMatrix<double> assemble_global() const;
};

/// Rank truncation via QR of both factors and an SVD of the small core;
/// keeps singular values above eps_rel * sigma_1, capped at rank_cap. The
/// full-size product W V^T is never formed.
LowRank truncate(const LowRank& X, double eps_rel, int rank_cap = 200);

/// Factored operator application: W' = [K_0 W | ... | K_N W],
/// V' = [G_0 V | ... | G_N V]; rank grows to (N+1) r.
LowRank kron_apply(const KroneckerOperator& op, const LowRank& X);

/// trace(Y^T Z) computed from r_Y x r_Z products only.
double inner(const LowRank& Y, const LowRank& Z);

/// Frobenius norm sqrt(inner(X,X)).
double norm(const LowRank& X);

/// Frobenius norm computed through orthogonal factors; accurate for heavily
/// cancelling factor pairs (residuals), unlike the Gram form.
double norm_stable(const LowRank& X);

/// alpha X + Y by factor concatenation; rank r_X + r_Y.
LowRank axpy(double alpha, const LowRank& X, const LowRank& Y);

/// Memory of the factor pair in KB, 8-byte scalars: 8 r (N_d + P) / 1024.
double memory_kb(int rank, int n_rows, int n_cols);
double memory_kb(const LowRank& X);
/// Same, rounded up at 0.1 KB granularity (the tables' printed precision).
double memory_kb_printed(int rank, int n_rows, int n_cols);

}  // namespace sdg
