#pragma once

#include <Eigen/Sparse>
#include <vector>

namespace sdg {

/// All multi-indices alpha in N^N with |alpha| <= Q, in graded lexicographic
/// order (by total degree, then lexicographic). Cardinality (N+Q)! / (N! Q!).
struct MultiIndexSet {
  int N = 0;
  int Q = 0;
  std::vector<std::vector<int>> indices;

  int size() const { return static_cast<int>(indices.size()); }
};

MultiIndexSet enumerate_indices(int N, int Q);

/// Legendre polynomial of degree k, orthonormal with respect to the uniform
/// density on (-sqrt(3), sqrt(3)).
double legendre_eval(int k, double x);

/// Stochastic Galerkin matrices G_0..G_N and vectors g_0..g_N for the
/// normalized Legendre basis: G_0 = I, G_k(i,j) = <xi_k psi_i psi_j>, and
/// g_i is the first column of G_i.
struct ChaosBasis {
  MultiIndexSet set;
  std::vector<Eigen::SparseMatrix<double>> G;
  std::vector<Eigen::VectorXd> g;

  int P() const { return set.size(); }
  int N() const { return set.N; }
};

ChaosBasis build_g_matrices(const MultiIndexSet& set);

}  // namespace sdg
