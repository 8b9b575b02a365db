#include "sdg/chaos.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>

namespace sdg {

namespace {

std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    std::uint64_t next = r * (n - k + i);
    if (next / (n - k + i) != r) throw std::invalid_argument("enumerate_indices: P overflows");
    r = next / i;
  }
  return r;
}

void enumerate_degree(int dim, int remaining, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
  if (dim == 1) {
    current.push_back(remaining);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int d = 0; d <= remaining; ++d) {
    current.push_back(d);
    enumerate_degree(dim - 1, remaining - d, current, out);
    current.pop_back();
  }
}

}  // namespace

MultiIndexSet enumerate_indices(int N, int Q) {
  if (N < 1) throw std::invalid_argument("enumerate_indices: N must be >= 1");
  if (Q < 0) throw std::invalid_argument("enumerate_indices: Q must be >= 0");
  const std::uint64_t P = binomial(N + Q, Q);
  if (P > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
    throw std::invalid_argument("enumerate_indices: P exceeds index range");

  MultiIndexSet set;
  set.N = N;
  set.Q = Q;
  set.indices.reserve(P);
  std::vector<int> current;
  for (int degree = 0; degree <= Q; ++degree) enumerate_degree(N, degree, current, set.indices);
  return set;
}

double legendre_eval(int k, double x) {
  if (k < 0) throw std::invalid_argument("legendre_eval: degree must be >= 0");
  // psi_{k+1} = sqrt(2k+1) sqrt(2k+3) / ((k+1) sqrt(3)) x psi_k
  //           - k sqrt(2k+3) / ((k+1) sqrt(2k-1)) psi_{k-1},  psi_0 = 1.
  double prev = 0.0;
  double curr = 1.0;
  const double sqrt3 = std::sqrt(3.0);
  for (int n = 0; n < k; ++n) {
    double next = std::sqrt(2.0 * n + 1.0) * std::sqrt(2.0 * n + 3.0) / ((n + 1.0) * sqrt3) * x * curr;
    if (n >= 1) next -= n * std::sqrt(2.0 * n + 3.0) / ((n + 1.0) * std::sqrt(2.0 * n - 1.0)) * prev;
    prev = curr;
    curr = next;
  }
  return curr;
}

ChaosBasis build_g_matrices(const MultiIndexSet& set) {
  ChaosBasis basis;
  basis.set = set;
  const int P = set.size();
  const int N = set.N;
  const double sqrt3 = std::sqrt(3.0);

  std::map<std::vector<int>, int> position;
  for (int i = 0; i < P; ++i) position.emplace(set.indices[i], i);

  basis.G.resize(N + 1);
  basis.g.resize(N + 1);

  basis.G[0] = Eigen::SparseMatrix<double>(P, P);
  basis.G[0].setIdentity();

  for (int k = 1; k <= N; ++k) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < P; ++i) {
      std::vector<int> alpha = set.indices[i];
      const int ik = alpha[k - 1];
      // coupling to the index with component k raised by one
      alpha[k - 1] = ik + 1;
      if (auto it = position.find(alpha); it != position.end()) {
        const double value = (ik + 1.0) * sqrt3 / std::sqrt((2.0 * ik + 1.0) * (2.0 * ik + 3.0));
        triplets.emplace_back(i, it->second, value);
      }
      // and lowered by one
      if (ik > 0) {
        alpha[k - 1] = ik - 1;
        auto it = position.find(alpha);
        const double value = ik * sqrt3 / std::sqrt((2.0 * ik + 1.0) * (2.0 * ik - 1.0));
        triplets.emplace_back(i, it->second, value);
      }
      alpha[k - 1] = ik;
    }
    basis.G[k] = Eigen::SparseMatrix<double>(P, P);
    basis.G[k].setFromTriplets(triplets.begin(), triplets.end());
  }

  for (int k = 0; k <= N; ++k) basis.g[k] = Eigen::VectorXd(basis.G[k].col(0));
  return basis;
}

}  // namespace sdg
