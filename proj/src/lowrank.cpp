#include "sdg/lowrank.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdg {

LowRank::LowRank(Eigen::MatrixXd w, Eigen::MatrixXd v) : W(std::move(w)), V(std::move(v)) {
  if (W.cols() != V.cols()) throw std::invalid_argument("LowRank: factor column counts differ");
}

LowRank LowRank::zero(int n_rows, int n_cols) {
  LowRank x;
  x.W.resize(n_rows, 0);
  x.V.resize(n_cols, 0);
  return x;
}

void KroneckerOperator::validate() const {
  if (terms.empty()) throw std::invalid_argument("KroneckerOperator: no terms");
  const int nd = spatial_dim();
  const int p = stochastic_dim();
  for (const auto& t : terms) {
    if (t.K.rows() != nd || t.K.cols() != nd || t.G.rows() != p || t.G.cols() != p)
      throw std::invalid_argument("KroneckerOperator: inconsistent term dimensions");
  }
}

Eigen::MatrixXd KroneckerOperator::apply_dense(const Eigen::MatrixXd& U) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(U.rows(), U.cols());
  for (const auto& t : terms) out += t.K * U * Eigen::MatrixXd(t.G).transpose();
  return out;
}

Eigen::SparseMatrix<double> KroneckerOperator::assemble_global() const {
  const int nd = spatial_dim();
  const int p = stochastic_dim();
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& term : terms) {
    for (int gc = 0; gc < term.G.outerSize(); ++gc) {
      for (Eigen::SparseMatrix<double>::InnerIterator git(term.G, gc); git; ++git) {
        for (int kc = 0; kc < term.K.outerSize(); ++kc) {
          for (Eigen::SparseMatrix<double>::InnerIterator kit(term.K, kc); kit; ++kit) {
            trip.emplace_back(git.row() * nd + kit.row(), git.col() * nd + kit.col(),
                              git.value() * kit.value());
          }
        }
      }
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(nd) * p,
                                static_cast<Eigen::Index>(nd) * p);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

namespace {

struct CoreSvd {
  Eigen::MatrixXd qw, qv;        // thin orthonormal bases
  Eigen::BDCSVD<Eigen::MatrixXd> svd;
  double gram_scale = 0.0;       // ||R_W||_F ||R_V||_F, bounds cancellation noise
};

CoreSvd core_svd(const LowRank& X) {
  CoreSvd out;
  const int r = X.rank();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_w(X.W);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_v(X.V);
  const int rw = std::min<int>(X.W.rows(), r);
  const int rv = std::min<int>(X.V.rows(), r);
  Eigen::MatrixXd Rw = qr_w.matrixQR().topRows(rw).triangularView<Eigen::Upper>();
  Eigen::MatrixXd Rv = qr_v.matrixQR().topRows(rv).triangularView<Eigen::Upper>();
  out.qw = qr_w.householderQ() * Eigen::MatrixXd::Identity(X.W.rows(), rw);
  out.qv = qr_v.householderQ() * Eigen::MatrixXd::Identity(X.V.rows(), rv);
  out.gram_scale = Rw.norm() * Rv.norm();
  Eigen::MatrixXd core = Rw * Rv.transpose();
  out.svd.compute(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return out;
}

}  // namespace

LowRank truncate(const LowRank& X, double eps_rel, int rank_cap) {
  if (!(eps_rel >= 0.0)) throw std::invalid_argument("truncate: tolerance must be >= 0");
  if (X.rank() == 0) return X;

  CoreSvd cs = core_svd(X);
  const auto& sigma = cs.svd.singularValues();
  if (sigma.size() == 0 || !(sigma[0] > 0.0)) return LowRank::zero(X.rows(), X.cols());

  // Products of nearly cancelling factors leave singular values that are pure
  // rounding noise; drop anything below the GEMM error bound of the core.
  const double noise_floor = 4.0 * X.rank() * std::numeric_limits<double>::epsilon() *
                             cs.gram_scale;
  const double threshold = std::max(eps_rel * sigma[0], noise_floor);

  int keep = 0;
  while (keep < static_cast<int>(sigma.size()) && sigma[keep] > threshold) ++keep;
  keep = std::min({keep, rank_cap, X.rows(), X.cols()});
  if (keep == 0) return LowRank::zero(X.rows(), X.cols());

  LowRank out;
  out.W = cs.qw * cs.svd.matrixU().leftCols(keep) * sigma.head(keep).asDiagonal();
  out.V = cs.qv * cs.svd.matrixV().leftCols(keep);
  return out;
}

LowRank kron_apply(const KroneckerOperator& op, const LowRank& X) {
  op.validate();
  if (X.rows() != op.spatial_dim() || X.cols() != op.stochastic_dim())
    throw std::invalid_argument("kron_apply: operand dimensions do not match operator");
  const int r = X.rank();
  const int n_terms = static_cast<int>(op.terms.size());
  LowRank out;
  out.W.resize(X.rows(), static_cast<Eigen::Index>(n_terms) * r);
  out.V.resize(X.cols(), static_cast<Eigen::Index>(n_terms) * r);
  for (int k = 0; k < n_terms; ++k) {
    out.W.middleCols(static_cast<Eigen::Index>(k) * r, r) = op.terms[k].K * X.W;
    out.V.middleCols(static_cast<Eigen::Index>(k) * r, r) = op.terms[k].G * X.V;
  }
  return out;
}

double inner(const LowRank& Y, const LowRank& Z) {
  if (Y.rows() != Z.rows() || Y.cols() != Z.cols())
    throw std::invalid_argument("inner: dimension mismatch");
  if (Y.rank() == 0 || Z.rank() == 0) return 0.0;
  // trace((V_Z^T V_Y)(W_Y^T W_Z)) via entrywise product of the two small Grams
  Eigen::MatrixXd wy_wz = Y.W.transpose() * Z.W;
  Eigen::MatrixXd vy_vz = Y.V.transpose() * Z.V;
  return wy_wz.cwiseProduct(vy_vz).sum();
}

double norm(const LowRank& X) { return std::sqrt(std::max(inner(X, X), 0.0)); }

double norm_stable(const LowRank& X) {
  if (X.rank() == 0) return 0.0;
  CoreSvd cs = core_svd(X);
  return cs.svd.singularValues().norm();
}

LowRank axpy(double alpha, const LowRank& X, const LowRank& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw std::invalid_argument("axpy: dimension mismatch");
  LowRank out;
  out.W.resize(X.rows(), X.rank() + Y.rank());
  out.V.resize(X.cols(), X.rank() + Y.rank());
  out.W << alpha * X.W, Y.W;
  out.V << X.V, Y.V;
  return out;
}

double memory_kb(int rank, int n_rows, int n_cols) {
  return 8.0 * rank * (static_cast<double>(n_rows) + n_cols) / 1024.0;
}

double memory_kb(const LowRank& X) { return memory_kb(X.rank(), X.rows(), X.cols()); }

double memory_kb_printed(int rank, int n_rows, int n_cols) {
  return std::ceil(memory_kb(rank, n_rows, n_cols) * 10.0 - 1e-9) / 10.0;
}

}  // namespace sdg
