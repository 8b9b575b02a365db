#include "sdg/precond.hpp"

#include <stdexcept>

namespace sdg {

Preconditioner Preconditioner::build(PrecondKind kind, const KroneckerOperator& op) {
  Preconditioner pc;
  pc.kind_ = kind;
  if (kind == PrecondKind::none) return pc;

  op.validate();
  pc.k0_ = op.terms[0].K;
  pc.k0_lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  pc.k0_lu_->compute(pc.k0_);
  if (pc.k0_lu_->info() != Eigen::Success)
    throw std::runtime_error("Preconditioner: K_0 factorization failed (singular mean block?)");

  if (kind == PrecondKind::ullmann) {
    const int n_terms = static_cast<int>(op.terms.size());
    const double denom = op.terms[0].K.cwiseProduct(op.terms[0].K).sum();
    if (!(denom > 0.0)) throw std::runtime_error("Preconditioner: trace(K_0^T K_0) vanishes");
    pc.coeff_.resize(n_terms);
    Eigen::SparseMatrix<double> gtilde = op.terms[0].G;
    pc.coeff_[0] = 1.0;
    for (int k = 1; k < n_terms; ++k) {
      pc.coeff_[k] = op.terms[k].K.cwiseProduct(op.terms[0].K).sum() / denom;
      gtilde = gtilde + Eigen::SparseMatrix<double>(pc.coeff_[k] * op.terms[k].G);
    }
    pc.gtilde_ = Eigen::MatrixXd(gtilde);
    pc.gtilde_lu_ = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(pc.gtilde_);
  } else {
    pc.coeff_.resize(1);
    pc.coeff_[0] = 1.0;
  }
  return pc;
}

LowRank Preconditioner::apply_inverse(const LowRank& X) const {
  if (kind_ == PrecondKind::none) return X;
  if (!k0_lu_) throw std::runtime_error("Preconditioner: not built");
  if (X.rows() != k0_.rows()) throw std::invalid_argument("Preconditioner: dimension mismatch");
  if (X.rank() == 0) return X;  // SparseLU cannot take zero-column right-hand sides
  LowRank out;
  out.W = k0_lu_->solve(X.W);
  // (Gtilde (x) K_0)^{-1} vec(U) = vec(K_0^{-1} U Gtilde^{-T}); Gtilde is
  // symmetric, and G_0 = I leaves V untouched in the mean-based case.
  out.V = (kind_ == PrecondKind::ullmann) ? Eigen::MatrixXd(gtilde_lu_->solve(X.V)) : X.V;
  return out;
}

Eigen::MatrixXd Preconditioner::apply_inverse_dense(const Eigen::MatrixXd& X) const {
  if (kind_ == PrecondKind::none) return X;
  if (!k0_lu_) throw std::runtime_error("Preconditioner: not built");
  if (X.cols() == 0) return X;
  Eigen::MatrixXd out = k0_lu_->solve(X);
  if (kind_ == PrecondKind::ullmann) out = gtilde_lu_->solve(out.transpose()).transpose();
  return out;
}

Eigen::MatrixXd Preconditioner::apply_dense(const Eigen::MatrixXd& X) const {
  if (kind_ == PrecondKind::none) return X;
  Eigen::MatrixXd out = k0_ * X;
  if (kind_ == PrecondKind::ullmann) out = out * gtilde_.transpose();
  return out;
}

}  // namespace sdg
