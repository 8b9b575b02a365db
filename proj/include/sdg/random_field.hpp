#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace sdg {

/// Separable exponential covariance kappa^2 * prod_n exp(-|x_n - y_n| / ell_n)
/// on an axis-aligned rectangle.
struct CovarianceSpec {
  double kappa = 1.0;
  double ell1 = 1.0;
  double ell2 = 1.0;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
};

/// One analytic eigenpair of the 1D exponential-covariance operator on an
/// interval of half-width `half` centered at `mid`. Even pairs are
/// cos(omega (x - mid)) / norm, odd pairs sin(omega (x - mid)) / norm, with
/// eigenvalue lambda = 2 ell / (ell^2 omega^2 + 1).
struct Eigenpair1D {
  double lambda = 0.0;
  double omega = 0.0;
  bool even = true;
  double norm = 1.0;
  double mid = 0.0;
  double half = 0.0;

  double eval(double x) const;
};

/// The `count` largest eigenpairs on [a,b], sorted by decreasing eigenvalue.
std::vector<Eigenpair1D> solve_1d_eigenpairs(double ell, double a, double b, int count);

/// Truncated Karhunen-Loeve representation of a 2D random field. Eigenpairs
/// are tensor products of the per-axis 1D pairs, sorted by decreasing
/// eigenvalue (ties broken by lexicographic (i,j)).
class KLExpansion {
 public:
  using MeanField = std::function<double(const Eigen::Vector2d&)>;

  KLExpansion() = default;
  KLExpansion(MeanField mean, double kappa, std::vector<Eigenpair1D> axis1,
              std::vector<Eigenpair1D> axis2, int count, double domain_area);

  int size() const { return static_cast<int>(modes_.size()); }
  double kappa() const { return kappa_; }
  double captured_ratio() const { return captured_ratio_; }
  double lambda(int k) const { return modes_[k].lambda; }
  double phi(int k, const Eigen::Vector2d& x) const;
  double mean(const Eigen::Vector2d& x) const { return mean_(x); }

  /// mean(x) + kappa * sum_k sqrt(lambda_k) phi_k(x) xi_k
  double evaluate(const Eigen::Vector2d& x, std::span<const double> xi) const;

 private:
  struct Mode {
    double lambda;
    int i, j;
  };
  MeanField mean_ = [](const Eigen::Vector2d&) { return 0.0; };
  double kappa_ = 0.0;
  std::vector<Eigenpair1D> axis1_, axis2_;
  std::vector<Mode> modes_;
  double captured_ratio_ = 0.0;
};

/// KL expansion with the `count` largest 2D eigenpairs of `spec`.
KLExpansion assemble_2d_eigenpairs(const CovarianceSpec& spec, int count,
                                   KLExpansion::MeanField mean);

/// Smallest N whose leading 2D eigenvalue sum exceeds `ratio` times the
/// partial sum over the 1000 largest eigenvalues.
int select_truncation(const CovarianceSpec& spec, double ratio);

}  // namespace sdg
