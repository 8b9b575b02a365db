#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "sdg/mesh.hpp"

namespace sdg {

using ScalarField = std::function<double(const Point&)>;
using ModeScalarField = std::function<double(int, const Point&)>;
using ModeVectorField = std::function<Point(int, const Point&)>;

/// Coefficient data for the SIPG discretization of
///   -div(a grad u) + b . grad u = f,  u = u_d on the boundary,
/// with affine random coefficients
///   a(x,xi) = mean_diffusion(x) + sum_k diffusion_mode(k,x) xi_k,
///   b(x,xi) = mean_velocity(x)  + sum_k velocity_mode(k,x)  xi_k.
/// Mode fields carry their full scale (kappa sqrt(lambda_k) phi_k already
/// multiplied in). The interior-penalty integrand is weighted by the local
/// diffusion coefficient, (sigma / h_E) a(x), so the whole form stays affine
/// in the coefficients and each fluctuation block carries its mode weight.
/// `penalty_in_modes` switches to the unweighted penalty repeated verbatim
/// in every fluctuation block and boundary vector.
struct ProblemData {
  ScalarField mean_diffusion = [](const Point&) { return 1.0; };
  VelocityField mean_velocity = [](const Point&) { return Point(0.0, 0.0); };
  ScalarField source = [](const Point&) { return 0.0; };
  ScalarField dirichlet = [](const Point&) { return 0.0; };
  int n_modes = 0;
  ModeScalarField diffusion_mode = [](int, const Point&) { return 0.0; };
  ModeVectorField velocity_mode = [](int, const Point&) { return Point(0.0, 0.0); };
  double sigma = 10.0;
  bool penalty_in_modes = false;
  // penalty weight of the mean block; a realization carries its normalized
  // diffusion here so that single solves match the Kronecker split exactly
  ScalarField penalty_weight = [](const Point&) { return 1.0; };
};

using SparseMat = Eigen::SparseMatrix<double>;

/// Mean-coefficient SIPG stiffness matrix. Rows index test functions.
SparseMat assemble_K0(const Mesh& mesh, const std::vector<EdgeWind>& wind,
                      const ProblemData& data);

/// Fluctuation stiffness matrix for KL mode i (1-based). Inflow sets are the
/// ones classified against the mean velocity.
SparseMat assemble_Ki(const Mesh& mesh, const std::vector<EdgeWind>& wind,
                      const ProblemData& data, int i);

/// Right-hand side vector for mode i in {0..N}. f_0 carries the volume
/// source plus mean-coefficient boundary terms; f_i (i >= 1) only boundary
/// terms with mode-i coefficients.
Eigen::VectorXd assemble_rhs(const Mesh& mesh, const std::vector<EdgeWind>& wind,
                             const ProblemData& data, int i);

/// Block-diagonal DG mass matrix, exact for linear elements.
SparseMat assemble_mass(const Mesh& mesh);

struct SpatialOperators {
  std::vector<SparseMat> K;       // K_0..K_N
  std::vector<Eigen::VectorXd> f; // f_0..f_N
  SparseMat M;
};

SpatialOperators assemble_all(const Mesh& mesh, const std::vector<EdgeWind>& wind,
                              const ProblemData& data);

/// Value of the DG coefficient vector on triangle t at point x.
double dg_value(const Mesh& mesh, const Eigen::VectorXd& u, int t, const Point& x);
/// Gradient of the DG coefficient vector on triangle t (constant).
Point dg_gradient(const Mesh& mesh, const Eigen::VectorXd& u, int t);

/// DG energy norm of (exact - u_h): weighted gradient, penalty jumps, and
/// |b.n|-weighted boundary/upwind terms. Pass exact = nullptr for the norm
/// of u_h itself.
struct ExactSolution {
  ScalarField value;
  std::function<Point(const Point&)> gradient;
};

double energy_error(const Mesh& mesh, const ProblemData& data, const Eigen::VectorXd& u_h,
                    const ExactSolution* exact);

}  // namespace sdg
