#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "sdg/chaos.hpp"
#include "sdg/dg_assembly.hpp"
#include "sdg/precond.hpp"

using namespace sdg;

namespace {

std::mt19937 rng(5);

LowRank random_lowrank(int rows, int cols, int rank) {
  std::normal_distribution<double> gauss;
  LowRank x;
  x.W.resize(rows, rank);
  x.V.resize(cols, rank);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < rank; ++j) x.W(i, j) = gauss(rng);
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < rank; ++j) x.V(i, j) = gauss(rng);
  return x;
}

// small SG operator from the two-triangle mesh
KroneckerOperator two_triangle_operator(int n_modes, int q, bool zero_modes) {
  Mesh mesh = build_rect_mesh(0, 1, 0, 1, 1, 1);
  ProblemData data;
  data.mean_diffusion = [](const Point& x) { return 1.5 + 0.2 * x.x(); };
  data.mean_velocity = [](const Point&) { return Point(0.7, 0.4); };
  data.n_modes = n_modes;
  if (!zero_modes) {
    data.diffusion_mode = [](int k, const Point& x) {
      return 0.15 * std::cos(k * x.x() + 0.3 * x.y());
    };
  }
  auto wind = classify_edges(mesh, data.mean_velocity);
  SpatialOperators ops = assemble_all(mesh, wind, data);
  ChaosBasis basis = build_g_matrices(enumerate_indices(n_modes, q));
  KroneckerOperator op;
  op.terms.resize(n_modes + 1);
  for (int k = 0; k <= n_modes; ++k) {
    op.terms[k].G = basis.G[k];
    op.terms[k].K = ops.K[k];
  }
  return op;
}

}  // namespace

TEST_SUITE("precond") {

TEST_CASE("ullmann coefficients match the dense trace oracle") {
  KroneckerOperator op = two_triangle_operator(3, 2, false);
  Preconditioner pc = Preconditioner::build(PrecondKind::ullmann, op);
  const Eigen::VectorXd& c = pc.coefficients();
  REQUIRE(c.size() == 4);
  CHECK(c[0] == 1.0);
  Eigen::MatrixXd k0 = Eigen::MatrixXd(op.terms[0].K);
  for (int k = 1; k <= 3; ++k) {
    Eigen::MatrixXd kk = Eigen::MatrixXd(op.terms[k].K);
    const double expected = (kk.transpose() * k0).trace() / (k0.transpose() * k0).trace();
    CHECK(c[k] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(c[k] != 0.0);
  }
}

TEST_CASE("ullmann with zero fluctuation blocks degenerates to mean-based") {
  KroneckerOperator op = two_triangle_operator(2, 2, true);
  Preconditioner pc = Preconditioner::build(PrecondKind::ullmann, op);
  CHECK(pc.coefficients()[1] == 0.0);
  CHECK(pc.coefficients()[2] == 0.0);
  LowRank x = random_lowrank(6, 6, 2);
  Preconditioner p0 = Preconditioner::build(PrecondKind::mean_based, op);
  CHECK((pc.apply_inverse(x).dense() - p0.apply_inverse(x).dense()).norm() <= 1e-12);
}

TEST_CASE("apply followed by the preconditioner operator is the identity") {
  KroneckerOperator op = two_triangle_operator(2, 3, false);
  LowRank x = random_lowrank(6, 10, 3);
  for (auto kind : {PrecondKind::mean_based, PrecondKind::ullmann}) {
    Preconditioner pc = Preconditioner::build(kind, op);
    LowRank y = pc.apply_inverse(x);
    CHECK(y.rank() == x.rank());
    Eigen::MatrixXd roundtrip = pc.apply_dense(y.dense());
    CHECK((roundtrip - x.dense()).norm() <= 1e-10 * x.dense().norm());
  }
}

TEST_CASE("kind none passes the input through") {
  KroneckerOperator op = two_triangle_operator(1, 2, false);
  Preconditioner pc = Preconditioner::build(PrecondKind::none, op);
  LowRank x = random_lowrank(6, 3, 2);
  CHECK((pc.apply_inverse(x).dense() - x.dense()).norm() == 0.0);
}

TEST_CASE("mean-based preconditioner inverts the zero-fluctuation operator") {
  KroneckerOperator op = two_triangle_operator(2, 3, true);  // A = G_0 (x) K_0
  Preconditioner pc = Preconditioner::build(PrecondKind::mean_based, op);
  LowRank x = random_lowrank(6, 10, 3);
  // P0^{-1} A x = x up to factorization roundoff
  LowRank ax = kron_apply(op, x);
  LowRank y = pc.apply_inverse(ax);
  CHECK((y.dense() - x.dense()).norm() <= 1e-10 * x.dense().norm());
}

TEST_CASE("dense and factored application agree") {
  KroneckerOperator op = two_triangle_operator(2, 2, false);
  LowRank x = random_lowrank(6, 6, 2);
  for (auto kind : {PrecondKind::mean_based, PrecondKind::ullmann}) {
    Preconditioner pc = Preconditioner::build(kind, op);
    CHECK((pc.apply_inverse(x).dense() - pc.apply_inverse_dense(x.dense())).norm() <=
          1e-12 * x.dense().norm());
  }
}

}  // TEST_SUITE
