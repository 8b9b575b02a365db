#include <doctest.h>

#include <algorithm>
#include <set>

#include "sdg/mesh.hpp"

using namespace sdg;

TEST_SUITE("mesh") {

TEST_CASE("unit square with one cell") {
  Mesh mesh = build_rect_mesh(0, 1, 0, 1, 1, 1);
  CHECK(mesh.n_triangles() == 2);
  CHECK(mesh.edges.size() == 5);
  int boundary = 0;
  for (const auto& e : mesh.edges) boundary += e.boundary ? 1 : 0;
  CHECK(boundary == 4);
  CHECK(mesh.n_dofs() == 6);
}

TEST_CASE("table-scale mesh has 6144 dofs") {
  Mesh mesh = build_rect_mesh(-1, 1, -1, 1, 32, 32);
  CHECK(mesh.n_dofs() == 6144);
  CHECK(mesh.n_triangles() == 2 * 32 * 32);
}

TEST_CASE("interior edges have two incident triangles") {
  Mesh mesh = build_rect_mesh(0, 1, 0, 1, 2, 2);
  CHECK(mesh.n_triangles() == 8);
  for (const auto& e : mesh.edges) {
    CHECK(e.left >= 0);
    if (e.boundary)
      CHECK(e.right == -1);
    else
      CHECK(e.right >= 0);
  }
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(build_rect_mesh(0, 1, 0, 1, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_rect_mesh(0, 1, 0, 1, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_rect_mesh(1, 0, 0, 1, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_rect_mesh(0, 1, 2, 2, 3, 3), std::invalid_argument);
}

TEST_CASE("triangle areas are positive and sum to the rectangle area") {
  Mesh mesh = build_rect_mesh(-1, 2, 0.5, 3, 7, 5);
  double sum = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CHECK(mesh.area[t] > 0.0);
    sum += mesh.area[t];
  }
  CHECK(sum == doctest::Approx(3.0 * 2.5).epsilon(1e-12));
}

TEST_CASE("normals point from the left to the right triangle") {
  Mesh mesh = build_rect_mesh(0, 1, 0, 1, 3, 3);
  for (const auto& e : mesh.edges) {
    if (e.boundary) {
      // outward: away from the single incident triangle
      CHECK(e.normal.dot(mesh.edge_midpoint(e) - mesh.centroid(e.left)) > 0.0);
    } else {
      CHECK(e.normal.dot(mesh.centroid(e.right) - mesh.centroid(e.left)) > 0.0);
    }
    CHECK(e.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("refining by two halves the maximum diameter") {
  Mesh coarse = build_rect_mesh(0, 1, 0, 1, 4, 4);
  Mesh fine = build_rect_mesh(0, 1, 0, 1, 8, 8);
  CHECK(fine.max_diameter() == doctest::Approx(0.5 * coarse.max_diameter()).epsilon(1e-14));
}

TEST_CASE("no hanging nodes: triangle pairs share nothing, a vertex, or a full edge") {
  Mesh mesh = build_rect_mesh(0, 1, 0, 1, 2, 2);
  std::set<std::pair<int, int>> edge_pairs;
  for (const auto& e : mesh.edges)
    if (!e.boundary) edge_pairs.insert(std::minmax(e.left, e.right));
  for (int a = 0; a < mesh.n_triangles(); ++a) {
    for (int b = a + 1; b < mesh.n_triangles(); ++b) {
      std::set<int> va(mesh.triangles[a].begin(), mesh.triangles[a].end());
      int shared = 0;
      for (int v : mesh.triangles[b]) shared += va.count(v);
      CHECK(shared <= 2);
      if (shared == 2) CHECK(edge_pairs.count({a, b}) == 1);
    }
  }
}

TEST_CASE("classification: vertical wind marks the bottom boundary as inflow") {
  Mesh mesh = build_rect_mesh(-1, 1, -1, 1, 4, 4);
  auto wind = classify_edges(mesh, [](const Point&) { return Point(0, 1); });
  for (size_t i = 0; i < mesh.edges.size(); ++i) {
    const Edge& e = mesh.edges[i];
    if (!e.boundary) continue;
    const Point mid = mesh.edge_midpoint(e);
    if (std::abs(mid.y() + 1.0) < 1e-12) CHECK(wind[i].inflow_left);
    if (std::abs(mid.y() - 1.0) < 1e-12) CHECK(!wind[i].inflow_left);
  }
}

TEST_CASE("classification: diagonal wind marks left and bottom as inflow") {
  Mesh mesh = build_rect_mesh(0, 1, 0, 1, 4, 4);
  auto wind = classify_edges(mesh, [](const Point&) { return Point(1, 1); });
  for (size_t i = 0; i < mesh.edges.size(); ++i) {
    const Edge& e = mesh.edges[i];
    if (!e.boundary) continue;
    const Point mid = mesh.edge_midpoint(e);
    const bool left_or_bottom = std::abs(mid.x()) < 1e-12 || std::abs(mid.y()) < 1e-12;
    CHECK(wind[i].inflow_left == left_or_bottom);
  }
}

TEST_CASE("classification: zero wind is outflow everywhere") {
  Mesh mesh = build_rect_mesh(0, 1, 0, 1, 3, 3);
  auto wind = classify_edges(mesh, [](const Point&) { return Point(0, 0); });
  for (const auto& w : wind) {
    CHECK(!w.inflow_left);
    CHECK(!w.inflow_right);
  }
}

TEST_CASE("barycentric coordinates and gradients are consistent") {
  Mesh mesh = build_rect_mesh(0, 2, 0, 1, 3, 2);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      // basis i is 1 at vertex i, 0 at the others
      auto bc = mesh.barycentric(t, mesh.vertices[mesh.triangles[t][i]]);
      for (int j = 0; j < 3; ++j) CHECK(bc[j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
    Point g = mesh.basis_gradient(t, 0) + mesh.basis_gradient(t, 1) + mesh.basis_gradient(t, 2);
    CHECK(g.norm() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

}  // TEST_SUITE
