#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

namespace sdg {

using Point = Eigen::Vector2d;

struct Edge {
  std::array<int, 2> v;         // endpoint vertex ids
  int left = -1;                // triangle on the side the normal points away from
  int right = -1;               // -1 on boundary edges
  Point normal;                 // unit normal, oriented left -> right (outward on boundary)
  double length = 0.0;          // h_E
  bool boundary = false;
};

/// Conforming triangulation of an axis-aligned rectangle.
///
/// Triangles are stored counterclockwise; every interior edge knows both
/// incident triangles and carries a unit normal pointing from `left` to
/// `right`. Immutable after construction.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Edge> edges;
  std::vector<double> diameter;  // h_K per triangle
  std::vector<double> area;      // |K| per triangle
  double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;

  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_dofs() const { return 3 * n_triangles(); }  // piecewise-linear DG
  double max_diameter() const;
  Point centroid(int t) const;
  Point edge_midpoint(const Edge& e) const;

  // gradient of the local P1 basis function `i` on triangle `t` (constant)
  Point basis_gradient(int t, int i) const;
  // barycentric coordinates of x with respect to triangle t
  std::array<double, 3> barycentric(int t, const Point& x) const;
};

/// Uniform criss-cross triangulation: each of the nx*ny grid cells is split
/// along its bottom-left/top-right diagonal into two triangles.
Mesh build_rect_mesh(double x_lo, double x_hi, double y_lo, double y_hi, int nx, int ny);

using VelocityField = std::function<Point(const Point&)>;

/// Upwind data for one edge: velocity dotted with the stored normal at the
/// edge midpoint. The edge is inflow for the left triangle iff b_dot_n < 0,
/// inflow for the right triangle iff b_dot_n > 0; b.n = 0 counts as outflow
/// on both sides.
struct EdgeWind {
  double b_dot_n = 0.0;
  bool inflow_left = false;
  bool inflow_right = false;
};

std::vector<EdgeWind> classify_edges(const Mesh& mesh, const VelocityField& velocity);

}  // namespace sdg
