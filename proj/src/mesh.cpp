#include "sdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace sdg {

double Mesh::max_diameter() const {
  double h = 0.0;
  for (double hk : diameter) h = std::max(h, hk);
  return h;
}

Point Mesh::centroid(int t) const {
  const auto& tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

Point Mesh::edge_midpoint(const Edge& e) const {
  return 0.5 * (vertices[e.v[0]] + vertices[e.v[1]]);
}

Point Mesh::basis_gradient(int t, int i) const {
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[(i + 1) % 3]];
  const Point& b = vertices[tri[(i + 2) % 3]];
  // grad of the barycentric coordinate opposite edge (a,b)
  return Point(a.y() - b.y(), b.x() - a.x()) / (2.0 * area[t]);
}

std::array<double, 3> Mesh::barycentric(int t, const Point& x) const {
  const auto& tri = triangles[t];
  const Point& p0 = vertices[tri[0]];
  const Point& p1 = vertices[tri[1]];
  const Point& p2 = vertices[tri[2]];
  const double twoA = 2.0 * area[t];
  auto lam = [&](const Point& a, const Point& b) {
    return ((a.y() - b.y()) * (x.x() - b.x()) + (b.x() - a.x()) * (x.y() - b.y())) / twoA;
  };
  double l0 = lam(p1, p2);
  double l1 = lam(p2, p0);
  return {l0, l1, 1.0 - l0 - l1};
}

Mesh build_rect_mesh(double x_lo, double x_hi, double y_lo, double y_hi, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: cell counts must be >= 1");
  if (!(x_lo < x_hi) || !(y_lo < y_hi))
    throw std::invalid_argument("build_rect_mesh: invalid rectangle bounds");

  Mesh mesh;
  mesh.x_lo = x_lo;
  mesh.x_hi = x_hi;
  mesh.y_lo = y_lo;
  mesh.y_hi = y_hi;

  const double dx = (x_hi - x_lo) / nx;
  const double dy = (y_hi - y_lo) / ny;
  mesh.vertices.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int iy = 0; iy <= ny; ++iy)
    for (int ix = 0; ix <= nx; ++ix)
      mesh.vertices.emplace_back(x_lo + ix * dx, y_lo + iy * dy);

  auto vid = [nx](int ix, int iy) { return iy * (nx + 1) + ix; };
  mesh.triangles.reserve(static_cast<size_t>(2) * nx * ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      int v00 = vid(ix, iy), v10 = vid(ix + 1, iy);
      int v01 = vid(ix, iy + 1), v11 = vid(ix + 1, iy + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }

  const int nt = mesh.n_triangles();
  mesh.area.resize(nt);
  mesh.diameter.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    const double a2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
    if (a2 <= 0.0) throw std::runtime_error("build_rect_mesh: non-positive triangle area");
    mesh.area[t] = 0.5 * a2;
    mesh.diameter[t] = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
  }

  std::map<std::pair<int, int>, int> edge_of;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Edge e;
        e.v = {a, b};
        e.left = t;
        mesh.edges.push_back(e);
        edge_of.emplace(key, static_cast<int>(mesh.edges.size()) - 1);
      } else {
        Edge& e = mesh.edges[it->second];
        if (e.right != -1) throw std::runtime_error("build_rect_mesh: edge with >2 triangles");
        e.right = t;
      }
    }
  }

  for (Edge& e : mesh.edges) {
    const Point& a = mesh.vertices[e.v[0]];
    const Point& b = mesh.vertices[e.v[1]];
    const Point d = b - a;
    e.length = d.norm();
    e.boundary = (e.right == -1);
    Point n(d.y(), -d.x());
    n /= e.length;
    // orient away from the left triangle
    const Point mid = 0.5 * (a + b);
    if (n.dot(mid - mesh.centroid(e.left)) < 0.0) n = -n;
    e.normal = n;
  }
  return mesh;
}

std::vector<EdgeWind> classify_edges(const Mesh& mesh, const VelocityField& velocity) {
  std::vector<EdgeWind> wind(mesh.edges.size());
  for (size_t i = 0; i < mesh.edges.size(); ++i) {
    const Edge& e = mesh.edges[i];
    const double bn = velocity(mesh.edge_midpoint(e)).dot(e.normal);
    wind[i].b_dot_n = bn;
    wind[i].inflow_left = bn < 0.0;
    wind[i].inflow_right = !e.boundary && bn > 0.0;
  }
  return wind;
}

}  // namespace sdg
