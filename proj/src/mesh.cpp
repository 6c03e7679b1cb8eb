#include "cipstokes/mesh.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cipstokes {

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (auto v : triangles_[t]) {
      if (v >= vertices_.size()) {
        throw std::invalid_argument("Mesh: triangle " + std::to_string(t) +
                                    " references a missing vertex");
      }
    }
    if (signed_area(t) <= 0.0) {
      throw std::invalid_argument("Mesh: triangle " + std::to_string(t) +
                                  " is not counterclockwise");
    }
  }
  build_connectivity();
}

void Mesh::build_connectivity() {
  std::map<Edge, std::size_t> lookup;
  edges_.clear();
  edge_sides_.clear();
  triangle_edges_.assign(triangles_.size(), {});

  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int j = 0; j < 3; ++j) {
      const auto a = tri[static_cast<std::size_t>(j)];
      const auto b = tri[static_cast<std::size_t>((j + 1) % 3)];
      const Edge key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = lookup.try_emplace(key, edges_.size());
      if (inserted) {
        edges_.push_back(key);
        edge_sides_.emplace_back();
      }
      auto& sides = edge_sides_[it->second];
      if (sides.size() == 2) {
        throw std::invalid_argument("Mesh: edge shared by more than two triangles");
      }
      sides.push_back({t, j});
      triangle_edges_[t][static_cast<std::size_t>(j)] = it->second;
    }
  }

  boundary_edge_.assign(edges_.size(), false);
  boundary_vertex_.assign(vertices_.size(), false);
  normals_.resize(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& minus = edge_sides_[e].front();
    const auto& tri = triangles_[minus.triangle];
    const Point& a = vertices_[tri[static_cast<std::size_t>(minus.local_edge)]];
    const Point& b = vertices_[tri[static_cast<std::size_t>((minus.local_edge + 1) % 3)]];
    const Eigen::Vector2d d = b - a;
    // outward from the minus triangle (counterclockwise orientation)
    normals_[e] = Eigen::Vector2d(d.y(), -d.x()) / d.norm();
    if (edge_sides_[e].size() == 1) {
      boundary_edge_[e] = true;
      boundary_vertex_[edges_[e][0]] = true;
      boundary_vertex_[edges_[e][1]] = true;
    }
  }

  h_ = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) h_ = std::max(h_, diameter(t));
}

EdgeGeometry Mesh::edge_geometry(std::size_t e) const {
  if (e >= edges_.size()) {
    throw std::out_of_range("Mesh::edge_geometry: edge index " + std::to_string(e));
  }
  const Point& a = vertices_[edges_[e][0]];
  const Point& b = vertices_[edges_[e][1]];
  return {(b - a).norm(), normals_[e], a, b};
}

double Mesh::signed_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Eigen::Vector2d u = vertices_[tri[1]] - vertices_[tri[0]];
  const Eigen::Vector2d w = vertices_[tri[2]] - vertices_[tri[0]];
  return 0.5 * (u.x() * w.y() - u.y() * w.x());
}

double Mesh::diameter(std::size_t t) const {
  const auto& tri = triangles_[t];
  return std::max({(vertices_[tri[0]] - vertices_[tri[1]]).norm(),
                   (vertices_[tri[1]] - vertices_[tri[2]]).norm(),
                   (vertices_[tri[2]] - vertices_[tri[0]]).norm()});
}

Mesh Mesh::with_flipped_interior_normals() const {
  Mesh flipped = *this;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edge_sides_[e].size() == 2) {
      std::swap(flipped.edge_sides_[e][0], flipped.edge_sides_[e][1]);
      flipped.normals_[e] = -normals_[e];
    }
  }
  return flipped;
}

std::size_t Mesh::locate(const Point& x) const {
  constexpr double tol = 1e-12;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    const Point& p0 = vertices_[tri[0]];
    Eigen::Matrix2d jac;
    jac.col(0) = vertices_[tri[1]] - p0;
    jac.col(1) = vertices_[tri[2]] - p0;
    const Eigen::Vector2d ref = jac.partialPivLu().solve(x - p0);
    if (ref.x() >= -tol && ref.y() >= -tol && ref.x() + ref.y() <= 1.0 + tol) return t;
  }
  return triangles_.size();
}

void Mesh::write(std::ostream& os) const {
  os << vertices_.size() << " vertices\n";
  for (const auto& v : vertices_) os << v.x() << ' ' << v.y() << '\n';
  os << triangles_.size() << " triangles\n";
  for (const auto& t : triangles_) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Mesh build_structured_mesh(std::size_t n, const Rectangle& domain) {
  if (n == 0) throw std::invalid_argument("build_structured_mesh: n must be >= 1");
  if (!(domain.x_max > domain.x_min) || !(domain.y_max > domain.y_min)) {
    throw std::invalid_argument("build_structured_mesh: degenerate domain");
  }
  const std::size_t np = n + 1;
  std::vector<Point> vertices;
  vertices.reserve(np * np);
  const double dx = (domain.x_max - domain.x_min) / static_cast<double>(n);
  const double dy = (domain.y_max - domain.y_min) / static_cast<double>(n);
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t i = 0; i < np; ++i) {
      // pin the far sides exactly to the domain boundary
      const double x = i == n ? domain.x_max : domain.x_min + static_cast<double>(i) * dx;
      const double y = j == n ? domain.y_max : domain.y_min + static_cast<double>(j) * dy;
      vertices.emplace_back(x, y);
    }
  }
  std::vector<Mesh::Triangle> triangles;
  triangles.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v00 = j * np + i;
      const std::size_t v10 = v00 + 1;
      const std::size_t v01 = v00 + np;
      const std::size_t v11 = v01 + 1;
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }
  return Mesh(std::move(vertices), std::move(triangles));
}

Mesh uniform_refine(const Mesh& mesh) {
  std::vector<Point> vertices = mesh.vertices();
  const std::size_t nv = vertices.size();
  for (const auto& e : mesh.edges()) {
    vertices.push_back(0.5 * (mesh.vertex(e[0]) + mesh.vertex(e[1])));
  }
  std::vector<Mesh::Triangle> triangles;
  triangles.reserve(4 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    // m[j] is the midpoint of local edge j (between local vertices j and j+1)
    const std::size_t m0 = nv + mesh.triangle_edge(t, 0);
    const std::size_t m1 = nv + mesh.triangle_edge(t, 1);
    const std::size_t m2 = nv + mesh.triangle_edge(t, 2);
    triangles.push_back({tri[0], m0, m2});
    triangles.push_back({m0, tri[1], m1});
    triangles.push_back({m2, m1, tri[2]});
    triangles.push_back({m0, m1, m2});
  }
  return Mesh(std::move(vertices), std::move(triangles));
}

} // namespace cipstokes
