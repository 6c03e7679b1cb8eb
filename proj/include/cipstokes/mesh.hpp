#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace cipstokes {

using Point = Eigen::Vector2d;

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Rectangle {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  [[nodiscard]] double area() const { return (x_max - x_min) * (y_max - y_min); }
};

/// One side of an edge: the adjacent triangle and which of its local edges
/// it is. Local edge j joins local vertices j and (j+1)%3.
struct EdgeSide {
  std::size_t triangle = 0;
  int local_edge = 0;
};

struct EdgeGeometry {
  double length = 0.0;
  Eigen::Vector2d normal;
  Point a;
  Point b;
};

/// Conforming triangulation with the edge connectivity needed by
/// interior-penalty assembly.
///
/// Every edge stores one unit normal. For interior edges it points from the
/// "minus" side (sides[0], the lower triangle index) into the "plus" side
/// (sides[1]); for boundary edges it points out of the domain.
class Mesh {
public:
  using Triangle = std::array<std::size_t, 3>;
  using Edge = std::array<std::size_t, 2>;

  /// Builds connectivity from vertices and counterclockwise triangles.
  Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles);

  [[nodiscard]] std::size_t num_vertices() const { return vertices_.size(); }
  [[nodiscard]] std::size_t num_triangles() const { return triangles_.size(); }
  [[nodiscard]] std::size_t num_edges() const { return edges_.size(); }

  [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<Triangle>& triangles() const { return triangles_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }

  [[nodiscard]] const Point& vertex(std::size_t i) const { return vertices_[i]; }
  [[nodiscard]] const Triangle& triangle(std::size_t t) const { return triangles_[t]; }
  [[nodiscard]] const Edge& edge(std::size_t e) const { return edges_[e]; }

  /// One side for boundary edges, two for interior edges (minus side first).
  [[nodiscard]] const std::vector<EdgeSide>& edge_sides(std::size_t e) const {
    return edge_sides_[e];
  }
  [[nodiscard]] bool is_boundary_edge(std::size_t e) const { return boundary_edge_[e]; }
  [[nodiscard]] bool is_boundary_vertex(std::size_t v) const { return boundary_vertex_[v]; }

  /// Global edge index of local edge j of triangle t.
  [[nodiscard]] std::size_t triangle_edge(std::size_t t, int j) const {
    return triangle_edges_[t][static_cast<std::size_t>(j)];
  }

  /// Throws std::out_of_range for an invalid index.
  [[nodiscard]] EdgeGeometry edge_geometry(std::size_t e) const;
  [[nodiscard]] const Eigen::Vector2d& edge_normal(std::size_t e) const { return normals_[e]; }

  [[nodiscard]] double signed_area(std::size_t t) const;
  [[nodiscard]] double diameter(std::size_t t) const;
  /// Maximum triangle diameter.
  [[nodiscard]] double mesh_size() const { return h_; }

  /// Same mesh with every interior edge's minus/plus sides swapped and its
  /// normal negated. Quantities built from jumps and averages must not
  /// change under this.
  [[nodiscard]] Mesh with_flipped_interior_normals() const;

  /// Index of a triangle containing x (closed, with a small tolerance), or
  /// num_triangles() if none does.
  [[nodiscard]] std::size_t locate(const Point& x) const;

  /// Plain-text dump for debugging: vertex list followed by triangle list.
  void write(std::ostream& os) const;

private:
  Mesh() = default;
  void build_connectivity();

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeSide>> edge_sides_;
  std::vector<std::array<std::size_t, 3>> triangle_edges_;
  std::vector<Eigen::Vector2d> normals_;
  std::vector<bool> boundary_edge_;
  std::vector<bool> boundary_vertex_;
  double h_ = 0.0;
};

/// n x n grid of cells on the rectangle, each split along its
/// lower-left to upper-right diagonal. Throws std::invalid_argument for n = 0
/// or a degenerate rectangle.
[[nodiscard]] Mesh build_structured_mesh(std::size_t n, const Rectangle& domain = {});

/// Red refinement: each triangle is split into four through its edge
/// midpoints. Old vertices keep their indices; midpoints follow in edge order.
[[nodiscard]] Mesh uniform_refine(const Mesh& mesh);

} // namespace cipstokes
