#pragma once

#include <Eigen/Core>

#include <vector>

namespace cipstokes {

/// Quadrature on the unit interval [0,1] (weights sum to 1).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// Quadrature on the reference triangle {(0,0),(1,0),(0,1)} (weights sum to 1/2).
struct TriangleRule {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on [0,1], exact to degree 2n-1.
[[nodiscard]] LineRule gauss_legendre(int n);

/// n-point right Gauss-Radau rule on [0,1]; the last point is 1. Exact to
/// degree 2n-2.
[[nodiscard]] LineRule gauss_radau_right(int n);

/// Collapsed (Duffy) tensor Gauss rule exact for polynomials of total
/// degree <= degree. All points lie strictly inside the triangle.
[[nodiscard]] TriangleRule triangle_rule(int degree);

/// Gauss rule on [0,1] with enough points to be exact to the given degree.
[[nodiscard]] LineRule line_rule(int degree);

} // namespace cipstokes
