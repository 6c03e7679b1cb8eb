// Shared helpers for the unit tests: independent quadrature oracles and
// random discrete data.
#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <random>

#include "cipstokes/fe_space.hpp"
#include "cipstokes/mesh.hpp"

namespace testsupport {

using cipstokes::Point;

// Adaptive Gauss-Kronrod on [a, b].
template <class F>
double integrate(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-13);
}

// Nested adaptive integral over the triangle (p0, p1, p2).
template <class F>
double integrate_triangle(F f, const Point& p0, const Point& p1, const Point& p2) {
  const Point e1 = p1 - p0;
  const Point e2 = p2 - p0;
  const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  return jac * integrate(
                   [&](double s) {
                     return integrate([&](double t) { return f(Point(p0 + s * e1 + t * e2)); }, 0.0,
                                      1.0 - s);
                   },
                   0.0, 1.0);
}

// Integral along the segment a -> b (with the length factor).
template <class F>
double integrate_segment(F f, const Point& a, const Point& b) {
  return (b - a).norm() * integrate([&](double s) { return f(Point(a + s * (b - a))); }, 0.0, 1.0);
}

// Random values on the interior DOFs, zero on the boundary.
inline cipstokes::Vector random_interior(const cipstokes::FeSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  cipstokes::Vector v(space.interior().size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return space.interior().extend(v);
}

// Quadratic Lagrange function on one triangle written in barycentric form,
// independent of the library's reference-element machinery.
struct P2Local {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

// Evaluates the global P2 basis function whose node is `node` restricted to
// the triangle (v[0], v[1], v[2]); zero if the node is not one of its six.
inline P2Local p2_shape(const std::array<Point, 3>& v, const Point& node, const Point& x) {
  const double area2 = (v[1] - v[0]).x() * (v[2] - v[0]).y() - (v[1] - v[0]).y() * (v[2] - v[0]).x();
  std::array<Eigen::Vector2d, 3> g;
  std::array<double, 3> lam{};
  for (int k = 0; k < 3; ++k) {
    const Point& a = v[static_cast<std::size_t>((k + 1) % 3)];
    const Point& b = v[static_cast<std::size_t>((k + 2) % 3)];
    g[static_cast<std::size_t>(k)] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / area2;
    lam[static_cast<std::size_t>(k)] =
        ((a.x() - x.x()) * (b.y() - x.y()) - (a.y() - x.y()) * (b.x() - x.x())) / area2;
  }
  P2Local out;
  for (std::size_t k = 0; k < 3; ++k) {
    if ((v[k] - node).norm() < 1e-12) {
      out.value = lam[k] * (2.0 * lam[k] - 1.0);
      out.gradient = (4.0 * lam[k] - 1.0) * g[k];
      out.hessian = 4.0 * g[k] * g[k].transpose();
      return out;
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t a = k;
    const std::size_t b = (k + 1) % 3;
    if ((0.5 * (v[a] + v[b]) - node).norm() < 1e-12) {
      out.value = 4.0 * lam[a] * lam[b];
      out.gradient = 4.0 * (lam[b] * g[a] + lam[a] * g[b]);
      out.hessian = 4.0 * (g[a] * g[b].transpose() + g[b] * g[a].transpose());
      return out;
    }
  }
  return out;
}

inline std::array<Point, 3> triangle_points(const cipstokes::Mesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangle(t);
  return {mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2])};
}

} // namespace testsupport
