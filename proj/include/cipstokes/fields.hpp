#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>

#include "cipstokes/mesh.hpp"

namespace cipstokes {

struct ScalarField;

/// psi(t, x) = temporal(t) * spatial(x); lets linear projections of the
/// field be computed once in space and rescaled in time.
struct SeparableForm {
  std::function<double(double)> temporal;
  std::shared_ptr<const ScalarField> spatial;
};

/// Closed-form scalar field of (t, x). Derivative routines are optional;
/// an operation that needs a missing one throws std::logic_error.
struct ScalarField {
  std::function<double(double, const Point&)> value;
  std::function<Eigen::Vector2d(double, const Point&)> gradient;
  std::function<Eigen::Matrix2d(double, const Point&)> hessian;
  std::function<double(double, const Point&)> time_derivative;
  std::function<Eigen::Vector2d(double, const Point&)> time_derivative_gradient;

  /// Set when the field and its normal derivative vanish on the boundary of
  /// the domain it is used on.
  bool clamped = false;
  std::optional<SeparableForm> separable;
};

/// Closed-form vector field; jacobian(i, j) = d v_i / d x_j.
struct VectorField {
  std::function<Eigen::Vector2d(double, const Point&)> value;
  std::function<Eigen::Matrix2d(double, const Point&)> jacobian;
};

/// Identically zero field with all derivatives.
[[nodiscard]] ScalarField zero_scalar_field();
[[nodiscard]] VectorField zero_vector_field();

/// Vector curl Curl(psi) = (d2 psi, -d1 psi); needs gradient and hessian.
[[nodiscard]] VectorField vector_curl(const ScalarField& psi);

/// Scalar curl with the sign convention curl(v) = d2 v1 - d1 v2, so that
/// curl(Curl(psi)) = Laplace(psi). Returns the value only.
[[nodiscard]] ScalarField scalar_curl(const VectorField& v);

/// -curl(g): the stream-function right-hand side of a Stokes body force g.
[[nodiscard]] ScalarField negative_curl(const VectorField& g);

} // namespace cipstokes
