#include "cipstokes/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cipstokes {

ScalarField zero_scalar_field() {
  ScalarField f;
  f.value = [](double, const Point&) { return 0.0; };
  f.gradient = [](double, const Point&) { return Eigen::Vector2d::Zero().eval(); };
  f.hessian = [](double, const Point&) { return Eigen::Matrix2d::Zero().eval(); };
  f.time_derivative = [](double, const Point&) { return 0.0; };
  f.time_derivative_gradient = [](double, const Point&) { return Eigen::Vector2d::Zero().eval(); };
  f.clamped = true;
  return f;
}

VectorField zero_vector_field() {
  return {[](double, const Point&) { return Eigen::Vector2d::Zero().eval(); },
          [](double, const Point&) { return Eigen::Matrix2d::Zero().eval(); }};
}

VectorField vector_curl(const ScalarField& psi) {
  if (!psi.gradient || !psi.hessian) {
    throw std::logic_error("vector_curl: field needs gradient and hessian");
  }
  return {[grad = psi.gradient](double t, const Point& x) {
            const Eigen::Vector2d d = grad(t, x);
            return Eigen::Vector2d(d.y(), -d.x());
          },
          [hess = psi.hessian](double t, const Point& x) {
            const Eigen::Matrix2d h = hess(t, x);
            Eigen::Matrix2d j;
            j << h(1, 0), h(1, 1), -h(0, 0), -h(0, 1);
            return j;
          }};
}

ScalarField scalar_curl(const VectorField& v) {
  ScalarField f;
  f.value = [jac = v.jacobian](double t, const Point& x) {
    const Eigen::Matrix2d j = jac(t, x);
    return j(0, 1) - j(1, 0);
  };
  return f;
}

ScalarField negative_curl(const VectorField& g) {
  ScalarField f;
  f.value = [jac = g.jacobian](double t, const Point& x) {
    const Eigen::Matrix2d j = jac(t, x);
    return -(j(0, 1) - j(1, 0));
  };
  return f;
}

namespace manufactured {
namespace {

using std::numbers::pi;

// k-th derivative of s -> sin(2 pi s)^2
double factor(int k, double s) {
  const double a = 4.0 * pi * s;
  switch (k) {
  case 0: {
    const double sn = std::sin(2.0 * pi * s);
    return sn * sn;
  }
  case 1: return 2.0 * pi * std::sin(a);
  case 2: return 8.0 * pi * pi * std::cos(a);
  case 3: return -32.0 * pi * pi * pi * std::sin(a);
  case 4: return -128.0 * pi * pi * pi * pi * std::cos(a);
  default: throw std::logic_error("manufactured: derivative order above 4");
  }
}

// d^(i+j) Phi / dx1^i dx2^j
double d(int i, int j, const Point& x) { return factor(i, x.x()) * factor(j, x.y()); }

double lap(const Point& x) { return d(2, 0, x) + d(0, 2, x); }
double bilap(const Point& x) { return d(4, 0, x) + 2.0 * d(2, 2, x) + d(0, 4, x); }

Eigen::Vector2d grad_phi(const Point& x) { return {d(1, 0, x), d(0, 1, x)}; }

Eigen::Matrix2d hess_phi(const Point& x) {
  Eigen::Matrix2d h;
  h << d(2, 0, x), d(1, 1, x), d(1, 1, x), d(0, 2, x);
  return h;
}

double sin_t(double t) { return std::sin(2.0 * pi * t); }
double dsin_t(double t) { return 2.0 * pi * std::cos(2.0 * pi * t); }

} // namespace

ScalarField phi() {
  ScalarField f;
  f.value = [](double, const Point& x) { return d(0, 0, x); };
  f.gradient = [](double, const Point& x) { return grad_phi(x); };
  f.hessian = [](double, const Point& x) { return hess_phi(x); };
  f.time_derivative = [](double, const Point&) { return 0.0; };
  f.time_derivative_gradient = [](double, const Point&) { return Eigen::Vector2d::Zero().eval(); };
  f.clamped = true;
  return f;
}

ScalarField laplacian_phi() {
  ScalarField f;
  f.value = [](double, const Point& x) { return lap(x); };
  f.gradient = [](double, const Point& x) {
    return Eigen::Vector2d(d(3, 0, x) + d(1, 2, x), d(2, 1, x) + d(0, 3, x));
  };
  return f;
}

ScalarField bilaplacian_phi() {
  ScalarField f;
  f.value = [](double, const Point& x) { return bilap(x); };
  return f;
}

ScalarField psi() {
  ScalarField f;
  f.value = [](double t, const Point& x) { return sin_t(t) * d(0, 0, x); };
  f.gradient = [](double t, const Point& x) { return (sin_t(t) * grad_phi(x)).eval(); };
  f.hessian = [](double t, const Point& x) { return (sin_t(t) * hess_phi(x)).eval(); };
  f.time_derivative = [](double t, const Point& x) { return dsin_t(t) * d(0, 0, x); };
  f.time_derivative_gradient = [](double t, const Point& x) {
    return (dsin_t(t) * grad_phi(x)).eval();
  };
  f.clamped = true;
  f.separable = SeparableForm{sin_t, std::make_shared<const ScalarField>(phi())};
  return f;
}

VectorField velocity() { return vector_curl(psi()); }

VectorField body_force() {
  VectorField g;
  g.value = [](double t, const Point& x) {
    const double c = dsin_t(t);
    const double s = sin_t(t);
    return Eigen::Vector2d(c * d(0, 1, x) - s * (d(2, 1, x) + d(0, 3, x)),
                           -c * d(1, 0, x) + s * (d(3, 0, x) + d(1, 2, x)));
  };
  g.jacobian = [](double t, const Point& x) {
    const double c = dsin_t(t);
    const double s = sin_t(t);
    Eigen::Matrix2d j;
    j(0, 0) = c * d(1, 1, x) - s * (d(3, 1, x) + d(1, 3, x));
    j(0, 1) = c * d(0, 2, x) - s * (d(2, 2, x) + d(0, 4, x));
    j(1, 0) = -c * d(2, 0, x) + s * (d(4, 0, x) + d(2, 2, x));
    j(1, 1) = -c * d(1, 1, x) + s * (d(3, 1, x) + d(1, 3, x));
    return j;
  };
  return g;
}

VectorField gradient_perturbation() {
  auto check = [](const Point& x) {
    if (!(x.x() > 0.0)) throw std::domain_error("gradient_perturbation: requires x1 > 0");
  };
  VectorField p;
  p.value = [check](double, const Point& x) {
    check(x);
    return Eigen::Vector2d(kPerturbationScale * std::pow(x.x(), kPerturbationExponent), 0.0);
  };
  p.jacobian = [check](double, const Point& x) {
    check(x);
    Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
    j(0, 0) = kPerturbationScale * kPerturbationExponent *
              std::pow(x.x(), kPerturbationExponent - 1.0);
    return j;
  };
  return p;
}

VectorField perturbed_body_force() {
  const VectorField g = body_force();
  const VectorField p = gradient_perturbation();
  return {[g, p](double t, const Point& x) { return (g.value(t, x) + p.value(t, x)).eval(); },
          [g, p](double t, const Point& x) {
            return (g.jacobian(t, x) + p.jacobian(t, x)).eval();
          }};
}

ScalarField stream_rhs() {
  ScalarField f;
  f.value = [](double t, const Point& x) { return -dsin_t(t) * lap(x) + sin_t(t) * bilap(x); };
  return f;
}

} // namespace manufactured
} // namespace cipstokes
