#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cipstokes/manufactured.hpp"

using namespace cipstokes;
namespace mf = cipstokes::manufactured;

namespace {

constexpr double kStep = 1e-5;
constexpr double pi = std::numbers::pi;

std::vector<std::pair<double, Point>> random_points(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<std::pair<double, Point>> out;
  for (int i = 0; i < count; ++i) out.emplace_back(u(rng), Point(u(rng), u(rng)));
  return out;
}

Eigen::Vector2d fd_gradient(const std::function<double(double, const Point&)>& f, double t, const Point& x) {
  const Eigen::Vector2d ex(kStep, 0.0), ey(0.0, kStep);
  return {(f(t, x + ex) - f(t, x - ex)) / (2 * kStep), (f(t, x + ey) - f(t, x - ey)) / (2 * kStep)};
}

// Checks every derivative routine the field carries against central
// differences, relative to the size of the derivative.
void check_field(const ScalarField& f, int count = 100) {
  for (const auto& [t, x] : random_points(count, 11)) {
    if (f.gradient) {
      const Eigen::Vector2d fd = fd_gradient(f.value, t, x);
      EXPECT_LE((f.gradient(t, x) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
    }
    if (f.hessian) {
      const Eigen::Vector2d ex(kStep, 0.0), ey(0.0, kStep);
      Eigen::Matrix2d fd;
      fd.col(0) = (f.gradient(t, x + ex) - f.gradient(t, x - ex)) / (2 * kStep);
      fd.col(1) = (f.gradient(t, x + ey) - f.gradient(t, x - ey)) / (2 * kStep);
      EXPECT_LE((f.hessian(t, x) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
    }
    if (f.time_derivative) {
      const double fd = (f.value(t + kStep, x) - f.value(t - kStep, x)) / (2 * kStep);
      EXPECT_LE(std::abs(f.time_derivative(t, x) - fd), 1e-6 * std::max(1.0, std::abs(fd)));
    }
    if (f.time_derivative_gradient) {
      const Eigen::Vector2d fd = (f.gradient(t + kStep, x) - f.gradient(t - kStep, x)) / (2 * kStep);
      EXPECT_LE((f.time_derivative_gradient(t, x) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
    }
  }
}

void check_field(const VectorField& f) {
  for (const auto& [t, x] : random_points(100, 13)) {
    const Eigen::Vector2d ex(kStep, 0.0), ey(0.0, kStep);
    Eigen::Matrix2d fd;
    fd.col(0) = (f.value(t, x + ex) - f.value(t, x - ex)) / (2 * kStep);
    fd.col(1) = (f.value(t, x + ey) - f.value(t, x - ey)) / (2 * kStep);
    EXPECT_LE((f.jacobian(t, x) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
  }
}

double laplacian_fd(const std::function<double(const Point&)>& f, const Point& x) {
  const double h = 1e-4;
  const Eigen::Vector2d ex(h, 0.0), ey(0.0, h);
  return (f(x + ex) + f(x - ex) + f(x + ey) + f(x - ey) - 4.0 * f(x)) / (h * h);
}

} // namespace

TEST(Manufactured, PhiValues) {
  const ScalarField phi = mf::phi();
  EXPECT_NEAR(phi.value(0.0, Point(0.25, 0.25)), 1.0, 1e-15);
  for (double y : {0.0, 0.1, 0.37, 0.9}) EXPECT_NEAR(phi.value(0.0, Point(0.5, y)), 0.0, 1e-15);
  EXPECT_NEAR(phi.gradient(0.0, Point(0.0, 0.3)).norm(), 0.0, 1e-15);
  EXPECT_TRUE(phi.clamped);
}

TEST(Manufactured, PsiAndVelocityValues) {
  const ScalarField psi = mf::psi();
  const VectorField u = mf::velocity();
  EXPECT_NEAR(psi.value(0.25, Point(0.25, 0.25)), 1.0, 1e-15);
  EXPECT_NEAR(u.value(0.25, Point(0.25, 0.25)).norm(), 0.0, 1e-14);
  EXPECT_EQ(psi.value(0.0, Point(0.3, 0.6)), 0.0);
  EXPECT_EQ(u.value(0.0, Point(0.3, 0.6)).norm(), 0.0);
  ASSERT_TRUE(psi.separable.has_value());
  EXPECT_NEAR(psi.separable->temporal(0.1) * psi.separable->spatial->value(0.0, Point(0.3, 0.4)),
              psi.value(0.1, Point(0.3, 0.4)), 1e-15);
}

TEST(Manufactured, DerivativesMatchFiniteDifferences) {
  check_field(mf::phi());
  check_field(mf::psi());
  check_field(mf::laplacian_phi());
  check_field(mf::velocity());
  check_field(mf::body_force());
  check_field(mf::perturbed_body_force());
}

TEST(Manufactured, LaplacianAndBilaplacianOfPhi) {
  const ScalarField phi = mf::phi();
  const ScalarField lap = mf::laplacian_phi();
  const ScalarField bilap = mf::bilaplacian_phi();
  for (const auto& [t, x] : random_points(20, 3)) {
    const double fd = laplacian_fd([&](const Point& p) { return phi.value(0.0, p); }, x);
    EXPECT_NEAR(lap.value(0.0, x), fd, 1e-5 * std::max(1.0, std::abs(fd)) + 1e-3);
    EXPECT_NEAR(lap.value(0.0, x), phi.hessian(0.0, x).trace(), 1e-10);
    const double fd2 = laplacian_fd([&](const Point& p) { return lap.value(0.0, p); }, x);
    EXPECT_NEAR(bilap.value(0.0, x), fd2, 1e-4 * std::max(1.0, std::abs(fd2)) + 1e-1);
  }
}

TEST(Manufactured, VelocityIsDivergenceFreeAndCurlIsLaplacian) {
  const VectorField u = mf::velocity();
  const ScalarField psi = mf::psi();
  for (const auto& [t, x] : random_points(100, 5)) {
    const Eigen::Vector2d ex(kStep, 0.0), ey(0.0, kStep);
    const double div = (u.value(t, x + ex).x() - u.value(t, x - ex).x() + u.value(t, x + ey).y() -
                        u.value(t, x - ey).y()) /
                       (2 * kStep);
    EXPECT_NEAR(div, 0.0, 1e-10 * 1e3);
    EXPECT_NEAR(u.jacobian(t, x).trace(), 0.0, 1e-10);
    // curl(u) = d2 u1 - d1 u2 = Laplace(psi)
    const Eigen::Matrix2d j = u.jacobian(t, x);
    EXPECT_NEAR(j(0, 1) - j(1, 0), psi.hessian(t, x).trace(), 1e-8 * std::max(1.0, std::abs(j(0, 1))));
  }
}

TEST(Manufactured, BodyForceIsStokesResidual) {
  // g = d_t u - Laplace u checked against finite differences of u
  const VectorField u = mf::velocity();
  const VectorField g = mf::body_force();
  for (const auto& [t, x] : random_points(20, 9)) {
    for (int c = 0; c < 2; ++c) {
      const double dt = (u.value(t + kStep, x)[c] - u.value(t - kStep, x)[c]) / (2 * kStep);
      const double lap = laplacian_fd([&](const Point& p) { return u.value(t, p)[c]; }, x);
      const double expected = dt - lap;
      EXPECT_NEAR(g.value(t, x)[c], expected, 1e-5 * std::max(1.0, std::abs(expected)) + 1e-2);
    }
  }
}

TEST(Manufactured, StreamRhsIsNegativeCurlOfBodyForce) {
  const VectorField g = mf::body_force();
  const ScalarField f = mf::stream_rhs();
  const ScalarField via_curl = negative_curl(g);
  const ScalarField lap = mf::laplacian_phi();
  const ScalarField bilap = mf::bilaplacian_phi();
  for (const auto& [t, x] : random_points(100, 21)) {
    const Eigen::Vector2d ex(kStep, 0.0), ey(0.0, kStep);
    const double curl_fd = (g.value(t, x + ey).x() - g.value(t, x - ey).x()) / (2 * kStep) -
                           (g.value(t, x + ex).y() - g.value(t, x - ex).y()) / (2 * kStep);
    const double fv = f.value(t, x);
    EXPECT_NEAR(curl_fd + fv, 0.0, 1e-8 * std::max(1.0, std::abs(fv)) * 1e2);
    EXPECT_NEAR(via_curl.value(t, x), fv, 1e-9 * std::max(1.0, std::abs(fv)));
    const double expected = -2 * pi * std::cos(2 * pi * t) * lap.value(0.0, x) +
                            std::sin(2 * pi * t) * bilap.value(0.0, x);
    EXPECT_NEAR(fv, expected, 1e-9 * std::max(1.0, std::abs(fv)));
  }
  // at t = 0 only the time-derivative term survives
  const Point x(0.3, 0.7);
  EXPECT_NEAR(f.value(0.0, x), -2 * pi * lap.value(0.0, x), 1e-9 * std::abs(f.value(0.0, x)));
}

TEST(Manufactured, PerturbedBodyForce) {
  const Point x(0.01, 0.5);
  const Eigen::Vector2d d = mf::perturbed_body_force().value(0.3, x) - mf::body_force().value(0.3, x);
  EXPECT_NEAR(d.x(), 1e5 * std::pow(0.01, -0.49), 1e-9 * 1e5 * std::pow(0.01, -0.49));
  EXPECT_NEAR(d.y(), 0.0, 1e-9);
  EXPECT_THROW((void)mf::perturbed_body_force().value(0.3, Point(0.0, 0.5)), std::domain_error);
  EXPECT_THROW((void)mf::gradient_perturbation().value(0.3, Point(-0.1, 0.5)), std::domain_error);
}

TEST(Manufactured, GradientPerturbationHasNoCurl) {
  const ScalarField f = negative_curl(mf::body_force());
  const ScalarField ft = negative_curl(mf::perturbed_body_force());
  for (const auto& [t, x] : random_points(100, 31)) EXPECT_EQ(f.value(t, x), ft.value(t, x));
  const ScalarField c = scalar_curl(mf::gradient_perturbation());
  EXPECT_EQ(c.value(0.5, Point(0.2, 0.3)), 0.0);
}

TEST(Manufactured, CurlConventions) {
  // Curl(psi) = (d2 psi, -d1 psi) and curl(Curl psi) = Laplace psi
  const ScalarField psi = mf::psi();
  const VectorField u = vector_curl(psi);
  const Point x(0.31, 0.62);
  const Eigen::Vector2d g = psi.gradient(0.4, x);
  EXPECT_NEAR(u.value(0.4, x).x(), g.y(), 1e-14);
  EXPECT_NEAR(u.value(0.4, x).y(), -g.x(), 1e-14);
  EXPECT_NEAR(scalar_curl(u).value(0.4, x), psi.hessian(0.4, x).trace(), 1e-10);
  EXPECT_EQ(zero_scalar_field().value(0.1, x), 0.0);
  EXPECT_EQ(zero_vector_field().jacobian(0.1, x).norm(), 0.0);
}
