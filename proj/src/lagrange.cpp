#include "cipstokes/lagrange.hpp"

#include <Eigen/LU>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cipstokes {
namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

} // namespace

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3) {
    throw std::invalid_argument("LagrangeBasis: unsupported degree " + std::to_string(degree));
  }
  const std::array<Eigen::Vector2d, 3> corners{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0),
                                               Eigen::Vector2d(0, 1)};
  for (const auto& c : corners) nodes_.push_back(c);
  for (int j = 0; j < 3; ++j) {
    const auto& a = corners[static_cast<std::size_t>(j)];
    const auto& b = corners[static_cast<std::size_t>((j + 1) % 3)];
    for (int k = 1; k < degree; ++k) nodes_.push_back(a + (b - a) * (double(k) / degree));
  }
  for (int j = 1; j < degree; ++j) {
    for (int i = 1; i + j < degree; ++i) {
      nodes_.emplace_back(double(i) / degree, double(j) / degree);
    }
  }
  for (int total = 0; total <= degree; ++total) {
    for (int q = 0; q <= total; ++q) exponents_.emplace_back(total - q, q);
  }

  const auto n = static_cast<Eigen::Index>(nodes_.size());
  Eigen::MatrixXd vandermonde(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index m = 0; m < n; ++m) {
      const auto [a, b] = exponents_[static_cast<std::size_t>(m)];
      vandermonde(i, m) = ipow(nodes_[static_cast<std::size_t>(i)].x(), a) *
                          ipow(nodes_[static_cast<std::size_t>(i)].y(), b);
    }
  }
  coefficients_ = vandermonde.fullPivLu().inverse();
}

Eigen::VectorXd LagrangeBasis::values(const Eigen::Vector2d& p) const {
  Eigen::VectorXd mono(coefficients_.rows());
  for (std::size_t m = 0; m < exponents_.size(); ++m) {
    const auto [a, b] = exponents_[m];
    mono[static_cast<Eigen::Index>(m)] = ipow(p.x(), a) * ipow(p.y(), b);
  }
  return coefficients_.transpose() * mono;
}

Eigen::MatrixX2d LagrangeBasis::gradients(const Eigen::Vector2d& p) const {
  Eigen::MatrixX2d mono(coefficients_.rows(), 2);
  for (std::size_t m = 0; m < exponents_.size(); ++m) {
    const auto [a, b] = exponents_[m];
    const auto r = static_cast<Eigen::Index>(m);
    mono(r, 0) = a > 0 ? a * ipow(p.x(), a - 1) * ipow(p.y(), b) : 0.0;
    mono(r, 1) = b > 0 ? b * ipow(p.x(), a) * ipow(p.y(), b - 1) : 0.0;
  }
  return coefficients_.transpose() * mono;
}

std::vector<Eigen::Matrix2d> LagrangeBasis::hessians(const Eigen::Vector2d& p) const {
  Eigen::MatrixXd mono(coefficients_.rows(), 3); // xx, xy, yy
  for (std::size_t m = 0; m < exponents_.size(); ++m) {
    const auto [a, b] = exponents_[m];
    const auto r = static_cast<Eigen::Index>(m);
    mono(r, 0) = a > 1 ? a * (a - 1) * ipow(p.x(), a - 2) * ipow(p.y(), b) : 0.0;
    mono(r, 1) = a > 0 && b > 0 ? a * b * ipow(p.x(), a - 1) * ipow(p.y(), b - 1) : 0.0;
    mono(r, 2) = b > 1 ? b * (b - 1) * ipow(p.x(), a) * ipow(p.y(), b - 2) : 0.0;
  }
  const Eigen::MatrixXd d2 = coefficients_.transpose() * mono;
  std::vector<Eigen::Matrix2d> out(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) {
    out[static_cast<std::size_t>(i)] << d2(i, 0), d2(i, 1), d2(i, 1), d2(i, 2);
  }
  return out;
}

const LagrangeBasis& lagrange_basis(int degree) {
  static const std::array<LagrangeBasis, 3> bases{LagrangeBasis(1), LagrangeBasis(2),
                                                  LagrangeBasis(3)};
  if (degree < 1 || degree > 3) {
    throw std::invalid_argument("lagrange_basis: unsupported degree " + std::to_string(degree));
  }
  return bases[static_cast<std::size_t>(degree - 1)];
}

} // namespace cipstokes
