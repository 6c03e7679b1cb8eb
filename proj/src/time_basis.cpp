#include "cipstokes/time_basis.hpp"

#include <Eigen/LU>

#include <stdexcept>

namespace cipstokes {

TimeBasis::TimeBasis(int order) : order_(order) {
  if (order < 0) throw std::invalid_argument("TimeBasis: order must be >= 0");
  radau_ = gauss_radau_right(order + 1);

  const int n = size();
  const LineRule g = gauss_legendre(n + 1);
  derivative_ = Eigen::MatrixXd::Zero(n, n);
  mass_ = Eigen::MatrixXd::Zero(n, n);
  derivative_mass_ = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double tau = g.points[q];
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        derivative_(j, i) += g.weights[q] * derivative(i, tau) * value(j, tau);
        mass_(j, i) += g.weights[q] * value(i, tau) * value(j, tau);
        derivative_mass_(j, i) += g.weights[q] * derivative(i, tau) * derivative(j, tau);
      }
    }
  }
  left_ = values(0.0);
}

double TimeBasis::value(int i, double tau) const {
  const auto& x = radau_.points;
  double v = 1.0;
  for (int j = 0; j < size(); ++j) {
    if (j != i) {
      v *= (tau - x[static_cast<std::size_t>(j)]) /
           (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
    }
  }
  return v;
}

double TimeBasis::derivative(int i, double tau) const {
  const auto& x = radau_.points;
  const double xi = x[static_cast<std::size_t>(i)];
  double sum = 0.0;
  for (int k = 0; k < size(); ++k) {
    if (k == i) continue;
    double term = 1.0 / (xi - x[static_cast<std::size_t>(k)]);
    for (int j = 0; j < size(); ++j) {
      if (j != i && j != k) {
        term *= (tau - x[static_cast<std::size_t>(j)]) / (xi - x[static_cast<std::size_t>(j)]);
      }
    }
    sum += term;
  }
  return sum;
}

Eigen::VectorXd TimeBasis::values(double tau) const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v[i] = value(i, tau);
  return v;
}

TimeProjection::TimeProjection(const TimeBasis& basis, LineRule samples)
    : samples_(std::move(samples)) {
  const int n = basis.size();
  const auto ns = static_cast<Eigen::Index>(samples_.size());
  // Moments against shifted Legendre polynomials of degree < r.
  auto legendre = [](int k, double tau) {
    const double x = 2.0 * tau - 1.0;
    double p0 = 1.0;
    double p1 = x;
    if (k == 0) return p0;
    for (int m = 2; m <= k; ++m) {
      const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    return p1;
  };
  const LineRule exact = gauss_legendre(n + 1);
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, ns + 1);
  for (int j = 0; j + 1 < n; ++j) {
    for (std::size_t q = 0; q < exact.size(); ++q) {
      for (int i = 0; i < n; ++i) {
        system(j, i) += exact.weights[q] * basis.value(i, exact.points[q]) * legendre(j, exact.points[q]);
      }
    }
    for (Eigen::Index s = 0; s < ns; ++s) {
      const auto su = static_cast<std::size_t>(s);
      rhs(j, s) = samples_.weights[su] * legendre(j, samples_.points[su]);
    }
  }
  system(n - 1, n - 1) = 1.0; // value at the right end
  rhs(n - 1, ns) = 1.0;
  weights_ = system.fullPivLu().solve(rhs);
}

} // namespace cipstokes
