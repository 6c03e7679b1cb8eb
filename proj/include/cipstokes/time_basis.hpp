#pragma once

#include <Eigen/Core>

#include "cipstokes/quadrature.hpp"

namespace cipstokes {

/// Lagrange basis of degree r on the reference interval (0,1] with nodes at
/// the right Gauss-Radau points, so the last basis function is the value at
/// the right end of the interval.
class TimeBasis {
public:
  /// Throws std::invalid_argument for r < 0.
  explicit TimeBasis(int order);

  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] int size() const { return order_ + 1; }
  [[nodiscard]] const LineRule& radau() const { return radau_; }

  [[nodiscard]] double value(int i, double tau) const;
  [[nodiscard]] double derivative(int i, double tau) const;
  [[nodiscard]] Eigen::VectorXd values(double tau) const;

  /// (j, i) entry: int_0^1 l_i'(tau) l_j(tau) dtau.
  [[nodiscard]] const Eigen::MatrixXd& derivative_matrix() const { return derivative_; }
  /// (j, i) entry: int_0^1 l_i l_j dtau.
  [[nodiscard]] const Eigen::MatrixXd& mass_matrix() const { return mass_; }
  /// (j, i) entry: int_0^1 l_i' l_j' dtau.
  [[nodiscard]] const Eigen::MatrixXd& derivative_mass_matrix() const { return derivative_mass_; }
  /// l_i(0), the weights of the left limit.
  [[nodiscard]] const Eigen::VectorXd& left_values() const { return left_; }

private:
  int order_;
  LineRule radau_;
  Eigen::MatrixXd derivative_;
  Eigen::MatrixXd mass_;
  Eigen::MatrixXd derivative_mass_;
  Eigen::VectorXd left_;
};

/// Time projection pi_k on one interval, as linear functionals of samples.
///
/// pi_k v is the degree-r polynomial with pi_k v(1) = v(1) and
/// int_0^1 (pi_k v - v) q = 0 for all q of degree <= r-1 (endpoint condition
/// only for r = 0). The moments are evaluated with the given sample rule.
class TimeProjection {
public:
  TimeProjection(const TimeBasis& basis, LineRule samples);

  [[nodiscard]] const LineRule& samples() const { return samples_; }
  /// Shape (r+1) x (n_samples+1). Radau-node coefficients of pi_k v are
  /// weights() * [v(s_1), ..., v(s_n), v(1)].
  [[nodiscard]] const Eigen::MatrixXd& weights() const { return weights_; }

private:
  LineRule samples_;
  Eigen::MatrixXd weights_;
};

} // namespace cipstokes
