#pragma once

#include <Eigen/Core>

#include <vector>

namespace cipstokes {

/// Nodal Lagrange basis of degree l on the reference triangle.
///
/// Local node order: the three vertices, then l-1 nodes on each local edge
/// j (from vertex j towards vertex (j+1)%3), then interior nodes.
class LagrangeBasis {
public:
  /// Throws std::invalid_argument unless 1 <= degree <= 3.
  explicit LagrangeBasis(int degree);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int size() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }

  /// Values of all basis functions at a reference point.
  [[nodiscard]] Eigen::VectorXd values(const Eigen::Vector2d& p) const;
  /// Row i holds the reference gradient of basis function i.
  [[nodiscard]] Eigen::MatrixX2d gradients(const Eigen::Vector2d& p) const;
  /// Reference Hessians, one per basis function.
  [[nodiscard]] std::vector<Eigen::Matrix2d> hessians(const Eigen::Vector2d& p) const;

private:
  int degree_;
  std::vector<Eigen::Vector2d> nodes_;
  std::vector<std::pair<int, int>> exponents_;
  Eigen::MatrixXd coefficients_; // column i: monomial coefficients of basis i
};

/// Shared immutable basis per supported degree.
[[nodiscard]] const LagrangeBasis& lagrange_basis(int degree);

} // namespace cipstokes
