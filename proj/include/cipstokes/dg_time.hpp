#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "cipstokes/cip.hpp"
#include "cipstokes/fe_space.hpp"
#include "cipstokes/time_basis.hpp"

namespace cipstokes {

/// 0 = t_0 < t_1 < ... < t_M = T; interval m (0-based) is (t_m, t_{m+1}].
class TimePartition {
public:
  /// Throws std::invalid_argument unless the nodes start at 0 and increase.
  explicit TimePartition(std::vector<double> nodes);

  [[nodiscard]] std::size_t size() const { return nodes_.size() - 1; }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] double start(std::size_t m) const { return nodes_[m]; }
  [[nodiscard]] double end(std::size_t m) const { return nodes_[m + 1]; }
  [[nodiscard]] double step(std::size_t m) const { return nodes_[m + 1] - nodes_[m]; }
  [[nodiscard]] double max_step() const;
  [[nodiscard]] double end_time() const { return nodes_.back(); }
  /// Physical time of reference point tau in [0,1] on interval m.
  [[nodiscard]] double time(std::size_t m, double tau) const { return nodes_[m] + tau * step(m); }

private:
  std::vector<double> nodes_;
};

/// Uniform partition of (0, T] into M intervals.
[[nodiscard]] TimePartition make_partition(std::size_t intervals, double end_time);

/// Gauss points per interval for load integration and for errors.
[[nodiscard]] inline int load_time_points(int order) { return order + 2; }
[[nodiscard]] inline int error_time_points(int order) { return order + 3; }

/// The spatial ingredients shared by every time-dependent computation.
struct SpatialOperators {
  std::shared_ptr<const FeSpace> space;
  std::shared_ptr<const H1Projector> h1;
  std::shared_ptr<const CipForm> cip;

  [[nodiscard]] const SparseMatrix& stiffness() const { return h1->stiffness(); }
  [[nodiscard]] const SparseMatrix& biharmonic() const { return cip->matrix(); }
};

/// Throws CoercivityError if the penalty is too small.
[[nodiscard]] SpatialOperators make_operators(std::shared_ptr<const Mesh> mesh, int degree,
                                              double penalty);

/// Piecewise polynomial in time with values in V_h. coefficients[m][i] is
/// the value at the i-th right Radau node of interval m, so
/// coefficients[m].back() is the left-sided limit at t_{m+1}.
struct DgSolution {
  std::shared_ptr<const FeSpace> space;
  TimePartition partition;
  int order = 0;
  std::vector<std::vector<Vector>> coefficients;
  /// Stand-in for the left limit at t = 0 (the projected initial value).
  Vector initial;

  [[nodiscard]] Vector value(std::size_t m, double tau) const;
  /// Physical time derivative on interval m.
  [[nodiscard]] Vector time_derivative(std::size_t m, double tau) const;
  /// psi^+ at t_m, from interval m.
  [[nodiscard]] Vector left_limit(std::size_t m) const { return value(m, 0.0); }
  /// psi^- at t_{m+1}.
  [[nodiscard]] const Vector& right_limit(std::size_t m) const { return coefficients[m].back(); }
  /// [psi]_m = psi^+_m - psi^-_m, with psi^-_0 = initial.
  [[nodiscard]] Vector jump(std::size_t m) const;
};

/// Zero-valued solution shaped like the given space and partition.
[[nodiscard]] DgSolution zero_solution(std::shared_ptr<const FeSpace> space,
                                       const TimePartition& partition, int order);

/// Spatial load vector <f(t), phi_i> as a function of time.
using LoadProvider = std::function<Vector(double)>;

[[nodiscard]] LoadProvider scalar_load(std::shared_ptr<const FeSpace> space, ScalarField f,
                                       int degree = kDataQuadratureDegree);
[[nodiscard]] LoadProvider zero_load(std::shared_ptr<const FeSpace> space);

/// Interval-by-interval dG(r) sweep on eliminated operators: on each
/// interval solve
///
///   sum_i [ D_ji K + k M_ji A + l_j(0) l_i(0) K ] U_i
///       = int_{I_m} load(t) l_j(t) dt + l_j(0) K u^-_{m-1}
///
/// with Radau-node unknowns U_i. gram plays the role of K, elliptic of A.
/// Returns coefficients[m][i]. Factorizations are reused across intervals
/// of equal length.
[[nodiscard]] std::vector<std::vector<Vector>> dg_sweep(const SparseMatrix& gram,
                                                        const SparseMatrix& elliptic,
                                                        const TimePartition& partition, int order,
                                                        const LoadProvider& load,
                                                        const Vector& initial);

/// Fully discrete transient stream-function solve; psi0 enters through its
/// H^1_0-projection.
[[nodiscard]] DgSolution dg_solve(const SpatialOperators& ops, const TimePartition& partition,
                                  int order, const LoadProvider& load, const ScalarField& psi0);
[[nodiscard]] DgSolution dg_solve(const SpatialOperators& ops, const TimePartition& partition,
                                  int order, const LoadProvider& load, const FeFunction& psi0);

/// ||grad(psi - psi_kh)||_{L2(I x Omega)} with per-interval Gauss time
/// quadrature (error_time_points(order) points unless given).
[[nodiscard]] double space_time_h1_error(const DgSolution& sol, const ScalarField& psi,
                                         int time_points = 0, int degree = kDataQuadratureDegree);

/// Radau-node coefficients of pi_k v on each interval for scalar v(t).
[[nodiscard]] std::vector<Eigen::VectorXd> time_projection(const TimePartition& partition,
                                                           int order,
                                                           const std::function<double(double)>& v);

struct StabilityTerms {
  double derivative = 0.0; ///< sum_m ||grad d_t psi_kh||^2 on I_m x Omega
  double operator_term = 0.0; ///< ||grad A_h psi_kh||^2 on I x Omega
  double jumps = 0.0; ///< sum_m k_m^-1 ||[grad psi_kh]_{m-1}||^2

  [[nodiscard]] double total() const { return derivative + operator_term + jumps; }
};

[[nodiscard]] StabilityTerms stability_functional(const DgSolution& sol, const SpatialOperators& ops);

/// |||Pi_h psi0|||_h^2 + ||grad g||^2_{I x Omega}, where g(t) in V_h is the
/// Riesz representative (grad g, grad phi) = <f(t), phi> of the load,
/// integrated with the load time rule.
[[nodiscard]] double stability_data_norm_squared(const SpatialOperators& ops,
                                                 const TimePartition& partition, int order,
                                                 const LoadProvider& load, const Vector& initial);

struct BestApproximation {
  double chi = 0.0;   ///< ||grad(psi - Pi_h pi_k psi)||
  double ritz = 0.0;  ///< ||grad(R_h psi - psi)||
  double time = 0.0;  ///< ||grad(pi_k psi - psi)||

  [[nodiscard]] double sum() const { return chi + ritz + time; }
};

[[nodiscard]] BestApproximation best_approx_terms(const ScalarField& psi, const SpatialOperators& ops,
                                                  const TimePartition& partition, int order);

/// ||grad(R_h psi(t) - psi(t))||^2. With use_separable, psi's separable form
/// (if any) is used to rescale a single projection of the spatial factor.
[[nodiscard]] double ritz_error_squared(const ScalarField& psi, const SpatialOperators& ops, double t,
                                        bool use_separable = true);

/// ||grad(pi_k psi - psi)||_{L2(I x Omega)}, spatial integral on the space's mesh.
[[nodiscard]] double time_projection_error(const ScalarField& psi, const FeSpace& space,
                                           const TimePartition& partition, int order);

/// chi_kh = Pi_h pi_k psi as a discrete solution.
[[nodiscard]] DgSolution projected_time_interpolant(const ScalarField& psi,
                                                    const SpatialOperators& ops,
                                                    const TimePartition& partition, int order);

/// B_h(u, v) in its defining (primal) form. gram is the H^1 stiffness,
/// elliptic the interior-penalty matrix.
[[nodiscard]] double bilinear_form(const DgSolution& u, const DgSolution& v, const SparseMatrix& gram,
                                   const SparseMatrix& elliptic);
/// B_h(u, v) after integrating the time derivative by parts.
[[nodiscard]] double bilinear_form_dual(const DgSolution& u, const DgSolution& v,
                                        const SparseMatrix& gram, const SparseMatrix& elliptic);

struct OrthogonalityResidual {
  double residual = 0.0;
  double scale = 0.0;

  [[nodiscard]] double relative() const { return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual); }
};

/// B_h(psi - psi_kh, test). B_h(psi, test) is integrated in time with the
/// load rule of the solve so that time quadrature cancels; spatial terms use
/// the given triangle rule degree (match it to the load's degree).
[[nodiscard]] OrthogonalityResidual galerkin_orthogonality(const DgSolution& discrete,
                                                           const ScalarField& psi,
                                                           const SpatialOperators& ops,
                                                           const DgSolution& test,
                                                           int degree = kDataQuadratureDegree);

struct JumpIdentity {
  double lhs = 0.0; ///< ([w], w+)
  double rhs = 0.0; ///< |w+|^2/2 + |[w]|^2/2 - |w-|^2/2
};

[[nodiscard]] JumpIdentity jump_identity(double minus, double plus);
[[nodiscard]] JumpIdentity jump_identity(const SparseMatrix& gram, const Vector& minus,
                                         const Vector& plus);

/// ||grad psi^-_m|| for m = 0..M (entry 0 is the initial value).
[[nodiscard]] std::vector<double> right_limit_energies(const DgSolution& sol, const SparseMatrix& gram);

} // namespace cipstokes
