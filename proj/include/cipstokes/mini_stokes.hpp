#pragma once

#include <array>
#include <memory>
#include <vector>

#include "cipstokes/dg_time.hpp"
#include "cipstokes/fields.hpp"
#include "cipstokes/linalg.hpp"
#include "cipstokes/mesh.hpp"

namespace cipstokes {

/// P1-plus-bubble velocity (zero on the boundary) and continuous P1
/// pressure. Per velocity component the scalar unknowns are the interior
/// vertices followed by one cubic bubble 27 l1 l2 l3 per triangle; the
/// second component is offset by scalar_size().
class MiniSpace {
public:
  explicit MiniSpace(std::shared_ptr<const Mesh> mesh);

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] Eigen::Index scalar_size() const { return scalar_size_; }
  [[nodiscard]] Eigen::Index velocity_dofs() const { return 2 * scalar_size_; }
  [[nodiscard]] Eigen::Index pressure_dofs() const {
    return static_cast<Eigen::Index>(mesh_->num_vertices());
  }
  /// Scalar DOFs of the three vertex hats and the bubble of triangle t; -1
  /// marks a boundary vertex.
  [[nodiscard]] std::array<Eigen::Index, 4> cell_dofs(std::size_t t) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<Eigen::Index> vertex_dof_;
  Eigen::Index scalar_size_ = 0;
};

[[nodiscard]] std::shared_ptr<const MiniSpace> build_mini_space(std::shared_ptr<const Mesh> mesh);

struct MiniOperators {
  SparseMatrix mass;       ///< (u, v), velocity x velocity
  SparseMatrix stiffness;  ///< (grad u, grad v)
  SparseMatrix divergence; ///< (q, div v), pressure x velocity
  Vector pressure_mean;    ///< (q, 1)
};

[[nodiscard]] MiniOperators assemble_mini(const MiniSpace& space);

/// Velocity (value) at x from coefficients on a MINI space.
[[nodiscard]] Eigen::Vector2d evaluate_velocity(const MiniSpace& space, const Vector& coefficients,
                                                const Point& x);

/// L2 projection of u(t, .) onto the velocity space.
[[nodiscard]] Vector velocity_l2_projection(const MiniSpace& space, const MiniOperators& ops,
                                            const VectorField& u, double t);

struct MiniSolution {
  std::shared_ptr<const MiniSpace> space;
  TimePartition partition;
  Vector initial;
  std::vector<Vector> velocity; ///< u_m on interval m
  std::vector<Vector> pressure; ///< p_m on interval m (mean zero)
  double max_divergence_residual = 0.0; ///< max_m ||(q, div u_m)||
  double max_pressure_mean = 0.0;       ///< max_m |mean(p_m)|
};

/// Implicit Euler (dG(0)) MINI solve: on each interval
///   (u_m - u_{m-1}, v) + k (grad u_m, grad v) - k (p_m, div v) - k (q, div u_m)
///       = int_{I_m} (g, v) dt,
/// with the pressure mean fixed to zero by a Lagrange multiplier. The load
/// uses 3 Gauss points per step in time.
[[nodiscard]] MiniSolution mini_transient_solve(std::shared_ptr<const MiniSpace> space,
                                                const TimePartition& partition,
                                                const VectorField& g, const VectorField& u0,
                                                int degree = kDataQuadratureDegree);

/// ||u - u_kh||_{L2(I x Omega)}, u_kh constant in time on each interval.
[[nodiscard]] double velocity_error_l2(const MiniSolution& sol, const VectorField& u_exact,
                                       int time_points = 3, int degree = kDataQuadratureDegree);

} // namespace cipstokes
