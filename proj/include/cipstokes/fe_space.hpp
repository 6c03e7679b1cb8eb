#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cipstokes/fields.hpp"
#include "cipstokes/lagrange.hpp"
#include "cipstokes/linalg.hpp"
#include "cipstokes/mesh.hpp"
#include "cipstokes/quadrature.hpp"

namespace cipstokes {

/// Triangle rule degree for data (loads, projections of analytic fields,
/// errors). Matrices use rules exact for their polynomial integrands.
inline constexpr int kDataQuadratureDegree = 8;

/// Affine map x = origin + J * xi from the reference triangle.
struct TriangleMap {
  Point origin;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse;
  double det = 0.0;

  [[nodiscard]] Point to_physical(const Eigen::Vector2d& xi) const { return origin + jacobian * xi; }
  [[nodiscard]] Eigen::Vector2d to_reference(const Point& x) const { return inverse * (x - origin); }
  /// Rows are gradients: physical = reference * J^-1.
  [[nodiscard]] Eigen::MatrixX2d physical_gradients(const Eigen::MatrixX2d& ref) const {
    return ref * inverse;
  }
  [[nodiscard]] Eigen::Matrix2d physical_hessian(const Eigen::Matrix2d& ref) const {
    return inverse.transpose() * ref * inverse;
  }
};

[[nodiscard]] TriangleMap triangle_map(const Mesh& mesh, std::size_t t);

/// Basis values and reference gradients tabulated at the points of a rule.
struct ReferenceTables {
  TriangleRule rule;
  std::vector<Eigen::VectorXd> values;
  std::vector<Eigen::MatrixX2d> gradients;

  ReferenceTables(const LagrangeBasis& basis, TriangleRule r);
};

/// Continuous Lagrange space of degree l on a mesh.
///
/// Global numbering: vertices, then l-1 DOFs per edge (ordered from the
/// lower to the higher vertex index), then interior DOFs per triangle.
class FeSpace {
public:
  /// Throws std::invalid_argument for an unsupported degree.
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree);

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] const LagrangeBasis& basis() const { return *basis_; }
  [[nodiscard]] Eigen::Index n_dofs() const { return n_dofs_; }
  [[nodiscard]] int dofs_per_cell() const { return basis_->size(); }

  [[nodiscard]] std::span<const Eigen::Index> cell_dofs(std::size_t t) const {
    const auto n = static_cast<std::size_t>(dofs_per_cell());
    return {dof_map_.data() + t * n, n};
  }
  /// Nodal points of the global DOFs.
  [[nodiscard]] const std::vector<Point>& dof_points() const { return dof_points_; }
  /// Sorted global DOFs whose node lies on the boundary.
  [[nodiscard]] const std::vector<Eigen::Index>& boundary_dofs() const { return boundary_dofs_; }
  [[nodiscard]] const DofSubset& interior() const { return interior_; }

private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  const LagrangeBasis* basis_;
  Eigen::Index n_dofs_ = 0;
  std::vector<Eigen::Index> dof_map_;
  std::vector<Point> dof_points_;
  std::vector<Eigen::Index> boundary_dofs_;
  DofSubset interior_;
};

[[nodiscard]] std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const Mesh> mesh,
                                                         int degree);

/// Element of a FeSpace.
struct FeFunction {
  std::shared_ptr<const FeSpace> space;
  Vector coefficients;

  FeFunction(std::shared_ptr<const FeSpace> s, Vector c);
  explicit FeFunction(std::shared_ptr<const FeSpace> s);

  struct Evaluation {
    double value;
    Eigen::Vector2d gradient;
  };
  /// Throws std::out_of_range if x lies outside the mesh.
  [[nodiscard]] Evaluation evaluate(const Point& x) const;
};

/// (grad phi_i, grad phi_j), assembled symmetrically over the full space.
[[nodiscard]] SparseMatrix assemble_h1_stiffness(const FeSpace& space);

/// (phi_i, phi_j).
[[nodiscard]] SparseMatrix assemble_mass(const FeSpace& space);

/// b_i = int f(t, .) phi_i.
[[nodiscard]] Vector assemble_load_scalar(const FeSpace& space, const ScalarField& f, double t,
                                          int degree = kDataQuadratureDegree);

/// b_i = int g(t, .) . Curl(phi_i), Curl(phi) = (d2 phi, -d1 phi). This is
/// the pairing <-curl g, phi_i> for phi_i vanishing on the boundary.
[[nodiscard]] Vector assemble_load_dual(const FeSpace& space, const VectorField& g, double t,
                                        int degree = kDataQuadratureDegree);

/// b_i = int G(x) . grad(phi_i).
[[nodiscard]] Vector assemble_gradient_load(const FeSpace& space,
                                            const std::function<Eigen::Vector2d(const Point&)>& G,
                                            int degree = kDataQuadratureDegree);

/// Nodal interpolant of f(t, .).
[[nodiscard]] Vector interpolate(const FeSpace& space, const ScalarField& f, double t);

/// int |G(x) - grad u_h|^2.
[[nodiscard]] double gradient_error_squared(
    const FeSpace& space, const Vector& coefficients,
    const std::function<Eigen::Vector2d(const Point&)>& G, int degree = kDataQuadratureDegree);

/// H^1_0-projection onto V_h: (grad Pi w, grad v) = (grad w, grad v) for all
/// v in V_h, boundary DOFs zero. Holds the factorized stiffness matrix.
class H1Projector {
public:
  explicit H1Projector(std::shared_ptr<const FeSpace> space);

  [[nodiscard]] const SparseMatrix& stiffness() const { return stiffness_; }
  [[nodiscard]] const FeSpace& space() const { return *space_; }

  /// Projection of w(t, .); uses w.gradient.
  [[nodiscard]] FeFunction project(const ScalarField& w, double t,
                                   int degree = kDataQuadratureDegree) const;
  [[nodiscard]] FeFunction project(const FeFunction& w) const;
  /// Solves the eliminated system K x = b for a full-length load b (the
  /// boundary rows of b are ignored).
  [[nodiscard]] Vector solve(const Vector& load) const;

private:
  std::shared_ptr<const FeSpace> space_;
  SparseMatrix stiffness_;
  SpdSolver solver_;
};

[[nodiscard]] FeFunction h1_projection(std::shared_ptr<const FeSpace> space, const ScalarField& w,
                                       double t = 0.0);

} // namespace cipstokes
