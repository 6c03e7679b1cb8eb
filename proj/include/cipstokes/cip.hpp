#pragma once

#include <memory>

#include "cipstokes/fe_space.hpp"
#include "cipstokes/linalg.hpp"

namespace cipstokes {

/// Penalty used when none is given: 20 for l = 2, 40 for l = 3.
[[nodiscard]] double default_penalty(int degree);

/// The C0 interior-penalty biharmonic form
///
///   a_h(v, w) = sum_T (D2 v : D2 w)_T
///             + sum_e ( {{d2v/dn2}} [[dw/dn]] + [[dv/dn]] {{d2w/dn2}}
///                       + eta/|e| [[dv/dn]] [[dw/dn]] )_e
///
/// with [[dv/dn]] = dv_+/dn - dv_-/dn on interior edges (n from minus to plus)
/// and [[dv/dn]] = -dv/dn, {{d2v/dn2}} = d2v/dn2 on boundary edges.
///
/// Construction factors the form restricted to V_h (boundary DOFs removed)
/// and throws CoercivityError if that matrix is not positive definite.
class CipForm {
public:
  CipForm(std::shared_ptr<const FeSpace> space, double penalty);

  [[nodiscard]] const FeSpace& space() const { return *space_; }
  [[nodiscard]] const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
  [[nodiscard]] double penalty() const { return penalty_; }
  /// Full matrix over all DOFs, boundary included.
  [[nodiscard]] const SparseMatrix& matrix() const { return matrix_; }
  /// Matrix restricted to the interior DOFs.
  [[nodiscard]] const SparseMatrix& reduced() const { return reduced_; }
  [[nodiscard]] const SpdSolver& solver() const { return solver_; }

private:
  std::shared_ptr<const FeSpace> space_;
  double penalty_;
  SparseMatrix matrix_;
  SparseMatrix reduced_;
  SpdSolver solver_;
};

/// Assembled form only, no factorization or coercivity check.
[[nodiscard]] SparseMatrix assemble_cip_matrix(const FeSpace& space, double penalty);

/// Throws std::invalid_argument for degree < 2 or penalty <= 0.
[[nodiscard]] std::shared_ptr<const CipForm> assemble_cip(std::shared_ptr<const FeSpace> space,
                                                          double penalty);
[[nodiscard]] std::shared_ptr<const CipForm> assemble_cip(std::shared_ptr<const FeSpace> space);

/// |||v|||_h = sqrt(a_h(v, v)). Throws CoercivityError when a_h(v, v) is
/// negative beyond 1e-12 ||v||^2.
[[nodiscard]] double triple_norm(const CipForm& form, const FeFunction& v);

/// (a_h(w(t), phi_i))_i for a smooth w with w = dw/dn = 0 on the boundary.
/// The [[dw/dn]] terms vanish for such w and are not evaluated; the caller
/// is trusted on the boundary condition (ScalarField::clamped is not checked).
[[nodiscard]] Vector consistency_pairing(const CipForm& form, const ScalarField& w, double t = 0.0,
                                         int degree = kDataQuadratureDegree);

/// Ritz projection: a_h(w - R_h w, chi) = 0 for all chi in V_h.
[[nodiscard]] FeFunction ritz_projection(const CipForm& form, const ScalarField& w, double t = 0.0,
                                         int degree = kDataQuadratureDegree);

/// A_h v, defined by (grad A_h v, grad chi) = a_h(v, chi) for all chi in V_h.
[[nodiscard]] FeFunction apply_ah(const CipForm& form, const H1Projector& h1, const FeFunction& v);

/// Solves a_h(psi_h, phi_i) = rhs_i over V_h (boundary rows of rhs ignored).
[[nodiscard]] FeFunction solve_stationary(const CipForm& form, const Vector& rhs);

} // namespace cipstokes
