#include "cipstokes/cip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cipstokes {

double default_penalty(int degree) { return degree <= 2 ? 20.0 : 40.0; }

namespace {

// Normal derivative data of every basis function of one adjacent triangle at
// one edge point.
struct SideTrace {
  Eigen::VectorXd dn;  // d phi / dn
  Eigen::VectorXd dnn; // d2 phi / dn2
};

SideTrace side_trace(const FeSpace& space, std::size_t t, const Point& x, const Eigen::Vector2d& n) {
  const TriangleMap map = triangle_map(space.mesh(), t);
  const Eigen::Vector2d xi = map.to_reference(x);
  const Eigen::MatrixX2d g = map.physical_gradients(space.basis().gradients(xi));
  const auto h = space.basis().hessians(xi);
  SideTrace s{g * n, Eigen::VectorXd(space.dofs_per_cell())};
  for (int i = 0; i < space.dofs_per_cell(); ++i) {
    s.dnn[i] = n.dot(map.physical_hessian(h[static_cast<std::size_t>(i)]) * n);
  }
  return s;
}

int edge_points(int degree) { return (2 * degree + 2) / 2 + 1; } // ceil((2l+1)/2) + 1

// DOFs touching an edge (union over its sides) and, per side, the patch
// position of each local basis function.
struct EdgePatch {
  std::vector<Eigen::Index> dofs;
  std::vector<std::vector<int>> position;
};

EdgePatch edge_patch(const FeSpace& space, std::size_t e) {
  EdgePatch p;
  for (const auto& side : space.mesh().edge_sides(e)) {
    std::vector<int> pos;
    for (auto d : space.cell_dofs(side.triangle)) {
      auto it = std::find(p.dofs.begin(), p.dofs.end(), d);
      if (it == p.dofs.end()) {
        p.dofs.push_back(d);
        pos.push_back(static_cast<int>(p.dofs.size()) - 1);
      } else {
        pos.push_back(static_cast<int>(it - p.dofs.begin()));
      }
    }
    p.position.push_back(std::move(pos));
  }
  return p;
}

// Jump of the normal derivative and average of the second normal derivative
// of every patch function at x. The minus side always carries sign -1: on
// boundary edges that is the definition [[dv/dn]] = -dv/dn.
void jump_average(const FeSpace& space, std::size_t e, const EdgePatch& patch, const Point& x,
                  Eigen::VectorXd& jump, Eigen::VectorXd& avg) {
  const Mesh& m = space.mesh();
  const auto& sides = m.edge_sides(e);
  const Eigen::Vector2d& n = m.edge_normal(e);
  const double avg_weight = sides.size() == 2 ? 0.5 : 1.0;
  const auto np = static_cast<Eigen::Index>(patch.dofs.size());
  jump.setZero(np);
  avg.setZero(np);
  for (std::size_t s = 0; s < sides.size(); ++s) {
    const double sign = s == 0 ? -1.0 : 1.0;
    const SideTrace tr = side_trace(space, sides[s].triangle, x, n);
    for (int i = 0; i < space.dofs_per_cell(); ++i) {
      const int p = patch.position[s][static_cast<std::size_t>(i)];
      jump[p] += sign * tr.dn[i];
      avg[p] += avg_weight * tr.dnn[i];
    }
  }
}

double frobenius(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) { return (a.array() * b.array()).sum(); }

} // namespace

SparseMatrix assemble_cip_matrix(const FeSpace& space, double penalty) {
  if (space.degree() < 2) throw std::invalid_argument("assemble_cip: degree must be >= 2");
  if (!(penalty > 0.0)) throw std::invalid_argument("assemble_cip: penalty must be positive");
  const Mesh& m = space.mesh();
  const int nloc = space.dofs_per_cell();
  TripletAccumulator acc;

  const TriangleRule rule = triangle_rule(2 * space.degree());
  std::vector<std::vector<Eigen::Matrix2d>> ref_hess;
  for (const auto& p : rule.points) ref_hess.push_back(space.basis().hessians(p));
  Eigen::MatrixXd local(nloc, nloc);
  std::vector<Eigen::Matrix2d> h(static_cast<std::size_t>(nloc));
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const TriangleMap map = triangle_map(m, t);
    local.setZero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * std::abs(map.det);
      for (std::size_t i = 0; i < h.size(); ++i) h[i] = map.physical_hessian(ref_hess[q][i]);
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j <= i; ++j) {
          local(i, j) += w * frobenius(h[static_cast<std::size_t>(i)], h[static_cast<std::size_t>(j)]);
        }
      }
    }
    local = local.selfadjointView<Eigen::Lower>();
    const auto dofs = space.cell_dofs(t);
    acc.add_local(dofs, dofs, local);
  }

  const LineRule line = gauss_legendre(edge_points(space.degree()));
  Eigen::VectorXd jump;
  Eigen::VectorXd avg;
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const EdgeGeometry geo = m.edge_geometry(e);
    const EdgePatch patch = edge_patch(space, e);
    const auto np = static_cast<Eigen::Index>(patch.dofs.size());
    Eigen::MatrixXd el = Eigen::MatrixXd::Zero(np, np);
    for (std::size_t q = 0; q < line.size(); ++q) {
      const Point x = geo.a + line.points[q] * (geo.b - geo.a);
      jump_average(space, e, patch, x, jump, avg);
      const double w = line.weights[q] * geo.length;
      el.noalias() += w * (avg * jump.transpose() + jump * avg.transpose() +
                           (penalty / geo.length) * jump * jump.transpose());
    }
    el = 0.5 * (el + el.transpose()).eval();
    acc.add_local(patch.dofs, patch.dofs, el);
  }
  return acc.build(space.n_dofs(), space.n_dofs());
}

CipForm::CipForm(std::shared_ptr<const FeSpace> space, double penalty)
    : space_(std::move(space)),
      penalty_(penalty),
      matrix_(assemble_cip_matrix(*space_, penalty)),
      reduced_(space_->interior().restrict(matrix_)),
      solver_([this] {
        try {
          return SpdSolver(reduced_);
        } catch (const NotPositiveDefiniteError&) {
          throw CoercivityError("assemble_cip: interior-penalty form is not coercive for eta = " +
                                std::to_string(penalty_) + "; increase the penalty");
        }
      }()) {}

std::shared_ptr<const CipForm> assemble_cip(std::shared_ptr<const FeSpace> space, double penalty) {
  if (!space) throw std::invalid_argument("assemble_cip: null space");
  return std::make_shared<const CipForm>(std::move(space), penalty);
}

std::shared_ptr<const CipForm> assemble_cip(std::shared_ptr<const FeSpace> space) {
  const double eta = default_penalty(space->degree());
  return assemble_cip(std::move(space), eta);
}

double triple_norm(const CipForm& form, const FeFunction& v) {
  const double q = v.coefficients.dot(form.matrix() * v.coefficients);
  if (q < -1e-12 * v.coefficients.squaredNorm()) {
    throw CoercivityError("triple_norm: a_h(v, v) = " + std::to_string(q) + " is negative");
  }
  return std::sqrt(std::max(q, 0.0));
}

Vector consistency_pairing(const CipForm& form, const ScalarField& w, double t, int degree) {
  if (!w.hessian) throw std::logic_error("consistency_pairing: field has no hessian routine");
  const FeSpace& space = form.space();
  const Mesh& m = space.mesh();
  Vector b = Vector::Zero(space.n_dofs());

  const TriangleRule rule = triangle_rule(degree);
  std::vector<std::vector<Eigen::Matrix2d>> ref_hess;
  for (const auto& p : rule.points) ref_hess.push_back(space.basis().hessians(p));
  for (std::size_t tri = 0; tri < m.num_triangles(); ++tri) {
    const TriangleMap map = triangle_map(m, tri);
    const auto dofs = space.cell_dofs(tri);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = rule.weights[q] * std::abs(map.det);
      const Eigen::Matrix2d hw = w.hessian(t, map.to_physical(rule.points[q]));
      for (std::size_t i = 0; i < dofs.size(); ++i) {
        b[dofs[i]] += wq * frobenius(hw, map.physical_hessian(ref_hess[q][i]));
      }
    }
  }

  const LineRule line = line_rule(degree);
  Eigen::VectorXd jump;
  Eigen::VectorXd avg;
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const EdgeGeometry geo = m.edge_geometry(e);
    const EdgePatch patch = edge_patch(space, e);
    for (std::size_t q = 0; q < line.size(); ++q) {
      const Point x = geo.a + line.points[q] * (geo.b - geo.a);
      jump_average(space, e, patch, x, jump, avg);
      const double wnn = geo.normal.dot(w.hessian(t, x) * geo.normal);
      const double wq = line.weights[q] * geo.length * wnn;
      for (std::size_t p = 0; p < patch.dofs.size(); ++p) {
        b[patch.dofs[p]] += wq * jump[static_cast<Eigen::Index>(p)];
      }
    }
  }
  return b;
}

FeFunction solve_stationary(const CipForm& form, const Vector& rhs) {
  const DofSubset& inner = form.space().interior();
  return {form.space_ptr(), inner.extend(form.solver().solve(inner.restrict(rhs)))};
}

FeFunction ritz_projection(const CipForm& form, const ScalarField& w, double t, int degree) {
  return solve_stationary(form, consistency_pairing(form, w, t, degree));
}

FeFunction apply_ah(const CipForm& form, const H1Projector& h1, const FeFunction& v) {
  if (&h1.space() != &form.space()) {
    throw std::invalid_argument("apply_ah: projector and form live on different spaces");
  }
  return {form.space_ptr(), h1.solve(form.matrix() * v.coefficients)};
}

} // namespace cipstokes
