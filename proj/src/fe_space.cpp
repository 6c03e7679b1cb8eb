#include "cipstokes/fe_space.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cipstokes {

TriangleMap triangle_map(const Mesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangle(t);
  TriangleMap m;
  m.origin = mesh.vertex(tri[0]);
  m.jacobian.col(0) = mesh.vertex(tri[1]) - m.origin;
  m.jacobian.col(1) = mesh.vertex(tri[2]) - m.origin;
  m.det = m.jacobian.determinant();
  m.inverse = m.jacobian.inverse();
  return m;
}

ReferenceTables::ReferenceTables(const LagrangeBasis& basis, TriangleRule r) : rule(std::move(r)) {
  values.reserve(rule.size());
  gradients.reserve(rule.size());
  for (const auto& p : rule.points) {
    values.push_back(basis.values(p));
    gradients.push_back(basis.gradients(p));
  }
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree), basis_(&lagrange_basis(degree)) {
  const Mesh& m = *mesh_;
  const auto nv = static_cast<Eigen::Index>(m.num_vertices());
  const auto ne = static_cast<Eigen::Index>(m.num_edges());
  const auto nt = static_cast<Eigen::Index>(m.num_triangles());
  const Eigen::Index per_edge = degree - 1;
  const Eigen::Index per_cell = (degree - 1) * (degree - 2) / 2;
  n_dofs_ = nv + per_edge * ne + per_cell * nt;

  dof_points_.resize(static_cast<std::size_t>(n_dofs_));
  std::vector<bool> on_boundary(static_cast<std::size_t>(n_dofs_), false);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    dof_points_[v] = m.vertex(v);
    on_boundary[v] = m.is_boundary_vertex(v);
  }
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const Point& a = m.vertex(m.edge(e)[0]);
    const Point& b = m.vertex(m.edge(e)[1]);
    for (Eigen::Index k = 0; k < per_edge; ++k) {
      const auto dof = static_cast<std::size_t>(nv + static_cast<Eigen::Index>(e) * per_edge + k);
      dof_points_[dof] = a + (b - a) * (double(k + 1) / degree);
      on_boundary[dof] = m.is_boundary_edge(e);
    }
  }

  const auto nloc = static_cast<std::size_t>(basis_->size());
  dof_map_.resize(m.num_triangles() * nloc);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangle(t);
    Eigen::Index* cell = dof_map_.data() + t * nloc;
    std::size_t local = 0;
    for (int j = 0; j < 3; ++j) cell[local++] = static_cast<Eigen::Index>(tri[static_cast<std::size_t>(j)]);
    for (int j = 0; j < 3; ++j) {
      const std::size_t e = m.triangle_edge(t, j);
      const bool forward = tri[static_cast<std::size_t>(j)] < tri[static_cast<std::size_t>((j + 1) % 3)];
      for (Eigen::Index k = 0; k < per_edge; ++k) {
        const Eigen::Index kk = forward ? k : per_edge - 1 - k;
        cell[local++] = nv + static_cast<Eigen::Index>(e) * per_edge + kk;
      }
    }
    const TriangleMap map = triangle_map(m, t);
    for (Eigen::Index k = 0; k < per_cell; ++k) {
      const Eigen::Index dof = nv + per_edge * ne + static_cast<Eigen::Index>(t) * per_cell + k;
      cell[local] = dof;
      dof_points_[static_cast<std::size_t>(dof)] = map.to_physical(basis_->nodes()[local]);
      ++local;
    }
  }

  for (Eigen::Index i = 0; i < n_dofs_; ++i) {
    if (on_boundary[static_cast<std::size_t>(i)]) boundary_dofs_.push_back(i);
  }
  interior_ = DofSubset(n_dofs_, boundary_dofs_);
}

std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const Mesh> mesh, int degree) {
  if (!mesh) throw std::invalid_argument("build_space: null mesh");
  return std::make_shared<const FeSpace>(std::move(mesh), degree);
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> s, Vector c)
    : space(std::move(s)), coefficients(std::move(c)) {
  if (coefficients.size() != space->n_dofs()) {
    throw std::invalid_argument("FeFunction: coefficient length does not match n_dofs");
  }
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> s)
    : space(std::move(s)), coefficients(Vector::Zero(space->n_dofs())) {}

FeFunction::Evaluation FeFunction::evaluate(const Point& x) const {
  const Mesh& m = space->mesh();
  const std::size_t t = m.locate(x);
  if (t == m.num_triangles()) throw std::out_of_range("FeFunction::evaluate: point outside mesh");
  const TriangleMap map = triangle_map(m, t);
  const Eigen::Vector2d xi = map.to_reference(x);
  const auto dofs = space->cell_dofs(t);
  const Eigen::VectorXd vals = space->basis().values(xi);
  const Eigen::MatrixX2d grads = map.physical_gradients(space->basis().gradients(xi));
  Evaluation out{0.0, Eigen::Vector2d::Zero()};
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const double c = coefficients[dofs[i]];
    out.value += c * vals[static_cast<Eigen::Index>(i)];
    out.gradient += c * grads.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return out;
}

namespace {

// Calls body(t, map, dofs) for every triangle.
template <class Body>
void for_each_cell(const FeSpace& space, Body&& body) {
  const Mesh& m = space.mesh();
  for (std::size_t t = 0; t < m.num_triangles(); ++t) body(t, triangle_map(m, t), space.cell_dofs(t));
}

} // namespace

SparseMatrix assemble_h1_stiffness(const FeSpace& space) {
  const ReferenceTables tab(space.basis(), triangle_rule(2 * (space.degree() - 1)));
  const int n = space.dofs_per_cell();
  TripletAccumulator acc;
  acc.reserve(space.mesh().num_triangles() * static_cast<std::size_t>(n * n));
  Eigen::MatrixXd local(n, n);
  for_each_cell(space, [&](std::size_t, const TriangleMap& map, std::span<const Eigen::Index> dofs) {
    local.setZero();
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const Eigen::MatrixX2d g = map.physical_gradients(tab.gradients[q]);
      local.noalias() += (tab.rule.weights[q] * std::abs(map.det)) * (g * g.transpose());
    }
    // exact symmetry
    local = 0.5 * (local + local.transpose()).eval();
    acc.add_local(dofs, dofs, local);
  });
  return acc.build(space.n_dofs(), space.n_dofs());
}

SparseMatrix assemble_mass(const FeSpace& space) {
  const ReferenceTables tab(space.basis(), triangle_rule(2 * space.degree()));
  const int n = space.dofs_per_cell();
  TripletAccumulator acc;
  Eigen::MatrixXd local(n, n);
  for_each_cell(space, [&](std::size_t, const TriangleMap& map, std::span<const Eigen::Index> dofs) {
    local.setZero();
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      local.noalias() += (tab.rule.weights[q] * std::abs(map.det)) *
                         (tab.values[q] * tab.values[q].transpose());
    }
    local = 0.5 * (local + local.transpose()).eval();
    acc.add_local(dofs, dofs, local);
  });
  return acc.build(space.n_dofs(), space.n_dofs());
}

Vector assemble_load_scalar(const FeSpace& space, const ScalarField& f, double t, int degree) {
  if (!f.value) throw std::logic_error("assemble_load_scalar: field has no value routine");
  const ReferenceTables tab(space.basis(), triangle_rule(degree));
  Vector b = Vector::Zero(space.n_dofs());
  for_each_cell(space, [&](std::size_t, const TriangleMap& map, std::span<const Eigen::Index> dofs) {
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double w = tab.rule.weights[q] * std::abs(map.det) *
                       f.value(t, map.to_physical(tab.rule.points[q]));
      for (std::size_t i = 0; i < dofs.size(); ++i) {
        b[dofs[i]] += w * tab.values[q][static_cast<Eigen::Index>(i)];
      }
    }
  });
  return b;
}

Vector assemble_gradient_load(const FeSpace& space,
                              const std::function<Eigen::Vector2d(const Point&)>& G, int degree) {
  const ReferenceTables tab(space.basis(), triangle_rule(degree));
  Vector b = Vector::Zero(space.n_dofs());
  for_each_cell(space, [&](std::size_t, const TriangleMap& map, std::span<const Eigen::Index> dofs) {
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const Eigen::Vector2d gv =
          tab.rule.weights[q] * std::abs(map.det) * G(map.to_physical(tab.rule.points[q]));
      const Eigen::VectorXd contrib = map.physical_gradients(tab.gradients[q]) * gv;
      for (std::size_t i = 0; i < dofs.size(); ++i) {
        b[dofs[i]] += contrib[static_cast<Eigen::Index>(i)];
      }
    }
  });
  return b;
}

Vector assemble_load_dual(const FeSpace& space, const VectorField& g, double t, int degree) {
  if (!g.value) throw std::logic_error("assemble_load_dual: field has no value routine");
  // g . (d2 phi, -d1 phi) = (-g2, g1) . grad phi
  return assemble_gradient_load(
      space,
      [&](const Point& x) {
        const Eigen::Vector2d v = g.value(t, x);
        return Eigen::Vector2d(-v.y(), v.x());
      },
      degree);
}

Vector interpolate(const FeSpace& space, const ScalarField& f, double t) {
  Vector c(space.n_dofs());
  for (Eigen::Index i = 0; i < space.n_dofs(); ++i) {
    c[i] = f.value(t, space.dof_points()[static_cast<std::size_t>(i)]);
  }
  return c;
}

double gradient_error_squared(const FeSpace& space, const Vector& coefficients,
                              const std::function<Eigen::Vector2d(const Point&)>& G, int degree) {
  if (coefficients.size() != space.n_dofs()) {
    throw std::invalid_argument("gradient_error_squared: coefficient length mismatch");
  }
  const ReferenceTables tab(space.basis(), triangle_rule(degree));
  double sum = 0.0;
  Eigen::VectorXd local(space.dofs_per_cell());
  for_each_cell(space, [&](std::size_t, const TriangleMap& map, std::span<const Eigen::Index> dofs) {
    for (std::size_t i = 0; i < dofs.size(); ++i) local[static_cast<Eigen::Index>(i)] = coefficients[dofs[i]];
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const Eigen::Vector2d gh = map.physical_gradients(tab.gradients[q]).transpose() * local;
      const Eigen::Vector2d diff = G(map.to_physical(tab.rule.points[q])) - gh;
      sum += tab.rule.weights[q] * std::abs(map.det) * diff.squaredNorm();
    }
  });
  return sum;
}

H1Projector::H1Projector(std::shared_ptr<const FeSpace> space)
    : space_(std::move(space)),
      stiffness_(assemble_h1_stiffness(*space_)),
      solver_(space_->interior().restrict(stiffness_)) {}

Vector H1Projector::solve(const Vector& load) const {
  const DofSubset& inner = space_->interior();
  return inner.extend(solver_.solve(inner.restrict(load)));
}

FeFunction H1Projector::project(const ScalarField& w, double t, int degree) const {
  if (!w.gradient) throw std::logic_error("H1Projector: field has no gradient routine");
  const Vector b =
      assemble_gradient_load(*space_, [&](const Point& x) { return w.gradient(t, x); }, degree);
  return {space_, solve(b)};
}

FeFunction H1Projector::project(const FeFunction& w) const {
  if (w.space.get() != space_.get()) {
    throw std::invalid_argument("H1Projector::project: function lives on another space");
  }
  return {space_, solve(stiffness_ * w.coefficients)};
}

FeFunction h1_projection(std::shared_ptr<const FeSpace> space, const ScalarField& w, double t) {
  return H1Projector(std::move(space)).project(w, t);
}

} // namespace cipstokes
