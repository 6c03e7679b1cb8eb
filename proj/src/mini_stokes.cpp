#include "cipstokes/mini_stokes.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "cipstokes/fe_space.hpp"
#include "cipstokes/quadrature.hpp"

namespace cipstokes {

namespace {

// Shape values [l0, l1, l2, b] and physical gradients at barycentric point
// (1 - xi - eta, xi, eta).
struct MiniShapes {
  Eigen::Vector4d values;
  Eigen::Matrix<double, 4, 2> gradients;
};

MiniShapes mini_shapes(const Eigen::Vector2d& xi, const TriangleMap& map) {
  const double l0 = 1.0 - xi.x() - xi.y();
  const double l1 = xi.x();
  const double l2 = xi.y();
  Eigen::Matrix<double, 3, 2> ref;
  ref << -1.0, -1.0, 1.0, 0.0, 0.0, 1.0;
  const Eigen::Matrix<double, 3, 2> grad = ref * map.inverse;
  MiniShapes s;
  s.values << l0, l1, l2, 27.0 * l0 * l1 * l2;
  s.gradients.topRows<3>() = grad;
  s.gradients.row(3) = 27.0 * (l1 * l2 * grad.row(0) + l0 * l2 * grad.row(1) + l0 * l1 * grad.row(2));
  return s;
}

} // namespace

MiniSpace::MiniSpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  if (!mesh_) throw std::invalid_argument("MiniSpace: null mesh");
  vertex_dof_.assign(mesh_->num_vertices(), -1);
  for (std::size_t v = 0; v < mesh_->num_vertices(); ++v) {
    if (!mesh_->is_boundary_vertex(v)) vertex_dof_[v] = scalar_size_++;
  }
  scalar_size_ += static_cast<Eigen::Index>(mesh_->num_triangles());
}

std::array<Eigen::Index, 4> MiniSpace::cell_dofs(std::size_t t) const {
  const auto& tri = mesh_->triangles()[t];
  const auto interior = scalar_size_ - static_cast<Eigen::Index>(mesh_->num_triangles());
  return {vertex_dof_[tri[0]], vertex_dof_[tri[1]], vertex_dof_[tri[2]],
          interior + static_cast<Eigen::Index>(t)};
}

std::shared_ptr<const MiniSpace> build_mini_space(std::shared_ptr<const Mesh> mesh) {
  return std::make_shared<const MiniSpace>(std::move(mesh));
}

MiniOperators assemble_mini(const MiniSpace& space) {
  const Mesh& mesh = space.mesh();
  const Eigen::Index n = space.scalar_size();
  const TriangleRule rule = triangle_rule(6);
  TripletAccumulator mass;
  TripletAccumulator stiff;
  TripletAccumulator div;
  MiniOperators ops;
  ops.pressure_mean = Vector::Zero(space.pressure_dofs());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleMap map = triangle_map(mesh, t);
    const auto dofs = space.cell_dofs(t);
    const auto& tri = mesh.triangles()[t];
    Eigen::Matrix4d m_loc = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d a_loc = Eigen::Matrix4d::Zero();
    // d_loc(a, c * 4 + j): (q_a, d_c phi_j)
    Eigen::Matrix<double, 3, 8> d_loc = Eigen::Matrix<double, 3, 8>::Zero();
    Eigen::Vector3d p_loc = Eigen::Vector3d::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const MiniShapes s = mini_shapes(rule.points[q], map);
      const double w = rule.weights[q] * std::abs(map.det);
      m_loc += w * s.values * s.values.transpose();
      a_loc += w * s.gradients * s.gradients.transpose();
      const Eigen::Vector3d p = s.values.head<3>();
      d_loc.leftCols<4>() += w * p * s.gradients.col(0).transpose();
      d_loc.rightCols<4>() += w * p * s.gradients.col(1).transpose();
      p_loc += w * p;
    }
    for (int c = 0; c < 2; ++c) {
      const Eigen::Index offset = c * n;
      for (int i = 0; i < 4; ++i) {
        if (dofs[static_cast<std::size_t>(i)] < 0) continue;
        const Eigen::Index gi = offset + dofs[static_cast<std::size_t>(i)];
        for (int j = 0; j < 4; ++j) {
          if (dofs[static_cast<std::size_t>(j)] < 0) continue;
          const Eigen::Index gj = offset + dofs[static_cast<std::size_t>(j)];
          mass.add(gi, gj, m_loc(i, j));
          stiff.add(gi, gj, a_loc(i, j));
        }
        for (int a = 0; a < 3; ++a) {
          div.add(static_cast<Eigen::Index>(tri[static_cast<std::size_t>(a)]), gi, d_loc(a, c * 4 + i));
        }
      }
    }
    for (int a = 0; a < 3; ++a) ops.pressure_mean[static_cast<Eigen::Index>(tri[static_cast<std::size_t>(a)])] += p_loc[a];
  }
  ops.mass = mass.build(2 * n, 2 * n);
  ops.stiffness = stiff.build(2 * n, 2 * n);
  ops.divergence = div.build(space.pressure_dofs(), 2 * n);
  return ops;
}

Eigen::Vector2d evaluate_velocity(const MiniSpace& space, const Vector& coefficients, const Point& x) {
  const std::size_t t = space.mesh().locate(x);
  if (t >= space.mesh().num_triangles()) throw std::out_of_range("evaluate_velocity: point outside mesh");
  const TriangleMap map = triangle_map(space.mesh(), t);
  const MiniShapes s = mini_shapes(map.to_reference(x), map);
  const auto dofs = space.cell_dofs(t);
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < 4; ++i) {
    if (dofs[i] < 0) continue;
    u.x() += s.values[static_cast<Eigen::Index>(i)] * coefficients[dofs[i]];
    u.y() += s.values[static_cast<Eigen::Index>(i)] * coefficients[space.scalar_size() + dofs[i]];
  }
  return u;
}

namespace {

// b = int g(t) . v over all velocity test functions.
Vector vector_load(const MiniSpace& space, const VectorField& g, double t, int degree) {
  const Mesh& mesh = space.mesh();
  const Eigen::Index n = space.scalar_size();
  const TriangleRule rule = triangle_rule(degree);
  Vector b = Vector::Zero(2 * n);
  for (std::size_t tri = 0; tri < mesh.num_triangles(); ++tri) {
    const TriangleMap map = triangle_map(mesh, tri);
    const auto dofs = space.cell_dofs(tri);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const MiniShapes s = mini_shapes(rule.points[q], map);
      const Eigen::Vector2d gv = g.value(t, map.to_physical(rule.points[q])) * (rule.weights[q] * std::abs(map.det));
      for (std::size_t i = 0; i < 4; ++i) {
        if (dofs[i] < 0) continue;
        b[dofs[i]] += s.values[static_cast<Eigen::Index>(i)] * gv.x();
        b[n + dofs[i]] += s.values[static_cast<Eigen::Index>(i)] * gv.y();
      }
    }
  }
  return b;
}

} // namespace

Vector velocity_l2_projection(const MiniSpace& space, const MiniOperators& ops, const VectorField& u,
                              double t) {
  return solve_spd(ops.mass, vector_load(space, u, t, kDataQuadratureDegree));
}

MiniSolution mini_transient_solve(std::shared_ptr<const MiniSpace> space, const TimePartition& partition,
                                  const VectorField& g, const VectorField& u0, int degree) {
  const MiniOperators ops = assemble_mini(*space);
  const Eigen::Index nv = space->velocity_dofs();
  const Eigen::Index np = space->pressure_dofs();
  SparseMatrix mean(np, 1);
  {
    TripletAccumulator acc;
    for (Eigen::Index i = 0; i < np; ++i) acc.add(i, 0, ops.pressure_mean[i]);
    mean = acc.build(np, 1);
  }
  const SparseMatrix mean_t = mean.transpose();
  const SparseMatrix div_t = ops.divergence.transpose();
  const double area = ops.pressure_mean.sum();
  const LineRule time_rule = gauss_legendre(3);

  MiniSolution sol{space, partition, velocity_l2_projection(*space, ops, u0, 0.0), {}, {}};
  std::optional<double> factored_step;
  std::optional<LuSolver> lu;
  Vector previous = sol.initial;
  for (std::size_t m = 0; m < partition.size(); ++m) {
    const double k = partition.step(m);
    try {
      if (factored_step != k) {
        BlockMatrix blocks({nv, np, 1}, {nv, np, 1});
        blocks.add(0, 0, 1.0, ops.mass);
        blocks.add(0, 0, k, ops.stiffness);
        blocks.add(0, 1, -k, div_t);
        blocks.add(1, 0, -k, ops.divergence);
        blocks.add(1, 2, 1.0, mean);
        blocks.add(2, 1, 1.0, mean_t);
        lu.emplace(blocks.assemble());
        factored_step = k;
      }
      Vector rhs = Vector::Zero(nv + np + 1);
      Vector load = ops.mass * previous;
      for (std::size_t q = 0; q < time_rule.size(); ++q) {
        load += k * time_rule.weights[q] * vector_load(*space, g, partition.time(m, time_rule.points[q]), degree);
      }
      rhs.head(nv) = load;
      const Vector x = lu->solve(rhs);
      Vector u = x.head(nv);
      Vector p = x.segment(nv, np);
      sol.max_divergence_residual = std::max(sol.max_divergence_residual, (ops.divergence * u).norm());
      sol.max_pressure_mean = std::max(sol.max_pressure_mean, std::abs(ops.pressure_mean.dot(p)) / area);
      previous = u;
      sol.velocity.push_back(std::move(u));
      sol.pressure.push_back(std::move(p));
    } catch (const SolverError& e) {
      throw SolverError("mini_transient_solve: step " + std::to_string(m + 1) + ": " + e.what(),
                        e.residual());
    }
  }
  return sol;
}

double velocity_error_l2(const MiniSolution& sol, const VectorField& u_exact, int time_points, int degree) {
  const MiniSpace& space = *sol.space;
  const Mesh& mesh = space.mesh();
  const Eigen::Index n = space.scalar_size();
  const TriangleRule rule = triangle_rule(degree);
  const LineRule time_rule = gauss_legendre(time_points);
  double sum = 0.0;
  for (std::size_t tri = 0; tri < mesh.num_triangles(); ++tri) {
    const TriangleMap map = triangle_map(mesh, tri);
    const auto dofs = space.cell_dofs(tri);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const MiniShapes s = mini_shapes(rule.points[q], map);
      const Point x = map.to_physical(rule.points[q]);
      const double wx = rule.weights[q] * std::abs(map.det);
      for (std::size_t m = 0; m < sol.partition.size(); ++m) {
        Eigen::Vector2d uh = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < 4; ++i) {
          if (dofs[i] < 0) continue;
          uh.x() += s.values[static_cast<Eigen::Index>(i)] * sol.velocity[m][dofs[i]];
          uh.y() += s.values[static_cast<Eigen::Index>(i)] * sol.velocity[m][n + dofs[i]];
        }
        for (std::size_t j = 0; j < time_rule.size(); ++j) {
          const double t = sol.partition.time(m, time_rule.points[j]);
          sum += wx * sol.partition.step(m) * time_rule.weights[j] * (u_exact.value(t, x) - uh).squaredNorm();
        }
      }
    }
  }
  return std::sqrt(sum);
}

} // namespace cipstokes
