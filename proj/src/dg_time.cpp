#include "cipstokes/dg_time.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace cipstokes {

TimePartition::TimePartition(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw std::invalid_argument("TimePartition: need at least one interval");
  if (nodes_.front() != 0.0) throw std::invalid_argument("TimePartition: first node must be 0");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("TimePartition: nodes must be strictly increasing");
    }
  }
}

double TimePartition::max_step() const {
  double k = 0.0;
  for (std::size_t m = 0; m < size(); ++m) k = std::max(k, step(m));
  return k;
}

TimePartition make_partition(std::size_t intervals, double end_time) {
  if (intervals == 0) throw std::invalid_argument("make_partition: M must be >= 1");
  if (!(end_time > 0.0)) throw std::invalid_argument("make_partition: T must be positive");
  std::vector<double> nodes(intervals + 1);
  for (std::size_t m = 0; m <= intervals; ++m) {
    nodes[m] = end_time * static_cast<double>(m) / static_cast<double>(intervals);
  }
  nodes.back() = end_time;
  return TimePartition(std::move(nodes));
}

SpatialOperators make_operators(std::shared_ptr<const Mesh> mesh, int degree, double penalty) {
  SpatialOperators ops;
  ops.space = build_space(std::move(mesh), degree);
  ops.h1 = std::make_shared<const H1Projector>(ops.space);
  ops.cip = assemble_cip(ops.space, penalty);
  return ops;
}

Vector DgSolution::value(std::size_t m, double tau) const {
  const TimeBasis basis(order);
  Vector v = Vector::Zero(space->n_dofs());
  for (int i = 0; i <= order; ++i) v += basis.value(i, tau) * coefficients[m][static_cast<std::size_t>(i)];
  return v;
}

Vector DgSolution::time_derivative(std::size_t m, double tau) const {
  const TimeBasis basis(order);
  Vector v = Vector::Zero(space->n_dofs());
  for (int i = 0; i <= order; ++i) {
    v += basis.derivative(i, tau) * coefficients[m][static_cast<std::size_t>(i)];
  }
  return v / partition.step(m);
}

Vector DgSolution::jump(std::size_t m) const {
  return left_limit(m) - (m == 0 ? initial : right_limit(m - 1));
}

DgSolution zero_solution(std::shared_ptr<const FeSpace> space, const TimePartition& partition,
                         int order) {
  const Vector zero = Vector::Zero(space->n_dofs());
  DgSolution sol{space, partition, order, {}, zero};
  sol.coefficients.assign(partition.size(), std::vector<Vector>(static_cast<std::size_t>(order + 1), zero));
  return sol;
}

LoadProvider scalar_load(std::shared_ptr<const FeSpace> space, ScalarField f, int degree) {
  return [space = std::move(space), f = std::move(f), degree](double t) {
    return assemble_load_scalar(*space, f, t, degree);
  };
}

LoadProvider zero_load(std::shared_ptr<const FeSpace> space) {
  return [n = space->n_dofs()](double) { return Vector::Zero(n).eval(); };
}

std::vector<std::vector<Vector>> dg_sweep(const SparseMatrix& gram, const SparseMatrix& elliptic,
                                          const TimePartition& partition, int order,
                                          const LoadProvider& load, const Vector& initial) {
  if (order < 0) throw std::invalid_argument("dg_sweep: order must be >= 0");
  const Eigen::Index n = gram.rows();
  if (elliptic.rows() != n || initial.size() != n) {
    throw std::invalid_argument("dg_sweep: operator sizes do not match");
  }
  const TimeBasis basis(order);
  const int nb = basis.size();
  const LineRule load_rule = gauss_legendre(load_time_points(order));

  std::optional<double> factored_step;
  std::optional<SpdSolver> spd;
  std::optional<LuSolver> lu;
  SparseMatrix system;

  std::vector<std::vector<Vector>> out(partition.size());
  Vector previous = initial;
  for (std::size_t m = 0; m < partition.size(); ++m) {
    const double k = partition.step(m);
    try {
      if (factored_step != k) {
        BlockMatrix blocks(std::vector<Eigen::Index>(static_cast<std::size_t>(nb), n),
                           std::vector<Eigen::Index>(static_cast<std::size_t>(nb), n));
        for (int j = 0; j < nb; ++j) {
          for (int i = 0; i < nb; ++i) {
            const auto bj = static_cast<std::size_t>(j);
            const auto bi = static_cast<std::size_t>(i);
            blocks.add(bj, bi, basis.derivative_matrix()(j, i) + basis.left_values()[j] * basis.left_values()[i], gram);
            blocks.add(bj, bi, k * basis.mass_matrix()(j, i), elliptic);
          }
        }
        system = blocks.assemble();
        spd.reset();
        lu.reset();
        if (order == 0) {
          spd.emplace(system);
        } else {
          lu.emplace(system);
        }
        factored_step = k;
      }

      Vector rhs = Vector::Zero(n * nb);
      const Vector carried = gram * previous;
      for (std::size_t q = 0; q < load_rule.size(); ++q) {
        const double tau = load_rule.points[q];
        const Vector b = load(partition.time(m, tau));
        if (b.size() != n) throw std::invalid_argument("dg_sweep: load has the wrong size");
        for (int j = 0; j < nb; ++j) rhs.segment(j * n, n) += (k * load_rule.weights[q] * basis.value(j, tau)) * b;
      }
      for (int j = 0; j < nb; ++j) rhs.segment(j * n, n) += basis.left_values()[j] * carried;

      const Vector x = spd ? spd->solve(rhs) : lu->solve(rhs);
      out[m].reserve(static_cast<std::size_t>(nb));
      for (int i = 0; i < nb; ++i) out[m].push_back(x.segment(i * n, n));
      previous = out[m].back();
    } catch (const SolverError& e) {
      throw SolverError("dg_solve: interval " + std::to_string(m + 1) + ": " + e.what(), e.residual());
    }
  }
  return out;
}

namespace {

DgSolution dg_solve_projected(const SpatialOperators& ops, const TimePartition& partition, int order,
                              const LoadProvider& load, Vector initial) {
  const DofSubset& inner = ops.space->interior();
  const SparseMatrix gram = inner.restrict(ops.stiffness());
  const LoadProvider reduced = [&](double t) { return inner.restrict(load(t)); };
  auto blocks = dg_sweep(gram, ops.cip->reduced(), partition, order, reduced, inner.restrict(initial));
  DgSolution sol{ops.space, partition, order, {}, std::move(initial)};
  sol.coefficients.resize(blocks.size());
  for (std::size_t m = 0; m < blocks.size(); ++m) {
    for (auto& b : blocks[m]) sol.coefficients[m].push_back(inner.extend(b));
  }
  return sol;
}

} // namespace

DgSolution dg_solve(const SpatialOperators& ops, const TimePartition& partition, int order,
                    const LoadProvider& load, const ScalarField& psi0) {
  return dg_solve_projected(ops, partition, order, load, ops.h1->project(psi0, 0.0).coefficients);
}

DgSolution dg_solve(const SpatialOperators& ops, const TimePartition& partition, int order,
                    const LoadProvider& load, const FeFunction& psi0) {
  return dg_solve_projected(ops, partition, order, load, ops.h1->project(psi0).coefficients);
}

double space_time_h1_error(const DgSolution& sol, const ScalarField& psi, int time_points, int degree) {
  if (!psi.gradient) throw std::logic_error("space_time_h1_error: field has no gradient routine");
  const LineRule rule = gauss_legendre(time_points > 0 ? time_points : error_time_points(sol.order));
  double sum = 0.0;
  for (std::size_t m = 0; m < sol.partition.size(); ++m) {
    const double k = sol.partition.step(m);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = sol.partition.time(m, rule.points[q]);
      sum += k * rule.weights[q] *
             gradient_error_squared(*sol.space, sol.value(m, rule.points[q]),
                                    [&](const Point& x) { return psi.gradient(t, x); }, degree);
    }
  }
  return std::sqrt(sum);
}

std::vector<Eigen::VectorXd> time_projection(const TimePartition& partition, int order,
                                             const std::function<double(double)>& v) {
  const TimeBasis basis(order);
  const TimeProjection proj(basis, gauss_legendre(error_time_points(order)));
  std::vector<Eigen::VectorXd> out;
  out.reserve(partition.size());
  const auto ns = static_cast<Eigen::Index>(proj.samples().size());
  for (std::size_t m = 0; m < partition.size(); ++m) {
    Eigen::VectorXd samples(ns + 1);
    for (Eigen::Index s = 0; s < ns; ++s) {
      samples[s] = v(partition.time(m, proj.samples().points[static_cast<std::size_t>(s)]));
    }
    samples[ns] = v(partition.end(m));
    out.push_back(proj.weights() * samples);
  }
  return out;
}

StabilityTerms stability_functional(const DgSolution& sol, const SpatialOperators& ops) {
  const TimeBasis basis(sol.order);
  const SparseMatrix& gram = ops.stiffness();
  const int nb = basis.size();
  StabilityTerms s;
  for (std::size_t m = 0; m < sol.partition.size(); ++m) {
    const double k = sol.partition.step(m);
    const auto& u = sol.coefficients[m];
    std::vector<Vector> ku;
    std::vector<Vector> w;
    std::vector<Vector> kw;
    for (int i = 0; i < nb; ++i) {
      const auto& ui = u[static_cast<std::size_t>(i)];
      ku.push_back(gram * ui);
      w.push_back(ops.h1->solve(ops.biharmonic() * ui));
      kw.push_back(gram * w.back());
    }
    for (int j = 0; j < nb; ++j) {
      for (int i = 0; i < nb; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        s.derivative += basis.derivative_mass_matrix()(j, i) / k * u[uj].dot(ku[ui]);
        s.operator_term += k * basis.mass_matrix()(j, i) * w[uj].dot(kw[ui]);
      }
    }
    const Vector jump = sol.jump(m);
    s.jumps += jump.dot(gram * jump) / k;
  }
  return s;
}

double stability_data_norm_squared(const SpatialOperators& ops, const TimePartition& partition,
                                   int order, const LoadProvider& load, const Vector& initial) {
  double sum = initial.dot(ops.biharmonic() * initial);
  const LineRule rule = gauss_legendre(load_time_points(order));
  for (std::size_t m = 0; m < partition.size(); ++m) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vector g = ops.h1->solve(load(partition.time(m, rule.points[q])));
      sum += partition.step(m) * rule.weights[q] * g.dot(ops.stiffness() * g);
    }
  }
  return sum;
}

double ritz_error_squared(const ScalarField& psi, const SpatialOperators& ops, double t,
                          bool use_separable) {
  if (use_separable && psi.separable) {
    const auto& sep = *psi.separable;
    const double sigma = sep.temporal(t);
    return sigma * sigma * ritz_error_squared(*sep.spatial, ops, 0.0, false);
  }
  const FeFunction r = ritz_projection(*ops.cip, psi, t);
  return gradient_error_squared(*ops.space, r.coefficients,
                                [&](const Point& x) { return psi.gradient(t, x); });
}

double time_projection_error(const ScalarField& psi, const FeSpace& space,
                             const TimePartition& partition, int order) {
  if (!psi.gradient) throw std::logic_error("time_projection_error: field has no gradient routine");
  const TimeBasis basis(order);
  const LineRule rule = gauss_legendre(error_time_points(order));
  const TimeProjection proj(basis, rule);
  const auto ns = static_cast<Eigen::Index>(rule.size());
  // values of pi_k v at the rule points from [samples..., v(1)]
  Eigen::MatrixXd at_points(ns, basis.size());
  for (Eigen::Index q = 0; q < ns; ++q) at_points.row(q) = basis.values(rule.points[static_cast<std::size_t>(q)]).transpose();
  const Eigen::MatrixXd eval = at_points * proj.weights();

  const TriangleRule tri_rule = triangle_rule(kDataQuadratureDegree);
  const Mesh& mesh = space.mesh();
  Eigen::MatrixX2d samples(ns + 1, 2);
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleMap map = triangle_map(mesh, t);
    for (std::size_t p = 0; p < tri_rule.size(); ++p) {
      const Point x = map.to_physical(tri_rule.points[p]);
      const double wx = tri_rule.weights[p] * std::abs(map.det);
      for (std::size_t m = 0; m < partition.size(); ++m) {
        for (Eigen::Index q = 0; q < ns; ++q) {
          samples.row(q) = psi.gradient(partition.time(m, rule.points[static_cast<std::size_t>(q)]), x).transpose();
        }
        samples.row(ns) = psi.gradient(partition.end(m), x).transpose();
        const Eigen::MatrixX2d diff = eval * samples - samples.topRows(ns);
        for (Eigen::Index q = 0; q < ns; ++q) {
          sum += wx * partition.step(m) * rule.weights[static_cast<std::size_t>(q)] * diff.row(q).squaredNorm();
        }
      }
    }
  }
  return std::sqrt(sum);
}

DgSolution projected_time_interpolant(const ScalarField& psi, const SpatialOperators& ops,
                                      const TimePartition& partition, int order) {
  const TimeBasis basis(order);
  const TimeProjection proj(basis, gauss_legendre(error_time_points(order)));
  std::optional<Vector> spatial;
  if (psi.separable) spatial = ops.h1->project(*psi.separable->spatial, 0.0).coefficients;
  auto projected = [&](double t) -> Vector {
    if (spatial) return psi.separable->temporal(t) * *spatial;
    return ops.h1->project(psi, t).coefficients;
  };

  DgSolution chi = zero_solution(ops.space, partition, order);
  chi.initial = projected(0.0);
  const auto ns = proj.samples().size();
  for (std::size_t m = 0; m < partition.size(); ++m) {
    std::vector<Vector> samples;
    for (std::size_t s = 0; s < ns; ++s) samples.push_back(projected(partition.time(m, proj.samples().points[s])));
    samples.push_back(projected(partition.end(m)));
    for (int i = 0; i < basis.size(); ++i) {
      auto& c = chi.coefficients[m][static_cast<std::size_t>(i)];
      for (std::size_t s = 0; s <= ns; ++s) c += proj.weights()(i, static_cast<Eigen::Index>(s)) * samples[s];
    }
  }
  return chi;
}

BestApproximation best_approx_terms(const ScalarField& psi, const SpatialOperators& ops,
                                    const TimePartition& partition, int order) {
  BestApproximation out;
  out.time = time_projection_error(psi, *ops.space, partition, order);
  out.chi = space_time_h1_error(projected_time_interpolant(psi, ops, partition, order), psi);

  const LineRule rule = gauss_legendre(error_time_points(order));
  std::optional<double> spatial_ritz;
  if (psi.separable) spatial_ritz = ritz_error_squared(*psi.separable->spatial, ops, 0.0, false);
  double sum = 0.0;
  for (std::size_t m = 0; m < partition.size(); ++m) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = partition.time(m, rule.points[q]);
      double e2 = 0.0;
      if (spatial_ritz) {
        const double sigma = psi.separable->temporal(t);
        e2 = sigma * sigma * *spatial_ritz;
      } else {
        e2 = ritz_error_squared(psi, ops, t, false);
      }
      sum += partition.step(m) * rule.weights[q] * e2;
    }
  }
  out.ritz = std::sqrt(sum);
  return out;
}

namespace {

void check_compatible(const DgSolution& u, const DgSolution& v) {
  if (u.order != v.order || u.partition.nodes() != v.partition.nodes() ||
      u.space->n_dofs() != v.space->n_dofs()) {
    throw std::invalid_argument("bilinear_form: arguments live on different spaces");
  }
}

} // namespace

double bilinear_form(const DgSolution& u, const DgSolution& v, const SparseMatrix& gram,
                     const SparseMatrix& elliptic) {
  check_compatible(u, v);
  const TimeBasis basis(u.order);
  const int nb = basis.size();
  double b = 0.0;
  for (std::size_t m = 0; m < u.partition.size(); ++m) {
    const double k = u.partition.step(m);
    for (int j = 0; j < nb; ++j) {
      const auto& vj = v.coefficients[m][static_cast<std::size_t>(j)];
      const Vector kv = gram * vj;
      const Vector av = elliptic * vj;
      for (int i = 0; i < nb; ++i) {
        const auto& ui = u.coefficients[m][static_cast<std::size_t>(i)];
        b += basis.derivative_matrix()(j, i) * ui.dot(kv) + k * basis.mass_matrix()(j, i) * ui.dot(av);
      }
    }
    const Vector u_jump = m == 0 ? u.left_limit(0) : Vector(u.left_limit(m) - u.right_limit(m - 1));
    b += u_jump.dot(gram * v.left_limit(m));
  }
  return b;
}

double bilinear_form_dual(const DgSolution& u, const DgSolution& v, const SparseMatrix& gram,
                          const SparseMatrix& elliptic) {
  check_compatible(u, v);
  const TimeBasis basis(u.order);
  const int nb = basis.size();
  const std::size_t intervals = u.partition.size();
  double b = 0.0;
  for (std::size_t m = 0; m < intervals; ++m) {
    const double k = u.partition.step(m);
    for (int j = 0; j < nb; ++j) {
      const auto& vj = v.coefficients[m][static_cast<std::size_t>(j)];
      const Vector kv = gram * vj;
      const Vector av = elliptic * vj;
      for (int i = 0; i < nb; ++i) {
        const auto& ui = u.coefficients[m][static_cast<std::size_t>(i)];
        b += -basis.derivative_matrix()(i, j) * ui.dot(kv) + k * basis.mass_matrix()(j, i) * ui.dot(av);
      }
    }
    if (m + 1 < intervals) {
      const Vector v_jump = v.left_limit(m + 1) - v.right_limit(m);
      b -= u.right_limit(m).dot(gram * v_jump);
    }
  }
  b += u.right_limit(intervals - 1).dot(gram * v.right_limit(intervals - 1));
  return b;
}

OrthogonalityResidual galerkin_orthogonality(const DgSolution& discrete, const ScalarField& psi,
                                             const SpatialOperators& ops, const DgSolution& test,
                                             int degree) {
  if (!psi.time_derivative_gradient || !psi.gradient) {
    throw std::logic_error("galerkin_orthogonality: field needs gradient and d_t gradient");
  }
  check_compatible(discrete, test);
  const TimeBasis basis(discrete.order);
  const LineRule rule = gauss_legendre(load_time_points(discrete.order));
  const FeSpace& space = *ops.space;

  double exact = 0.0;
  double functional_norm2 = 0.0;
  double test_norm2 = 0.0;
  for (std::size_t m = 0; m < discrete.partition.size(); ++m) {
    const double k = discrete.partition.step(m);
    std::vector<Vector> functional(static_cast<std::size_t>(basis.size()), Vector::Zero(space.n_dofs()));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = discrete.partition.time(m, rule.points[q]);
      const Vector p =
          assemble_gradient_load(space, [&](const Point& x) { return psi.time_derivative_gradient(t, x); }, degree) +
          consistency_pairing(*ops.cip, psi, t, degree);
      for (int j = 0; j < basis.size(); ++j) {
        functional[static_cast<std::size_t>(j)] += (k * rule.weights[q] * basis.value(j, rule.points[q])) * p;
      }
    }
    if (m == 0) {
      const Vector p0 =
          assemble_gradient_load(space, [&](const Point& x) { return psi.gradient(0.0, x); }, degree);
      for (int j = 0; j < basis.size(); ++j) functional[static_cast<std::size_t>(j)] += basis.left_values()[j] * p0;
    }
    for (int j = 0; j < basis.size(); ++j) {
      const auto& f = functional[static_cast<std::size_t>(j)];
      const auto& vj = test.coefficients[m][static_cast<std::size_t>(j)];
      exact += f.dot(vj);
      functional_norm2 += f.squaredNorm();
      test_norm2 += vj.squaredNorm();
    }
  }
  const double discrete_value = bilinear_form(discrete, test, ops.stiffness(), ops.biharmonic());
  return {exact - discrete_value, std::sqrt(functional_norm2 * test_norm2)};
}

JumpIdentity jump_identity(double minus, double plus) {
  const double jump = plus - minus;
  return {jump * plus, 0.5 * plus * plus + 0.5 * jump * jump - 0.5 * minus * minus};
}

JumpIdentity jump_identity(const SparseMatrix& gram, const Vector& minus, const Vector& plus) {
  const Vector jump = plus - minus;
  const Vector kp = gram * plus;
  return {jump.dot(kp),
          0.5 * plus.dot(kp) + 0.5 * jump.dot(gram * jump) - 0.5 * minus.dot(gram * minus)};
}

std::vector<double> right_limit_energies(const DgSolution& sol, const SparseMatrix& gram) {
  std::vector<double> out;
  out.push_back(std::sqrt(sol.initial.dot(gram * sol.initial)));
  for (std::size_t m = 0; m < sol.partition.size(); ++m) {
    const Vector& u = sol.right_limit(m);
    out.push_back(std::sqrt(u.dot(gram * u)));
  }
  return out;
}

} // namespace cipstokes
