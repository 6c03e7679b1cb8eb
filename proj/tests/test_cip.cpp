#include <gtest/gtest.h>

#include <random>

#include "cipstokes/cip.hpp"
#include "cipstokes/manufactured.hpp"
#include "support.hpp"

using namespace cipstokes;
using testsupport::p2_shape;
using testsupport::triangle_points;

namespace {

std::shared_ptr<const FeSpace> space_on(std::size_t n, int degree) {
  return build_space(std::make_shared<const Mesh>(build_structured_mesh(n)), degree);
}

struct EdgeData {
  Point a, b;
  Eigen::Vector2d normal;            // outward on the boundary
  std::vector<std::size_t> triangles; // plus side first for interior edges
};

// Edge list rebuilt from the vertex coordinates alone.
std::vector<EdgeData> oracle_edges(const Mesh& m) {
  std::vector<EdgeData> out;
  for (const auto& e : m.edges()) {
    EdgeData d;
    d.a = m.vertex(e[0]);
    d.b = m.vertex(e[1]);
    const Eigen::Vector2d tangent = d.b - d.a;
    d.normal = Eigen::Vector2d(tangent.y(), -tangent.x()).normalized();
    const Point mid = 0.5 * (d.a + d.b);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      const auto& tri = m.triangle(t);
      const bool has_a = tri[0] == e[0] || tri[1] == e[0] || tri[2] == e[0];
      const bool has_b = tri[0] == e[1] || tri[1] == e[1] || tri[2] == e[1];
      if (has_a && has_b) d.triangles.push_back(t);
    }
    auto centroid = [&](std::size_t t) {
      const auto p = triangle_points(m, t);
      return Point((p[0] + p[1] + p[2]) / 3.0);
    };
    if (d.triangles.size() == 1) {
      if (d.normal.dot(centroid(d.triangles[0]) - mid) > 0.0) d.normal = -d.normal;
    } else if (d.normal.dot(centroid(d.triangles[0]) - mid) < 0.0) {
      std::swap(d.triangles[0], d.triangles[1]);
    }
    out.push_back(d);
  }
  return out;
}

// Normal-derivative jump and normal-normal average of a piecewise function
// given per triangle by (gradient, hessian) evaluators.
template <class Eval>
std::pair<double, double> jump_average(const EdgeData& e, const Point& x, Eval eval) {
  if (e.triangles.size() == 1) {
    const auto [g, h] = eval(e.triangles[0], x);
    return {-g.dot(e.normal), e.normal.dot(h * e.normal)};
  }
  const auto [gp, hp] = eval(e.triangles[0], x);
  const auto [gm, hm] = eval(e.triangles[1], x);
  return {(gp - gm).dot(e.normal), 0.5 * (e.normal.dot(hp * e.normal) + e.normal.dot(hm * e.normal))};
}

// a_h(phi_i, phi_j) term by term with adaptive quadrature.
double oracle_entry(const FeSpace& s, double eta, Eigen::Index i, Eigen::Index j,
                    const std::vector<EdgeData>& edges) {
  const Mesh& m = s.mesh();
  const Point pi = s.dof_points()[static_cast<std::size_t>(i)];
  const Point pj = s.dof_points()[static_cast<std::size_t>(j)];
  double sum = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto v = triangle_points(m, t);
    sum += testsupport::integrate_triangle(
        [&](const Point& x) {
          return p2_shape(v, pi, x).hessian.cwiseProduct(p2_shape(v, pj, x).hessian).sum();
        },
        v[0], v[1], v[2]);
  }
  for (const auto& e : edges) {
    const double len = (e.b - e.a).norm();
    auto eval_for = [&](const Point& node) {
      return [&m, node](std::size_t t, const Point& x) {
        const auto p = p2_shape(triangle_points(m, t), node, x);
        return std::make_pair(p.gradient, p.hessian);
      };
    };
    sum += testsupport::integrate_segment(
        [&](const Point& x) {
          const auto [ji, ai] = jump_average(e, x, eval_for(pi));
          const auto [jj, aj] = jump_average(e, x, eval_for(pj));
          return ai * jj + ji * aj + eta / len * ji * jj;
        },
        e.a, e.b);
  }
  return sum;
}

} // namespace

TEST(Cip, MatchesBruteForceOracle) {
  for (std::size_t n : {1u, 2u}) {
    const auto s = space_on(n, 2);
    const double eta = default_penalty(2);
    const SparseMatrix a = assemble_cip_matrix(*s, eta);
    const auto edges = oracle_edges(s->mesh());
    const Eigen::MatrixXd dense(a);
    const double scale = dense.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < s->n_dofs(); ++i) {
      for (Eigen::Index j = i; j < s->n_dofs(); ++j) {
        EXPECT_NEAR(dense(i, j), oracle_entry(*s, eta, i, j, edges), 1e-11 * scale) << "n=" << n << " (" << i << ',' << j << ')';
      }
    }
  }
}

TEST(Cip, ExactlySymmetricAndNormalIndependent) {
  for (int l : {2, 3}) {
    auto mesh = std::make_shared<const Mesh>(build_structured_mesh(4));
    auto flipped = std::make_shared<const Mesh>(mesh->with_flipped_interior_normals());
    const SparseMatrix a = assemble_cip_matrix(*build_space(mesh, l), default_penalty(l));
    const SparseMatrix b = assemble_cip_matrix(*build_space(flipped, l), default_penalty(l));
    EXPECT_EQ(max_asymmetry(a), 0.0);
    const double scale = Eigen::MatrixXd(a).cwiseAbs().maxCoeff();
    EXPECT_LE(Eigen::MatrixXd(a - b).cwiseAbs().maxCoeff(), 1e-13 * scale);
  }
}

TEST(Cip, RejectsBadArguments) {
  EXPECT_THROW((void)assemble_cip(space_on(2, 1), 20.0), std::invalid_argument);
  EXPECT_THROW((void)assemble_cip(space_on(2, 2), 0.0), std::invalid_argument);
  EXPECT_THROW((void)assemble_cip(space_on(2, 2), -1.0), std::invalid_argument);
  EXPECT_EQ(default_penalty(2), 20.0);
  EXPECT_EQ(default_penalty(3), 40.0);
}

TEST(Cip, SmallPenaltyFailsCoercivity) {
  EXPECT_THROW((void)assemble_cip(space_on(16, 2), 0.1), CoercivityError);
}

TEST(Cip, TripleNormIsANorm) {
  const auto s = space_on(4, 2);
  const auto form = assemble_cip(s);
  std::mt19937_64 rng(3);
  EXPECT_EQ(triple_norm(*form, FeFunction(s)), 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = testsupport::random_interior(*s, rng);
    const double nv = triple_norm(*form, FeFunction(s, v));
    EXPECT_GT(nv, 0.0);
    if (trial < 5) EXPECT_NEAR(triple_norm(*form, FeFunction(s, 2.0 * v)), 2.0 * nv, 1e-12 * nv);
  }
}

TEST(Cip, ConsistencyPairingMatchesBruteForce) {
  const auto s = space_on(2, 2);
  const auto form = assemble_cip(s);
  const ScalarField phi = manufactured::phi();
  const Vector pairing = consistency_pairing(*form, phi, 0.0, 30);
  const Mesh& m = s->mesh();
  const auto edges = oracle_edges(m);
  for (Eigen::Index i = 0; i < s->n_dofs(); ++i) {
    const Point node = s->dof_points()[static_cast<std::size_t>(i)];
    double expected = 0.0;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      const auto v = triangle_points(m, t);
      expected += testsupport::integrate_triangle(
          [&](const Point& x) { return phi.hessian(0.0, x).cwiseProduct(p2_shape(v, node, x).hessian).sum(); },
          v[0], v[1], v[2]);
    }
    for (const auto& e : edges) {
      expected += testsupport::integrate_segment(
          [&](const Point& x) {
            const auto [jump, unused] = jump_average(e, x, [&](std::size_t t, const Point& y) {
              const auto p = p2_shape(triangle_points(m, t), node, y);
              return std::make_pair(p.gradient, p.hessian);
            });
            (void)unused;
            return e.normal.dot(phi.hessian(0.0, x) * e.normal) * jump;
          },
          e.a, e.b);
    }
    EXPECT_NEAR(pairing[i], expected, 1e-8 * std::max(1.0, std::abs(expected))) << "dof " << i;
  }
}

TEST(Cip, ConsistencyPairingIsLocal) {
  const auto s = space_on(8, 2);
  const auto form = assemble_cip(s);
  EXPECT_EQ(consistency_pairing(*form, zero_scalar_field()).norm(), 0.0);
  // Phi cut to the lower-left quarter has no overlap with the hat at (7/8, 7/8)
  const ScalarField phi = manufactured::phi();
  ScalarField cut = phi;
  auto inside = [](const Point& x) { return x.x() < 0.5 && x.y() < 0.5; };
  cut.hessian = [phi, inside](double t, const Point& x) {
    return inside(x) ? phi.hessian(t, x) : Eigen::Matrix2d::Zero().eval();
  };
  const Vector p = consistency_pairing(*form, cut);
  for (Eigen::Index i = 0; i < s->n_dofs(); ++i) {
    if ((s->dof_points()[static_cast<std::size_t>(i)] - Point(0.875, 0.875)).norm() < 1e-12) EXPECT_EQ(p[i], 0.0);
  }
}

TEST(Cip, RitzProjectionOrthogonalityAndIdempotence) {
  const auto s = space_on(8, 2);
  const auto form = assemble_cip(s);
  const ScalarField phi = manufactured::phi();
  const Vector rhs = consistency_pairing(*form, phi);
  const FeFunction r = ritz_projection(*form, phi);
  const Vector residual = s->interior().restrict(rhs - form->matrix() * r.coefficients);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector chi = s->interior().restrict(testsupport::random_interior(*s, rng));
    EXPECT_LE(std::abs(residual.dot(chi)), 1e-8 * rhs.norm() * chi.norm());
  }
  EXPECT_LT((solve_stationary(*form, rhs).coefficients - r.coefficients).norm(), 1e-12 * r.coefficients.norm());
  const Vector w = testsupport::random_interior(*s, rng);
  const FeFunction again = solve_stationary(*form, form->matrix() * w);
  EXPECT_LT((again.coefficients - w).norm(), 1e-9 * w.norm());
  EXPECT_EQ(ritz_projection(*form, zero_scalar_field()).coefficients.norm(), 0.0);
  EXPECT_EQ(solve_stationary(*form, Vector::Zero(s->n_dofs())).coefficients.norm(), 0.0);
}

TEST(Cip, DiscreteOperatorIsSelfAdjointAndStable) {
  const auto s = space_on(8, 2);
  const auto form = assemble_cip(s);
  const H1Projector h1(s);
  std::mt19937_64 rng(9);
  const FeFunction u(s, testsupport::random_interior(*s, rng));
  const FeFunction v(s, testsupport::random_interior(*s, rng));
  const SparseMatrix& k = h1.stiffness();
  const double lhs = apply_ah(*form, h1, u).coefficients.dot(k * v.coefficients);
  const double rhs = u.coefficients.dot(k * apply_ah(*form, h1, v).coefficients);
  EXPECT_NEAR(lhs, rhs, 1e-9 * std::abs(lhs));
  EXPECT_EQ(apply_ah(*form, h1, FeFunction(s)).coefficients.norm(), 0.0);

  // a_h(w, chi) = (grad Phi, grad chi) implies ||grad A_h w|| <= ||grad Phi||
  const ScalarField phi = manufactured::phi();
  auto grad = [&](const Point& x) { return phi.gradient(0.0, x); };
  const FeFunction w = solve_stationary(*form, assemble_gradient_load(*s, grad, 20));
  const Vector aw = apply_ah(*form, h1, w).coefficients;
  const double norm_aw = std::sqrt(aw.dot(k * aw));
  const double norm_g = std::sqrt(gradient_error_squared(*s, Vector::Zero(s->n_dofs()), grad, 20));
  EXPECT_LE(norm_aw, norm_g * (1.0 + 1e-8));
}

TEST(Cip, StationaryBiharmonicSolveConverges) {
  const ScalarField phi = manufactured::phi();
  const ScalarField bilap = manufactured::bilaplacian_phi();
  std::vector<double> errors;
  for (std::size_t n : {16u, 32u, 64u}) {
    const auto s = space_on(n, 2);
    const auto form = assemble_cip(s);
    const FeFunction u = solve_stationary(*form, assemble_load_scalar(*s, bilap, 0.0));
    errors.push_back(std::sqrt(
        gradient_error_squared(*s, u.coefficients, [&](const Point& x) { return phi.gradient(0.0, x); })));
  }
  EXPECT_LT(errors[1], errors[0]);
  EXPECT_GT(errors[1] / errors[2], 3.0);
}
