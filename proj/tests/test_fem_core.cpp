#include <gtest/gtest.h>

#include <random>

#include "cipstokes/fe_space.hpp"
#include "cipstokes/manufactured.hpp"
#include "support.hpp"

using namespace cipstokes;

namespace {

std::shared_ptr<const FeSpace> space_on(std::size_t n, int degree) {
  return build_space(std::make_shared<const Mesh>(build_structured_mesh(n)), degree);
}

// u = x^2 + x y, with gradient (2x + y, x).
ScalarField quadratic() {
  ScalarField f;
  f.value = [](double, const Point& x) { return x.x() * x.x() + x.x() * x.y(); };
  f.gradient = [](double, const Point& x) { return Eigen::Vector2d(2 * x.x() + x.y(), x.x()); };
  return f;
}

} // namespace

TEST(FeSpace, DofCounts) {
  const auto p2 = space_on(2, 2);
  EXPECT_EQ(p2->n_dofs(), 9 + 16);
  EXPECT_EQ(p2->boundary_dofs().size(), 16u);
  const auto p3 = space_on(2, 3);
  EXPECT_EQ(p3->n_dofs(), 9 + 2 * 16 + 8);
  EXPECT_EQ(p3->boundary_dofs().size(), 24u);
  EXPECT_EQ(p2->interior().size(), p2->n_dofs() - 16);
  EXPECT_THROW(space_on(2, 4), std::invalid_argument);
}

TEST(FeSpace, SharedDofsHaveOnePoint) {
  const auto s = space_on(3, 3);
  const Mesh& m = s->mesh();
  const LagrangeBasis& b = s->basis();
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const TriangleMap map = triangle_map(m, t);
    const auto dofs = s->cell_dofs(t);
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      EXPECT_LT((map.to_physical(b.nodes()[i]) - s->dof_points()[static_cast<std::size_t>(dofs[i])]).norm(), 1e-14);
    }
  }
  for (auto d : s->boundary_dofs()) {
    const Point& p = s->dof_points()[static_cast<std::size_t>(d)];
    EXPECT_TRUE(p.x() < 1e-14 || p.y() < 1e-14 || p.x() > 1 - 1e-14 || p.y() > 1 - 1e-14);
  }
}

TEST(FemCore, StiffnessReproducesQuadraticEnergy) {
  // int |grad(x^2 + x y)|^2 over the unit square = 3
  const auto s = space_on(3, 2);
  const Vector u = interpolate(*s, quadratic(), 0.0);
  const SparseMatrix k = assemble_h1_stiffness(*s);
  EXPECT_NEAR(u.dot(k * u), 3.0, 1e-12);
  EXPECT_NEAR((k * Vector::Ones(s->n_dofs())).norm(), 0.0, 1e-12);
  EXPECT_EQ(max_asymmetry(k), 0.0);
}

TEST(FemCore, MassAndScalarLoad) {
  const auto s = space_on(3, 3);
  const Vector one = Vector::Ones(s->n_dofs());
  EXPECT_NEAR(one.dot(assemble_mass(*s) * one), 1.0, 1e-13);
  ScalarField f;
  f.value = [](double, const Point&) { return 1.0; };
  EXPECT_NEAR(assemble_load_scalar(*s, f, 0.0).sum(), 1.0, 1e-13);
}

TEST(FemCore, GradientLoadEqualsStiffnessOnDiscreteFunctions) {
  const auto s = space_on(4, 2);
  const ScalarField u = quadratic();
  const Vector b = assemble_gradient_load(*s, [&](const Point& x) { return u.gradient(0.0, x); });
  const Vector ku = assemble_h1_stiffness(*s) * interpolate(*s, u, 0.0);
  EXPECT_LT((b - ku).norm(), 1e-12);
}

TEST(FemCore, DualLoadMatchesScalarLoadOfNegativeCurl) {
  // <g, Curl phi> = <-curl g, phi> for phi vanishing on the boundary.
  const auto s = space_on(2, 2);
  const VectorField g = manufactured::body_force();
  const Vector dual = assemble_load_dual(*s, g, 0.3, 24);
  const Vector scalar = assemble_load_scalar(*s, negative_curl(g), 0.3, 24);
  const Vector a = s->interior().restrict(dual);
  const Vector b = s->interior().restrict(scalar);
  EXPECT_LT((a - b).norm(), 1e-9 * b.norm());
}

TEST(FemCore, InterpolationAndEvaluation) {
  const auto s = space_on(3, 2);
  const ScalarField u = quadratic();
  const FeFunction f(s, interpolate(*s, u, 0.0));
  for (const Point x : {Point(0.1, 0.2), Point(0.77, 0.4), Point(1.0, 1.0)}) {
    const auto e = f.evaluate(x);
    EXPECT_NEAR(e.value, u.value(0.0, x), 1e-13);
    EXPECT_LT((e.gradient - u.gradient(0.0, x)).norm(), 1e-12);
  }
  EXPECT_THROW((void)f.evaluate(Point(2.0, 0.0)), std::out_of_range);
  EXPECT_NEAR(gradient_error_squared(*s, f.coefficients, [&](const Point& x) { return u.gradient(0.0, x); }), 0.0,
              1e-24);
}

TEST(FemCore, H1ProjectionIsOrthogonalAndIdempotent) {
  const auto s = space_on(4, 2);
  const H1Projector proj(s);
  const ScalarField phi = manufactured::phi();
  const FeFunction p = proj.project(phi, 0.0);
  for (auto d : s->boundary_dofs()) EXPECT_EQ(p.coefficients[d], 0.0);
  // (grad(phi - Pi phi), grad v) = 0 for all v in V_h
  const Vector r = assemble_gradient_load(*s, [&](const Point& x) { return phi.gradient(0.0, x); }) -
                   proj.stiffness() * p.coefficients;
  EXPECT_LT(s->interior().restrict(r).norm(), 1e-10 * p.coefficients.norm());
  const FeFunction again = proj.project(p);
  EXPECT_LT((again.coefficients - p.coefficients).norm(), 1e-9 * p.coefficients.norm());
}

TEST(FemCore, H1ProjectionConvergesAtOrderL) {
  const ScalarField phi = manufactured::phi();
  for (int l : {2, 3}) {
    double prev = 0.0;
    for (std::size_t n : {16u, 32u}) {
      const auto s = space_on(n, l);
      const FeFunction p = h1_projection(s, phi);
      const double e = std::sqrt(
          gradient_error_squared(*s, p.coefficients, [&](const Point& x) { return phi.gradient(0.0, x); }));
      if (prev > 0.0) EXPECT_NEAR(std::log2(prev / e), l, 0.1) << "l=" << l;
      prev = e;
    }
  }
}

TEST(FemCore, EliminatedStiffnessSolveMeetsResidualContract) {
  const auto s = space_on(4, 2);
  ScalarField f;
  f.value = [](double, const Point&) { return 1.0; };
  const SparseMatrix k = s->interior().restrict(assemble_h1_stiffness(*s));
  const Vector b = s->interior().restrict(assemble_load_scalar(*s, f, 0.0));
  EXPECT_LE(relative_residual(k, solve_spd(k, b), b), 1e-10);
}

TEST(FemCore, TriangleMapRoundTrip) {
  const Mesh m = build_structured_mesh(3);
  const TriangleMap map = triangle_map(m, 5);
  const Eigen::Vector2d xi(0.2, 0.3);
  EXPECT_LT((map.to_reference(map.to_physical(xi)) - xi).norm(), 1e-14);
  EXPECT_NEAR(std::abs(map.det), 2.0 * m.signed_area(5), 1e-15);
}
