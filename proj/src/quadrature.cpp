#include "cipstokes/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cipstokes {
namespace {

// Legendre P_n and P_{n-1} at x via the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

double bisect(auto&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace

LineRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  LineRule rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const auto [p, pm1] = legendre_pair(n, x);
      dp = n * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, pm1] = legendre_pair(n, x);
    dp = n * (x * p - pm1) / (x * x - 1.0);
    // map [-1,1] -> [0,1], ascending order
    const auto k = static_cast<std::size_t>(n - 1 - i);
    rule.points[k] = 0.5 * (x + 1.0);
    rule.weights[k] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

LineRule gauss_radau_right(int n) {
  if (n < 1) throw std::invalid_argument("gauss_radau_right: n must be >= 1");
  LineRule rule;
  rule.exactness_degree = 2 * n - 2;
  // Interior nodes on [-1,1] are the roots of P_{n-1} - P_n other than x = 1.
  auto q = [n](double x) {
    const auto [pn, pnm1] = legendre_pair(n, x);
    return (pnm1 - pn) / (1.0 - x);
  };
  std::vector<double> nodes;
  const int samples = 4000 * n;
  double prev_x = -1.0;
  double prev_q = q(prev_x);
  for (int s = 1; s <= samples && static_cast<int>(nodes.size()) < n - 1; ++s) {
    const double x = -1.0 + 2.0 * s / (samples + 1.0);
    const double qx = q(x);
    if ((qx < 0.0) != (prev_q < 0.0)) nodes.push_back(bisect(q, prev_x, x));
    prev_x = x;
    prev_q = qx;
  }
  if (static_cast<int>(nodes.size()) != n - 1) {
    throw std::runtime_error("gauss_radau_right: root isolation failed");
  }
  nodes.push_back(1.0);
  for (double x : nodes) rule.points.push_back(0.5 * (x + 1.0));

  // Weights integrate the Lagrange basis on the nodes; a Gauss rule with n
  // points is exact for those degree n-1 polynomials.
  const LineRule gauss = gauss_legendre(n);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    for (std::size_t q_ = 0; q_ < gauss.size(); ++q_) {
      double l = 1.0;
      for (std::size_t j = 0; j < rule.points.size(); ++j) {
        if (j != i) l *= (gauss.points[q_] - rule.points[j]) / (rule.points[i] - rule.points[j]);
      }
      rule.weights[i] += gauss.weights[q_] * l;
    }
  }
  return rule;
}

TriangleRule triangle_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("triangle_rule: negative degree");
  // The Duffy Jacobian adds one degree in the collapsed direction.
  const int n = std::max(1, (degree + 3) / 2);
  const LineRule g = gauss_legendre(n);
  TriangleRule rule;
  rule.exactness_degree = 2 * n - 2;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double u = g.points[i];
      const double v = g.points[j];
      rule.points.emplace_back(u, (1.0 - u) * v);
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return rule;
}

LineRule line_rule(int degree) { return gauss_legendre(std::max(1, (degree + 2) / 2)); }

} // namespace cipstokes
