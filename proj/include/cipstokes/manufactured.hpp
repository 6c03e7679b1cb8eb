#pragma once

#include "cipstokes/fields.hpp"

namespace cipstokes::manufactured {

/// Strength of the gradient perturbation in g_tilde.
inline constexpr double kPerturbationScale = 1e5;
inline constexpr double kPerturbationExponent = -0.49;

/// Phi(x) = sin(2 pi x1)^2 sin(2 pi x2)^2 (time independent, clamped on the
/// unit square).
[[nodiscard]] ScalarField phi();

/// Laplace(Phi) and Laplace^2(Phi), time independent.
[[nodiscard]] ScalarField laplacian_phi();
[[nodiscard]] ScalarField bilaplacian_phi();

/// psi(t, x) = sin(2 pi t) Phi(x).
[[nodiscard]] ScalarField psi();

/// u = Curl(psi) = sin(2 pi t) (d2 Phi, -d1 Phi).
[[nodiscard]] VectorField velocity();

/// g = d_t u - Laplace(u) (the pressure is zero).
[[nodiscard]] VectorField body_force();

/// g + 1e5 (x1^-0.49, 0). Evaluation at x1 <= 0 throws std::domain_error.
[[nodiscard]] VectorField perturbed_body_force();

/// The gradient field added in perturbed_body_force().
[[nodiscard]] VectorField gradient_perturbation();

/// f = -d_t Laplace(psi) + Laplace^2(psi), written out in closed form.
[[nodiscard]] ScalarField stream_rhs();

} // namespace cipstokes::manufactured
