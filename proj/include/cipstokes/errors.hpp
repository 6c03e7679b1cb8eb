#pragma once

#include <stdexcept>
#include <string>

namespace cipstokes {

/// Base class for numerical failures raised by the library. Plain argument
/// validation uses std::invalid_argument / std::out_of_range instead.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A linear solve did not reach the requested relative residual.
class SolverError : public Error {
public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  [[nodiscard]] double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// The interior-penalty form is not positive definite on V_h, which means
/// the penalty parameter is too small for the mesh and degree.
class CoercivityError : public Error {
public:
  using Error::Error;
};

} // namespace cipstokes
