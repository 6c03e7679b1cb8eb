#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cipstokes/dg_time.hpp"
#include "cipstokes/fields.hpp"

namespace cipstokes {

enum class Method { streamfct, mini };
/// zero is a diagnostics-only choice: zero data, zero exact solution.
enum class RhsKind { g, g_tilde, f_scalar, zero };

[[nodiscard]] Method parse_method(const std::string& s);
[[nodiscard]] RhsKind parse_rhs(const std::string& s);
[[nodiscard]] std::string to_string(Method m);
[[nodiscard]] std::string to_string(RhsKind r);

struct StudyConfig {
  Method method = Method::streamfct;
  int degree = 2;
  int dg_order = 0;
  std::optional<double> eta; ///< default_penalty(degree) when unset
  std::vector<std::size_t> meshes;
  std::vector<std::size_t> steps;
  RhsKind rhs = RhsKind::g;
  std::string out;
  bool assert_checks = false;
  double end_time = 1.0;

  [[nodiscard]] double penalty() const;
  /// Throws std::invalid_argument on zero sizes, bad degrees or a method/rhs
  /// mismatch. Empty lists are allowed; each study picks its own default.
  void validate() const;
};

/// Applies "key = value" lines (keys as the CLI flags without dashes;
/// '#' starts a comment). Unknown keys throw std::invalid_argument.
void apply_config(StudyConfig& cfg, std::istream& in);
void apply_config_file(StudyConfig& cfg, const std::string& path);

/// Parses "4,8,16".
[[nodiscard]] std::vector<std::size_t> parse_size_list(const std::string& s);

/// Stream-function data for the chosen right-hand side.
[[nodiscard]] ScalarField stream_source(RhsKind rhs);
[[nodiscard]] ScalarField stream_exact(RhsKind rhs);
/// Body force and exact velocity for the MINI solver (g, g_tilde or zero).
[[nodiscard]] VectorField mini_source(RhsKind rhs);
[[nodiscard]] VectorField mini_exact(RhsKind rhs);

/// Error of one run on an n x n mesh with M steps: grad-psi space-time error
/// for streamfct, velocity L2 space-time error for mini.
[[nodiscard]] double run_error(const StudyConfig& cfg, std::size_t n, std::size_t steps);

struct ConvergenceRow {
  double x = 0.0;
  double error = 0.0;
};

struct ConvergenceResult {
  std::string study; ///< "converge-k", "converge-h" or "stationary"
  std::string axis;  ///< "k" or "h"
  std::vector<ConvergenceRow> rows;
  double rate = 0.0;
};

/// Least-squares slope of log(error) against log(x) over the last three rows
/// (all rows if fewer).
[[nodiscard]] double fitted_rate(const std::vector<ConvergenceRow>& rows);

/// Fixed n = meshes.back() (64 if empty); one row per M, k = T/M.
[[nodiscard]] ConvergenceResult converge_k(const StudyConfig& cfg);
/// Fixed M = steps.back() (256 if empty); one row per n, h = sqrt(2)/n.
[[nodiscard]] ConvergenceResult converge_h(const StudyConfig& cfg);
/// ||grad(Phi - R_h Phi)|| per n; the time data in cfg is unused.
[[nodiscard]] ConvergenceResult stationary(const StudyConfig& cfg);

/// "%.12g" formatting used for every number written by the studies.
[[nodiscard]] std::string format_number(double v);
void write_csv(std::ostream& os, const ConvergenceResult& result);

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct Report {
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> values;

  [[nodiscard]] bool passed() const;
};

void write_report(std::ostream& os, const Report& report);
/// Config as key=value lines followed by the report.
void write_summary(std::ostream& os, const StudyConfig& cfg, const Report& report);

/// Expected band for a fitted rate, if the configuration has one.
[[nodiscard]] std::optional<std::pair<double, double>> expected_rate(const StudyConfig& cfg,
                                                                     const std::string& study);
/// Summary for a convergence study: config, fitted rate and rate check.
[[nodiscard]] Report summarize(const StudyConfig& cfg, const ConvergenceResult& result);

/// Triangle rule degree for load and consistency terms in the orthogonality
/// check; high enough that quadrature error sits below the tolerance.
inline constexpr int kOrthogonalityQuadratureDegree = 20;

/// Single (n = meshes.back(), M = steps.back(), r) run of the stream-function
/// method: stability functional, error decomposition and Galerkin
/// orthogonality. Throws CoercivityError for a penalty that is too small.
[[nodiscard]] Report diagnostics(const StudyConfig& cfg);

struct ComparisonRow {
  double h = 0.0;
  double stream_g = 0.0;
  double stream_g_tilde = 0.0;
  double mini_g = 0.0;
  double mini_g_tilde = 0.0;
};

/// Both methods under g and g_tilde for each n, M = steps.back() (256 if
/// empty).
[[nodiscard]] std::vector<ComparisonRow> compare_mini(const StudyConfig& cfg);
void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows);
/// Stream-function columns identical to 1e-12 and MINI ratio >= 10 on the
/// finest row.
[[nodiscard]] Report summarize_comparison(const std::vector<ComparisonRow>& rows);

} // namespace cipstokes
