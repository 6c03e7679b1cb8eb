#include "cipstokes/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cipstokes/cip.hpp"
#include "cipstokes/manufactured.hpp"
#include "cipstokes/mini_stokes.hpp"

namespace cipstokes {

Method parse_method(const std::string& s) {
  if (s == "streamfct") return Method::streamfct;
  if (s == "mini") return Method::mini;
  throw std::invalid_argument("unknown method '" + s + "' (expected streamfct or mini)");
}

RhsKind parse_rhs(const std::string& s) {
  if (s == "g") return RhsKind::g;
  if (s == "g_tilde") return RhsKind::g_tilde;
  if (s == "f_scalar") return RhsKind::f_scalar;
  if (s == "zero") return RhsKind::zero;
  throw std::invalid_argument("unknown rhs '" + s + "' (expected g, g_tilde, f_scalar or zero)");
}

std::string to_string(Method m) { return m == Method::mini ? "mini" : "streamfct"; }

std::string to_string(RhsKind r) {
  switch (r) {
  case RhsKind::g: return "g";
  case RhsKind::g_tilde: return "g_tilde";
  case RhsKind::f_scalar: return "f_scalar";
  case RhsKind::zero: return "zero";
  }
  return "?";
}

double StudyConfig::penalty() const { return eta ? *eta : default_penalty(degree); }

void StudyConfig::validate() const {
  if (method == Method::mini && rhs == RhsKind::f_scalar) {
    throw std::invalid_argument("the mini method takes a vector body force (g, g_tilde or zero)");
  }
  if (degree < 2 || degree > 3) throw std::invalid_argument("degree must be 2 or 3");
  if (dg_order < 0) throw std::invalid_argument("dg-order must be >= 0");
  if (eta && !(*eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(end_time > 0.0)) throw std::invalid_argument("end-time must be positive");
  for (auto n : meshes) {
    if (n == 0) throw std::invalid_argument("mesh sizes must be positive");
  }
  for (auto m : steps) {
    if (m == 0) throw std::invalid_argument("step counts must be positive");
  }
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    std::size_t pos = 0;
    const unsigned long v = std::stoul(item.substr(first), &pos);
    if (item.find_first_not_of(" \t", first + pos) != std::string::npos) {
      throw std::invalid_argument("bad list entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list '" + s + "'");
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw std::invalid_argument("bad boolean '" + s + "'");
}

} // namespace

void apply_config(StudyConfig& cfg, std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "method") cfg.method = parse_method(value);
    else if (key == "degree") cfg.degree = std::stoi(value);
    else if (key == "dg-order") cfg.dg_order = std::stoi(value);
    else if (key == "eta") cfg.eta = std::stod(value);
    else if (key == "mesh-list") cfg.meshes = parse_size_list(value);
    else if (key == "steps-list") cfg.steps = parse_size_list(value);
    else if (key == "rhs") cfg.rhs = parse_rhs(value);
    else if (key == "out") cfg.out = value;
    else if (key == "assert") cfg.assert_checks = parse_bool(value);
    else if (key == "end-time") cfg.end_time = std::stod(value);
    else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
}

void apply_config_file(StudyConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  apply_config(cfg, in);
}

ScalarField stream_source(RhsKind rhs) {
  switch (rhs) {
  case RhsKind::g: return negative_curl(manufactured::body_force());
  case RhsKind::g_tilde: return negative_curl(manufactured::perturbed_body_force());
  case RhsKind::f_scalar: return manufactured::stream_rhs();
  case RhsKind::zero: return zero_scalar_field();
  }
  throw std::logic_error("stream_source: bad rhs");
}

ScalarField stream_exact(RhsKind rhs) {
  return rhs == RhsKind::zero ? zero_scalar_field() : manufactured::psi();
}

VectorField mini_source(RhsKind rhs) {
  switch (rhs) {
  case RhsKind::g: return manufactured::body_force();
  case RhsKind::g_tilde: return manufactured::perturbed_body_force();
  case RhsKind::zero: return zero_vector_field();
  case RhsKind::f_scalar: break;
  }
  throw std::invalid_argument("mini_source: the mini method needs a vector body force");
}

VectorField mini_exact(RhsKind rhs) {
  return rhs == RhsKind::zero ? zero_vector_field() : manufactured::velocity();
}

double run_error(const StudyConfig& cfg, std::size_t n, std::size_t steps) {
  cfg.validate();
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(n));
  const TimePartition partition = make_partition(steps, cfg.end_time);
  if (cfg.method == Method::mini) {
    const MiniSolution sol = mini_transient_solve(build_mini_space(mesh), partition,
                                                  mini_source(cfg.rhs), mini_exact(cfg.rhs));
    return velocity_error_l2(sol, mini_exact(cfg.rhs));
  }
  const SpatialOperators ops = make_operators(mesh, cfg.degree, cfg.penalty());
  const ScalarField psi = stream_exact(cfg.rhs);
  const DgSolution sol = dg_solve(ops, partition, cfg.dg_order,
                                  scalar_load(ops.space, stream_source(cfg.rhs)), psi);
  return space_time_h1_error(sol, psi);
}

double fitted_rate(const std::vector<ConvergenceRow>& rows) {
  const std::size_t count = std::min<std::size_t>(3, rows.size());
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = rows.size() - count; i < rows.size(); ++i) {
    const double x = std::log(rows[i].x);
    const double y = std::log(rows[i].error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double c = static_cast<double>(count);
  return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

ConvergenceResult converge_k(const StudyConfig& cfg) {
  const std::size_t n = cfg.meshes.empty() ? 64 : cfg.meshes.back();
  if (cfg.steps.empty()) throw std::invalid_argument("converge-k needs a steps list");
  ConvergenceResult result{"converge-k", "k", {}, 0.0};
  for (auto m : cfg.steps) {
    result.rows.push_back({cfg.end_time / static_cast<double>(m), run_error(cfg, n, m)});
  }
  result.rate = fitted_rate(result.rows);
  return result;
}

ConvergenceResult converge_h(const StudyConfig& cfg) {
  const std::size_t steps = cfg.steps.empty() ? 256 : cfg.steps.back();
  if (cfg.meshes.empty()) throw std::invalid_argument("converge-h needs a mesh list");
  ConvergenceResult result{"converge-h", "h", {}, 0.0};
  for (auto n : cfg.meshes) {
    result.rows.push_back({std::sqrt(2.0) / static_cast<double>(n), run_error(cfg, n, steps)});
  }
  result.rate = fitted_rate(result.rows);
  return result;
}

ConvergenceResult stationary(const StudyConfig& cfg) {
  cfg.validate();
  if (cfg.meshes.empty()) throw std::invalid_argument("stationary needs a mesh list");
  const ScalarField phi = manufactured::phi();
  ConvergenceResult result{"stationary", "h", {}, 0.0};
  for (auto n : cfg.meshes) {
    auto space = build_space(std::make_shared<const Mesh>(build_structured_mesh(n)), cfg.degree);
    const auto cip = assemble_cip(space, cfg.penalty());
    const FeFunction r = ritz_projection(*cip, phi);
    const double e2 = gradient_error_squared(*space, r.coefficients,
                                             [&](const Point& x) { return phi.gradient(0.0, x); });
    result.rows.push_back({std::sqrt(2.0) / static_cast<double>(n), std::sqrt(e2)});
  }
  result.rate = fitted_rate(result.rows);
  return result;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& os, const ConvergenceResult& result) {
  os << result.axis << ",error\n";
  for (const auto& row : result.rows) os << format_number(row.x) << ',' << format_number(row.error) << '\n';
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void write_report(std::ostream& os, const Report& report) {
  for (const auto& [name, value] : report.values) os << name << '=' << format_number(value) << '\n';
  for (const auto& c : report.checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << format_number(c.value)
       << " tolerance=" << format_number(c.tolerance) << '\n';
  }
}

void write_summary(std::ostream& os, const StudyConfig& cfg, const Report& report) {
  auto list = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  os << "method=" << to_string(cfg.method) << '\n'
     << "degree=" << cfg.degree << '\n'
     << "dg-order=" << cfg.dg_order << '\n'
     << "eta=" << format_number(cfg.penalty()) << '\n'
     << "mesh-list=" << list(cfg.meshes) << '\n'
     << "steps-list=" << list(cfg.steps) << '\n'
     << "rhs=" << to_string(cfg.rhs) << '\n'
     << "end-time=" << format_number(cfg.end_time) << '\n';
  write_report(os, report);
}

std::optional<std::pair<double, double>> expected_rate(const StudyConfig& cfg, const std::string& study) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (cfg.method != Method::streamfct || cfg.rhs == RhsKind::zero) return std::nullopt;
  if (study == "converge-k") {
    if (cfg.dg_order == 0) return std::make_pair(0.85, 1.15);
    return std::make_pair(1.7, inf);
  }
  if ((study == "converge-h" || study == "stationary") && cfg.degree == 2) return std::make_pair(1.8, 2.2);
  return std::nullopt;
}

Report summarize(const StudyConfig& cfg, const ConvergenceResult& result) {
  Report report;
  report.values.emplace_back("rate", result.rate);
  if (const auto band = expected_rate(cfg, result.study)) {
    report.values.emplace_back("rate_min", band->first);
    report.values.emplace_back("rate_max", band->second);
    report.checks.push_back({"fitted_rate", result.rate, band->first,
                             result.rate >= band->first && result.rate <= band->second});
  }
  return report;
}

Report diagnostics(const StudyConfig& cfg) {
  cfg.validate();
  if (cfg.method != Method::streamfct) throw std::invalid_argument("diagnostics runs the streamfct method only");
  const std::size_t n = cfg.meshes.empty() ? 16 : cfg.meshes.back();
  const std::size_t steps = cfg.steps.empty() ? 32 : cfg.steps.back();
  const int r = cfg.dg_order;

  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(n));
  const SpatialOperators ops = make_operators(mesh, cfg.degree, cfg.penalty());
  const TimePartition partition = make_partition(steps, cfg.end_time);
  const ScalarField f = stream_source(cfg.rhs);
  const ScalarField psi = stream_exact(cfg.rhs);
  const LoadProvider load = scalar_load(ops.space, f);
  const DgSolution sol = dg_solve(ops, partition, r, load, psi);

  Report report;
  report.values.emplace_back("n", static_cast<double>(n));
  report.values.emplace_back("M", static_cast<double>(steps));

  report.checks.push_back({"cip_symmetry", max_asymmetry(ops.biharmonic()), 0.0,
                           max_asymmetry(ops.biharmonic()) == 0.0});

  const double error = space_time_h1_error(sol, psi);
  const BestApproximation best = best_approx_terms(psi, ops, partition, r);
  report.values.emplace_back("error", error);
  report.values.emplace_back("E_chi", best.chi);
  report.values.emplace_back("E_ritz", best.ritz);
  report.values.emplace_back("E_time", best.time);
  report.checks.push_back({"error_decomposition", error, 10.0 * best.sum(), error <= 10.0 * best.sum()});

  const StabilityTerms s = stability_functional(sol, ops);
  const double data = stability_data_norm_squared(ops, partition, r, load, sol.initial);
  const double ratio = data > 0.0 ? s.total() / data : 0.0;
  report.values.emplace_back("S1", s.derivative);
  report.values.emplace_back("S2", s.operator_term);
  report.values.emplace_back("S3", s.jumps);
  report.values.emplace_back("data_norm_squared", data);
  report.values.emplace_back("stability_ratio", ratio);
  report.checks.push_back({"stability_finite", ratio, 0.0, std::isfinite(ratio)});

  const DgSolution accurate = dg_solve(ops, partition, r, scalar_load(ops.space, f, kOrthogonalityQuadratureDegree), psi);
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const DofSubset& inner = ops.space->interior();
  double worst_orthogonality = 0.0;
  double worst_dual = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    DgSolution test = zero_solution(ops.space, partition, r);
    for (auto& interval : test.coefficients) {
      for (auto& c : interval) {
        Vector v(inner.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
        c = inner.extend(v);
      }
    }
    const OrthogonalityResidual res =
        galerkin_orthogonality(accurate, psi, ops, test, kOrthogonalityQuadratureDegree);
    worst_orthogonality = std::max(worst_orthogonality, res.relative());
    const double primal = bilinear_form(sol, test, ops.stiffness(), ops.biharmonic());
    const double dual = bilinear_form_dual(sol, test, ops.stiffness(), ops.biharmonic());
    worst_dual = std::max(worst_dual, std::abs(primal - dual) / std::max(1.0, std::abs(primal)));
  }
  report.checks.push_back({"galerkin_orthogonality", worst_orthogonality, 1e-7, worst_orthogonality <= 1e-7});
  report.checks.push_back({"primal_dual_agreement", worst_dual, 1e-11, worst_dual <= 1e-11});
  return report;
}

std::vector<ComparisonRow> compare_mini(const StudyConfig& cfg) {
  if (cfg.meshes.empty()) throw std::invalid_argument("compare-mini needs a mesh list");
  const std::size_t steps = cfg.steps.empty() ? 256 : cfg.steps.back();
  std::vector<ComparisonRow> rows;
  for (auto n : cfg.meshes) {
    ComparisonRow row;
    row.h = std::sqrt(2.0) / static_cast<double>(n);
    StudyConfig c = cfg;
    c.method = Method::streamfct;
    c.rhs = RhsKind::g;
    row.stream_g = run_error(c, n, steps);
    c.rhs = RhsKind::g_tilde;
    row.stream_g_tilde = run_error(c, n, steps);
    c.method = Method::mini;
    c.rhs = RhsKind::g;
    row.mini_g = run_error(c, n, steps);
    c.rhs = RhsKind::g_tilde;
    row.mini_g_tilde = run_error(c, n, steps);
    rows.push_back(row);
  }
  return rows;
}

void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "h,streamfct_g,streamfct_g_tilde,mini_g,mini_g_tilde\n";
  for (const auto& r : rows) {
    os << format_number(r.h) << ',' << format_number(r.stream_g) << ',' << format_number(r.stream_g_tilde)
       << ',' << format_number(r.mini_g) << ',' << format_number(r.mini_g_tilde) << '\n';
  }
}

Report summarize_comparison(const std::vector<ComparisonRow>& rows) {
  Report report;
  if (rows.empty()) return report;
  double max_diff = 0.0;
  for (const auto& r : rows) max_diff = std::max(max_diff, std::abs(r.stream_g - r.stream_g_tilde));
  const double ratio = rows.back().mini_g_tilde / rows.back().mini_g;
  report.values.emplace_back("mini_ratio_finest", ratio);
  report.checks.push_back({"streamfct_columns_identical", max_diff, 1e-12, max_diff <= 1e-12});
  report.checks.push_back({"mini_ratio", ratio, 10.0, ratio >= 10.0});
  return report;
}

} // namespace cipstokes
