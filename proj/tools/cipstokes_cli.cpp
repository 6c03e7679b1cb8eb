// Convergence studies and diagnostics for the stream-function Stokes solver.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "cipstokes/errors.hpp"
#include "cipstokes/study.hpp"

using namespace cipstokes;

namespace {

struct Options {
  std::string method = "streamfct";
  int degree = 2;
  int dg_order = 0;
  double eta = 0.0;
  std::string meshes;
  std::string steps;
  std::string rhs = "g";
  std::string out;
  std::string config;
  bool assert_checks = false;
};

void add_options(CLI::App* sub, Options& o) {
  sub->add_option("--method", o.method, "streamfct or mini");
  sub->add_option("--degree", o.degree, "Lagrange degree l (2 or 3)");
  sub->add_option("--dg-order", o.dg_order, "dG order r in time");
  sub->add_option("--eta", o.eta, "interior penalty (default 20 for l=2, 40 for l=3)");
  sub->add_option("--mesh-list", o.meshes, "comma-separated n (n x n squares)");
  sub->add_option("--steps-list", o.steps, "comma-separated M (time steps on [0,1])");
  sub->add_option("--rhs", o.rhs, "g, g_tilde, f_scalar or zero");
  sub->add_option("--out", o.out, "CSV path; the summary goes to <out>.summary.txt");
  sub->add_option("--config", o.config, "key=value file applied after the flags");
  sub->add_flag("--assert", o.assert_checks, "exit nonzero if a check fails");
}

StudyConfig make_config(const Options& o, const std::string& meshes, const std::string& steps) {
  StudyConfig cfg;
  cfg.method = parse_method(o.method);
  cfg.degree = o.degree;
  cfg.dg_order = o.dg_order;
  if (o.eta != 0.0) cfg.eta = o.eta;
  cfg.meshes = parse_size_list(o.meshes.empty() ? meshes : o.meshes);
  cfg.steps = parse_size_list(o.steps.empty() ? steps : o.steps);
  cfg.rhs = parse_rhs(o.rhs);
  cfg.out = o.out;
  cfg.assert_checks = o.assert_checks;
  if (!o.config.empty()) apply_config_file(cfg, o.config);
  cfg.validate();
  return cfg;
}

template <class WriteData>
int emit(const StudyConfig& cfg, const Report& report, WriteData write_data) {
  if (cfg.out.empty()) {
    write_data(std::cout);
    write_summary(std::cout, cfg, report);
  } else {
    std::ofstream data(cfg.out);
    std::ofstream summary(cfg.out + ".summary.txt");
    if (!data || !summary) throw std::runtime_error("cannot write '" + cfg.out + "'");
    write_data(data);
    write_summary(summary, cfg, report);
    write_report(std::cout, report);
  }
  return cfg.assert_checks && !report.passed() ? 1 : 0;
}

int run_convergence(const StudyConfig& cfg, const ConvergenceResult& result) {
  return emit(cfg, summarize(cfg, result), [&](std::ostream& os) { write_csv(os, result); });
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stream-function C0-IP / dG(r) Stokes solver: convergence studies and diagnostics"};
  app.require_subcommand(1);

  Options ok, oh, os, od, oc;
  auto* k = app.add_subcommand("converge-k", "error against k = 1/M at fixed n (default n=64)");
  auto* h = app.add_subcommand("converge-h", "error against h = sqrt(2)/n at fixed M (default M=256, or 64 for r>0)");
  auto* s = app.add_subcommand("stationary", "Ritz projection error of Phi against h");
  auto* d = app.add_subcommand("diagnostics", "stability, error decomposition and orthogonality checks");
  auto* c = app.add_subcommand("compare-mini", "stream function vs MINI under g and g_tilde");
  add_options(k, ok);
  add_options(h, oh);
  add_options(s, os);
  add_options(d, od);
  add_options(c, oc);

  CLI11_PARSE(app, argc, argv);

  try {
    if (k->parsed()) {
      const StudyConfig cfg = make_config(ok, "64", "8,16,32,64");
      return run_convergence(cfg, converge_k(cfg));
    }
    if (h->parsed()) {
      const StudyConfig cfg = make_config(oh, "4,8,16,32", oh.dg_order > 0 ? "64" : "256");
      return run_convergence(cfg, converge_h(cfg));
    }
    if (s->parsed()) {
      const StudyConfig cfg = make_config(os, "4,8,16,32", "1");
      return run_convergence(cfg, stationary(cfg));
    }
    if (d->parsed()) {
      const StudyConfig cfg = make_config(od, "16", "32");
      try {
        return emit(cfg, diagnostics(cfg), [](std::ostream&) {});
      } catch (const CoercivityError& e) {
        std::cerr << "coercivity check failed (eta=" << format_number(cfg.penalty()) << "): " << e.what() << '\n';
        return 3;
      }
    }
    if (c->parsed()) {
      const StudyConfig cfg = make_config(oc, "4,8,16,32", "256");
      const auto rows = compare_mini(cfg);
      return emit(cfg, summarize_comparison(rows), [&](std::ostream& out) { write_comparison_csv(out, rows); });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
