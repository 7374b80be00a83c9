#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "multibai/harness.hpp"

namespace fs = std::filesystem;
using namespace multibai;

namespace {

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string fmt_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string join6(const std::vector<double>& xs) {
  std::string out = "(";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt6(xs[i]);
  }
  return out + ")";
}

struct InstanceFlags {
  std::string family = "bernoulli";
  double sigma = 1.0;
  std::string means;
  int m = 1;
};

void add_instance_flags(CLI::App* cmd, InstanceFlags* flags) {
  cmd->add_option("--family", flags->family, "bernoulli | gaussian | poisson");
  cmd->add_option("--sigma", flags->sigma, "known std dev (gaussian only)");
  cmd->add_option("--means", flags->means, "comma-separated arm means");
  cmd->add_option("--m", flags->m, "number of optimal arms");
}

BanditInstance build_instance(const InstanceFlags& flags) {
  cli::RunConfig rc;
  rc.family = flags.family;
  rc.sigma = flags.sigma;
  rc.means = cli::parse_means_list(flags.means);
  rc.m = flags.m;
  return BanditInstance(cli::family_from(rc), rc.means, rc.m);
}

void print_instance(const BanditInstance& inst) {
  std::cout << "family = " << inst.family().name();
  if (inst.family().kind() == FamilyKind::kGaussian) {
    std::cout << " (sigma = " << fmt6(inst.family().sigma()) << ")";
  }
  std::cout << "\n";
  std::cout << "means = " << join6(inst.means()) << "\n";
  std::cout << "m = " << inst.m_opt() << "\n";
}

int cmd_oracle(const InstanceFlags& flags, double tol, bool row) {
  const BanditInstance inst = build_instance(flags);
  const OracleSolution sol = solve(inst, tol);
  if (row) {
    std::string line = fmt_full(sol.t_star);
    line += "," + fmt_full(sol.gap_certificate);
    for (double w : sol.w_star.values()) line += "," + fmt_full(w);
    std::cout << line << "\n";
    return 0;
  }
  print_instance(inst);
  std::cout << "T* = " << fmt6(sol.t_star) << "\n";
  std::cout << "w* = " << join6(sol.w_star.values()) << "\n";
  std::cout << "gap = " << fmt6(sol.gap_certificate) << "\n";
  return 0;
}

int cmd_bounds(const InstanceFlags& flags, double delta, bool row) {
  const BanditInstance inst = build_instance(flags);
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0,1)");
  }
  const OracleSolution sol = solve(inst);
  const double kl_lb = sol.t_star * binary_kl(1.0 - delta, delta);
  const double weak_lb = sol.t_star * std::log(1.0 / (2.4 * delta));
  const double predicted = sol.t_star * std::log(1.0 / delta);
  const double c = threshold_constant_c(inst.k(), inst.m_opt());
  const double alpha = threshold_constant_alpha(inst.m_opt());
  const double c1 = 1.0 / sol.t_star;
  const double c2 = c / delta;
  std::optional<double> crossing;
  try {
    crossing = lambert_stop_bound(c1, c2, alpha);
  } catch (const std::domain_error&) {
  }

  if (row) {
    std::string line = fmt_full(sol.t_star);
    line += "," + fmt_full(kl_lb);
    line += "," + fmt_full(weak_lb);
    line += "," + fmt_full(predicted);
    line += "," + fmt_full(c);
    line += "," + fmt_full(alpha);
    line += "," + fmt_full(c1);
    line += "," + fmt_full(c2);
    line += "," + (crossing ? fmt_full(*crossing) : std::string("nan"));
    std::cout << line << "\n";
    return 0;
  }

  print_instance(inst);
  std::cout << "delta = " << fmt6(delta) << "\n";
  std::cout << "t_star = " << fmt6(sol.t_star) << "\n";
  std::cout << "kl_lower_bound = " << fmt6(kl_lb) << "\n";
  std::cout << "weak_lower_bound = " << fmt6(weak_lb) << "\n";
  std::cout << "predicted_tau_scaling = " << fmt6(predicted) << "\n";
  std::cout << "lambert_c = " << fmt6(c) << "\n";
  std::cout << "lambert_alpha = " << fmt6(alpha) << "\n";
  std::cout << "lambert_c1 = " << fmt6(c1) << "\n";
  std::cout << "lambert_c2 = " << fmt6(c2) << "\n";
  if (crossing) {
    std::cout << "lambert_crossing_hint = " << fmt6(*crossing) << "\n";
    const double lhs = c1 * *crossing;
    const double rhs = std::log(c2 * std::pow(*crossing, alpha));
    std::cout << "self_check: c1*x = " << fmt6(lhs) << " >= log(c2*x^alpha) = "
              << fmt6(rhs) << (lhs >= rhs ? "  [ok]" : "  [FAIL]") << "\n";
  } else {
    std::cout << "lambert_crossing_hint = nan (lemma regime A <= 1)\n";
  }
  return 0;
}

std::string resolve_out_dir(const CLI::Option* out_opt, const std::string& out_flag,
                            const std::string& config_dir) {
  if (out_opt->count() > 0) return out_flag;
  if (const char* env = std::getenv("MULTIBAI_OUT_DIR")) return env;
  return config_dir;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

void print_summary(const cli::RunConfig& rc, const ExperimentSummary& s) {
  std::cout << "rule = " << rc.rule << "  delta = " << fmt6(rc.delta)
            << "  trials = " << rc.trials << "  seed = " << rc.seed << "\n";
  std::cout << "t_star = " << fmt6(s.t_star) << "  w_star = " << join6(s.w_star.values())
            << "\n";
  std::cout << "mean_tau = " << fmt6(s.mean_tau) << "  stddev_tau = "
            << fmt6(s.stddev_tau) << "\n";
  std::cout << "error_rate = " << fmt6(s.error_rate) << "  capped = " << s.n_capped
            << "\n";
  std::cout << "lb_expected_tau = " << fmt6(s.lb_expected_tau)
            << "  lw_upper_hint = " << fmt6(s.lw_upper_hint) << "\n";
}

int cmd_run(const cli::RunConfig& rc) {
  const ExperimentConfig ec = cli::to_experiment_config(rc);
  std::vector<TrialResult> trials;
  std::vector<TraceRow> trace;
  const ExperimentSummary summary = run_experiment(ec, &trials, &trace);

  fs::create_directories(rc.out_dir);
  write_file(fs::path(rc.out_dir) / "summary.json", summary_json(ec, summary));
  {
    std::ofstream out(fs::path(rc.out_dir) / "trials.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trials.csv");
    write_trials_csv(out, trials, ec.instance.k());
  }
  if (rc.trace) {
    std::ofstream out(fs::path(rc.out_dir) / "trace.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace.csv");
    write_trace_csv(out, trace);
  }
  write_file(fs::path(rc.out_dir) / "config_used.ini", cli::serialize_config(rc));

  print_instance(ec.instance);
  print_summary(rc, summary);
  std::cout << "wrote " << (fs::path(rc.out_dir) / "summary.json").string() << "\n";
  return 0;
}

int cmd_sweep(const cli::RunConfig& base, std::vector<double> deltas,
              std::vector<std::string> rules) {
  if (deltas.empty()) deltas = {base.delta};
  if (rules.empty()) rules = {base.rule};
  fs::create_directories(base.out_dir);

  std::ofstream csv(fs::path(base.out_dir) / "sweep.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write sweep.csv");
  csv << "delta,rule,status,error_rate,mean_tau,stddev_tau,t_star,"
         "lb_expected_tau,lw_upper_hint,n_capped,n_trials\n";

  bool any_failed = false;
  for (const std::string& rule : rules) {
    for (double delta : deltas) {
      cli::RunConfig rc = base;
      rc.rule = rule;
      rc.delta = delta;
      csv << fmt_full(delta) << "," << rule << ",";
      try {
        const ExperimentConfig ec = cli::to_experiment_config(rc);
        const ExperimentSummary s = run_experiment(ec);
        csv << "ok," << fmt_full(s.error_rate) << "," << fmt_full(s.mean_tau) << ","
            << fmt_full(s.stddev_tau) << "," << fmt_full(s.t_star) << ","
            << fmt_full(s.lb_expected_tau) << "," << fmt_full(s.lw_upper_hint) << ","
            << s.n_capped << "," << rc.trials << "\n";
        std::cout << "rule=" << rule << " delta=" << fmt6(delta)
                  << " mean_tau=" << fmt6(s.mean_tau)
                  << " error_rate=" << fmt6(s.error_rate) << "\n";
      } catch (const std::exception& e) {
        any_failed = true;
        csv << "failed,,,,,,,," << rc.trials << "\n";
        std::cerr << "cell rule=" << rule << " delta=" << fmt6(delta)
                  << " failed: " << e.what() << "\n";
      }
    }
  }
  write_file(fs::path(base.out_dir) / "config_used.ini", cli::serialize_config(base));
  std::cout << "wrote " << (fs::path(base.out_dir) / "sweep.csv").string() << "\n";
  return any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-confidence best-arm identification with multiple optimal arms"};
  app.require_subcommand(1);

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "characteristic time T* and weights w*");
  InstanceFlags oracle_flags;
  add_instance_flags(oracle_cmd, &oracle_flags);
  double oracle_tol = 1e-8;
  bool oracle_row = false;
  oracle_cmd->add_option("--tol", oracle_tol, "relative certified-gap tolerance");
  oracle_cmd->add_flag("--row", oracle_row, "machine-readable CSV row, full precision");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "sample-complexity bound calculators");
  InstanceFlags bounds_flags;
  add_instance_flags(bounds_cmd, &bounds_flags);
  double bounds_delta = 0.1;
  bool bounds_row = false;
  bounds_cmd->add_option("--delta", bounds_delta, "confidence parameter");
  bounds_cmd->add_flag("--row", bounds_row, "machine-readable CSV row, full precision");

  // run / sweep share config + overrides
  auto* run_cmd = app.add_subcommand("run", "run one Monte Carlo experiment");
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep a delta grid and/or rules");

  struct RunArgs {
    std::string config_path;
    InstanceFlags inst;
    std::string rule;
    double delta = 0.1;
    int trials = 100;
    std::uint64_t seed = 1;
    std::int64_t max_rounds = 1000000;
    bool trace = false;
    std::string out;
    CLI::Option* config_opt = nullptr;
    CLI::Option* family_opt = nullptr;
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* means_opt = nullptr;
    CLI::Option* m_opt = nullptr;
    CLI::Option* rule_opt = nullptr;
    CLI::Option* delta_opt = nullptr;
    CLI::Option* trials_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* max_rounds_opt = nullptr;
    CLI::Option* trace_opt = nullptr;
    CLI::Option* out_opt = nullptr;
  };

  auto add_run_args = [](CLI::App* cmd, RunArgs* a) {
    a->config_opt = cmd->add_option("--config", a->config_path, "config file (INI sections)");
    a->family_opt = cmd->add_option("--family", a->inst.family, "bernoulli | gaussian | poisson");
    a->sigma_opt = cmd->add_option("--sigma", a->inst.sigma, "known std dev (gaussian only)");
    a->means_opt = cmd->add_option("--means", a->inst.means, "comma-separated arm means");
    a->m_opt = cmd->add_option("--m", a->inst.m, "number of optimal arms");
    a->rule_opt = cmd->add_option("--rule", a->rule, "sampling rule: c | d");
    a->delta_opt = cmd->add_option("--delta", a->delta, "confidence parameter");
    a->trials_opt = cmd->add_option("--trials", a->trials, "number of trials");
    a->seed_opt = cmd->add_option("--seed", a->seed, "base seed");
    a->max_rounds_opt = cmd->add_option("--max-rounds", a->max_rounds, "safety cap per trial");
    a->trace_opt = cmd->add_flag("--trace", a->trace, "write per-round trace of trial 0");
    a->out_opt = cmd->add_option("--out", a->out,
                                 "output directory (overrides MULTIBAI_OUT_DIR and config)");
  };

  RunArgs run_args, sweep_args;
  add_run_args(run_cmd, &run_args);
  add_run_args(sweep_cmd, &sweep_args);
  std::vector<double> sweep_deltas;
  std::vector<std::string> sweep_rules;
  sweep_cmd->add_option("--deltas", sweep_deltas, "delta grid")->delimiter(',');
  sweep_cmd->add_option("--rules", sweep_rules, "rule grid (subset of c,d)")->delimiter(',');

  auto assemble = [](const RunArgs& a) {
    cli::RunConfig rc;
    if (a.config_opt->count() > 0) rc = cli::parse_config_file(a.config_path);
    if (a.family_opt->count() > 0) rc.family = a.inst.family;
    if (a.sigma_opt->count() > 0) rc.sigma = a.inst.sigma;
    if (a.means_opt->count() > 0) rc.means = cli::parse_means_list(a.inst.means);
    if (a.m_opt->count() > 0) rc.m = a.inst.m;
    if (a.rule_opt->count() > 0) rc.rule = a.rule;
    if (a.delta_opt->count() > 0) rc.delta = a.delta;
    if (a.trials_opt->count() > 0) rc.trials = a.trials;
    if (a.seed_opt->count() > 0) rc.seed = a.seed;
    if (a.max_rounds_opt->count() > 0) rc.max_rounds = a.max_rounds;
    if (a.trace_opt->count() > 0) rc.trace = a.trace;
    if (rc.means.empty()) {
      throw std::invalid_argument("no instance given: pass --config or --means/--m");
    }
    rc.out_dir = resolve_out_dir(a.out_opt, a.out, rc.out_dir);
    return rc;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_flags, oracle_tol, oracle_row);
    if (bounds_cmd->parsed()) return cmd_bounds(bounds_flags, bounds_delta, bounds_row);
    if (run_cmd->parsed()) return cmd_run(assemble(run_args));
    if (sweep_cmd->parsed()) return cmd_sweep(assemble(sweep_args), sweep_deltas, sweep_rules);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
