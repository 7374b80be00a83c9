#include "multibai/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace multibai {

namespace {

std::string fmt_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& config, int trial_index,
                      std::vector<TraceRow>* trace) {
  const BanditInstance& inst = config.instance;
  const Family& family = inst.family();
  const int k = inst.k();
  if (config.max_rounds < k) {
    throw std::invalid_argument("max_rounds must allow the initialization pulls");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0,1)");
  }

  RngStream rng(config.base_seed, static_cast<std::uint64_t>(trial_index));
  HistoryState state(k);
  PluginOracle plugin(family, k, inst.m_opt());
  const StoppingConfig stop_cfg{config.delta, inst.m_opt(), k};
  const Weights uniform = Weights::uniform(k);

  auto pull = [&](int arm) {
    const double x = family.sample(inst.means()[static_cast<std::size_t>(arm)], rng);
    state.record(arm, x);
    if (trace != nullptr) {
      TraceRow row;
      row.t = state.t;
      row.arm = arm;
      row.reward = x;
      trace->push_back(std::move(row));
    }
  };

  for (int a = 0; a < k; ++a) {
    if (config.rule == TrackingRule::kCTracking) {
      state.accumulate_cum_weights(uniform.span());
    }
    pull(a);
  }

  TrialResult out;
  bool stopped = false;
  while (state.t < config.max_rounds) {
    int arm;
    if (config.rule == TrackingRule::kDTracking) {
      if (const auto forced = forced_exploration_arm(state)) {
        arm = *forced;
      } else {
        arm = next_arm(TrackingRule::kDTracking, state,
                       plugin.update(state.clamped_means(family)));
      }
    } else {
      arm = next_arm(TrackingRule::kCTracking, state,
                     plugin.update(state.clamped_means(family)));
    }
    pull(arm);

    if (state.t >= k + 1) {
      const GlrReport report = evaluate_stopping(family, state, stop_cfg);
      if (trace != nullptr) {
        TraceRow& row = trace->back();
        row.evaluated = true;
        row.z_value = report.z_value;
        row.threshold = report.threshold;
        row.critical_arm = report.critical_arm;
        row.tuple = report.best_tuple;
      }
      if (report.stop) {
        out.recommended = recommend(report, rng);
        stopped = true;
        break;
      }
    }
  }

  out.tau = state.t;
  out.hit_cap = !stopped;
  out.correct = stopped &&
                inst.means()[static_cast<std::size_t>(out.recommended)] == inst.mu_star();
  out.final_counts = state.counts;
  return out;
}

ExperimentSummary run_experiment(const ExperimentConfig& config,
                                 std::vector<TrialResult>* per_trial,
                                 std::vector<TraceRow>* trace0, int threads) {
  if (config.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  const OracleSolution sol = solve(config.instance);

  std::vector<TrialResult> results(static_cast<std::size_t>(config.n_trials));
  std::vector<TraceRow> trace_rows;

  int n_threads = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, config.n_trials));

  if (n_threads == 1) {
    for (int i = 0; i < config.n_trials; ++i) {
      results[static_cast<std::size_t>(i)] = run_trial(
          config, i, (config.trace && i == 0) ? &trace_rows : nullptr);
    }
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= config.n_trials) return;
        try {
          results[static_cast<std::size_t>(i)] = run_trial(
              config, i, (config.trace && i == 0) ? &trace_rows : nullptr);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  ExperimentSummary summary;
  summary.t_star = sol.t_star;
  summary.w_star = sol.w_star;

  // aggregate in trial-index order for reproducible floating-point totals
  double sum_tau = 0.0;
  std::int64_t errors = 0;
  for (const TrialResult& r : results) {
    sum_tau += static_cast<double>(r.tau);
    if (!r.correct) ++errors;
    if (r.hit_cap) ++summary.n_capped;
  }
  const double n = static_cast<double>(config.n_trials);
  summary.mean_tau = sum_tau / n;
  double ss = 0.0;
  for (const TrialResult& r : results) {
    const double d = static_cast<double>(r.tau) - summary.mean_tau;
    ss += d * d;
  }
  summary.stddev_tau = config.n_trials > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  summary.error_rate = static_cast<double>(errors) / n;
  summary.lb_expected_tau = sol.t_star * binary_kl(1.0 - config.delta, config.delta);
  try {
    summary.lw_upper_hint = lambert_stop_bound(
        1.0 / sol.t_star,
        threshold_constant_c(config.instance.k(), config.instance.m_opt()) / config.delta,
        threshold_constant_alpha(config.instance.m_opt()));
  } catch (const std::domain_error&) {
    summary.lw_upper_hint = std::numeric_limits<double>::quiet_NaN();
  }

  if (per_trial != nullptr) *per_trial = std::move(results);
  if (trace0 != nullptr) *trace0 = std::move(trace_rows);
  return summary;
}

double lower_bound_expected_tau(const BanditInstance& instance, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  return solve(instance).t_star * binary_kl(1.0 - delta, delta);
}

double lower_bound_expected_tau_weak(const BanditInstance& instance, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  return solve(instance).t_star * std::log(1.0 / (2.4 * delta));
}

double lambert_stop_bound(double c1, double c2, double alpha) {
  if (!(c1 > 0.0) || !(c2 > 0.0) || !(alpha > 0.0)) {
    throw std::domain_error("lambert_stop_bound needs positive arguments");
  }
  const double a_value = std::log(c2) / alpha + std::log(alpha / c1);
  if (!(a_value > 1.0)) {
    throw std::domain_error("lambert_stop_bound requires A > 1");
  }
  return alpha / c1 * (a_value + std::sqrt(2.0 * (a_value - 1.0)));
}

double predicted_tau_scaling(const BanditInstance& instance, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  return solve(instance).t_star * std::log(1.0 / delta);
}

double threshold_constant_c(int k, int m) {
  const double mp1 = static_cast<double>(m) + 1.0;
  return std::pow(static_cast<double>(k), m) * std::pow(4.0 / mp1, mp1 / 2.0);
}

double threshold_constant_alpha(int m) { return (static_cast<double>(m) + 1.0) / 2.0; }

void write_trials_csv(std::ostream& os, const std::vector<TrialResult>& results, int k) {
  os << "trial,tau,recommended,correct,hit_cap";
  for (int a = 0; a < k; ++a) os << ",counts_" << a;
  os << "\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const TrialResult& r = results[i];
    os << i << "," << r.tau << "," << r.recommended << "," << (r.correct ? 1 : 0)
       << "," << (r.hit_cap ? 1 : 0);
    for (int a = 0; a < k; ++a) os << "," << r.final_counts[static_cast<std::size_t>(a)];
    os << "\n";
  }
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "t,arm,reward,z_value,threshold,critical_arm,tuple\n";
  for (const TraceRow& row : rows) {
    os << row.t << "," << row.arm << "," << fmt_full(row.reward) << ",";
    if (row.evaluated) {
      os << fmt_full(row.z_value) << "," << fmt_full(row.threshold) << ","
         << row.critical_arm << ",";
      for (std::size_t i = 0; i < row.tuple.size(); ++i) {
        if (i > 0) os << "|";
        os << row.tuple[i];
      }
    } else {
      os << ",,,";
    }
    os << "\n";
  }
}

std::string summary_json(const ExperimentConfig& config, const ExperimentSummary& summary) {
  nlohmann::ordered_json j;
  j["error_rate"] = summary.error_rate;
  j["mean_tau"] = summary.mean_tau;
  j["stddev_tau"] = summary.stddev_tau;
  j["t_star"] = summary.t_star;
  j["w_star"] = summary.w_star.values();
  j["lb_expected_tau"] = summary.lb_expected_tau;
  if (std::isnan(summary.lw_upper_hint)) {
    j["lw_upper_hint"] = nullptr;
  } else {
    j["lw_upper_hint"] = summary.lw_upper_hint;
  }
  j["n_capped"] = summary.n_capped;
  j["n_trials"] = config.n_trials;
  j["family"] = config.instance.family().name();
  if (config.instance.family().kind() == FamilyKind::kGaussian) {
    j["sigma"] = config.instance.family().sigma();
  }
  j["means"] = config.instance.means();
  j["m"] = config.instance.m_opt();
  j["rule"] = config.rule == TrackingRule::kCTracking ? "c" : "d";
  j["delta"] = config.delta;
  j["seed"] = config.base_seed;
  j["max_rounds"] = config.max_rounds;
  j["threshold_family_caveat"] = threshold_family_caveat(config.instance.family().kind());
  return j.dump(2) + "\n";
}

std::string threshold_family_caveat(FamilyKind kind) {
  if (kind == FamilyKind::kBernoulli) {
    return "threshold calibrated for Bernoulli rewards";
  }
  return "threshold reuses the Bernoulli calibration heuristically for this family";
}

}  // namespace multibai
