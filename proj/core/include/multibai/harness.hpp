#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "multibai/stopping.hpp"

namespace multibai {

struct ExperimentConfig {
  BanditInstance instance;
  TrackingRule rule = TrackingRule::kDTracking;
  double delta = 0.1;
  int n_trials = 1;
  std::uint64_t base_seed = 1;
  std::int64_t max_rounds = 1000000;
  bool trace = false;
};

struct TrialResult {
  std::int64_t tau = 0;
  int recommended = -1;  // -1 when the round cap was hit
  bool correct = false;
  std::vector<std::int64_t> final_counts;
  bool hit_cap = false;
};

struct TraceRow {
  std::int64_t t = 0;
  int arm = -1;
  double reward = 0.0;
  bool evaluated = false;  // stopping fields below are valid only when set
  double z_value = 0.0;
  double threshold = 0.0;
  int critical_arm = -1;
  std::vector<int> tuple;
};

struct ExperimentSummary {
  double error_rate = 0.0;
  double mean_tau = 0.0;
  double stddev_tau = 0.0;
  double t_star = 0.0;
  Weights w_star;
  double lb_expected_tau = 0.0;  // T* kl(1-delta || delta)
  double lw_upper_hint = 0.0;    // Lambert-W crossing of t/T* vs beta(t, delta); NaN if out of regime
  std::int64_t n_capped = 0;
};

// One simulated trial: initialization pulls each arm once in index order,
// then rule-driven sampling with a stopping check after every round from
// t = K+1 on, until the GLR clears the threshold or max_rounds is reached.
// Deterministic given (config.base_seed, trial_index). Capped trials carry
// recommended = -1 and correct = false. When trace is non-null, one row is
// appended per round.
TrialResult run_trial(const ExperimentConfig& config, int trial_index,
                      std::vector<TraceRow>* trace = nullptr);

// Runs n_trials independent trials on disjoint streams (possibly in
// parallel; aggregation always follows trial-index order, so the summary is
// a pure function of the config). Capped trials count as errors. per_trial
// and trace0 (rounds of trial 0, when config.trace) are optional outputs.
ExperimentSummary run_experiment(const ExperimentConfig& config,
                                 std::vector<TrialResult>* per_trial = nullptr,
                                 std::vector<TraceRow>* trace0 = nullptr,
                                 int threads = 0);

// Theorem-style lower bound T*(mu) kl(1-delta || delta).
double lower_bound_expected_tau(const BanditInstance& instance, double delta);

// Weaker non-asymptotic form T*(mu) ln(1/(2.4 delta)).
double lower_bound_expected_tau_weak(const BanditInstance& instance, double delta);

// Explicit solution bound for c1 x >= log(c2 x^alpha): with
// A = (1/alpha) log c2 + log(alpha/c1) > 1, returns
// (alpha/c1) (A + sqrt(2(A-1))). Throws std::domain_error when A <= 1.
double lambert_stop_bound(double c1, double c2, double alpha);

// Asymptotic reference line T*(mu) ln(1/delta).
double predicted_tau_scaling(const BanditInstance& instance, double delta);

// threshold calibration constants C = K^M (4/(M+1))^((M+1)/2), alpha = (M+1)/2
double threshold_constant_c(int k, int m);
double threshold_constant_alpha(int m);

// Results file: header trial,tau,recommended,correct,hit_cap,counts_0..counts_{K-1}.
void write_trials_csv(std::ostream& os, const std::vector<TrialResult>& results, int k);

// Trace file: header t,arm,reward,z_value,threshold,critical_arm,tuple.
// Stopping columns are empty before the first evaluated round; tuple members
// are joined with '|'.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

// Summary as a JSON document with a fixed key order and full-precision
// numbers; byte-stable for identical configs.
std::string summary_json(const ExperimentConfig& config, const ExperimentSummary& summary);

// Human-readable note on the threshold calibration for this family.
std::string threshold_family_caveat(FamilyKind kind);

}  // namespace multibai
