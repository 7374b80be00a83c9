#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "multibai/tracking.hpp"

namespace multibai {

struct StoppingConfig {
  double delta = 0.1;
  int m_opt = 1;
  int k_arms = 2;
};

struct GlrReport {
  double z_value = 0.0;
  std::vector<int> best_tuple;  // ascending, size m_opt
  int critical_arm = -1;
  double threshold = 0.0;
  bool stop = false;
};

// Count-weighted pooled mean of the involved arms; all counts must be >= 1.
double pooled_empirical_mean(std::span<const std::int64_t> counts,
                             std::span<const double> means);

// GLR statistic for candidate tuple B against outside arm a:
//   N_a d(mu_a, pooled) + sum_{b in B} N_b d(mu_b, pooled).
// counts/means are full K-length arrays; empirical means are clamped into
// the family domain before any KL evaluation. Requires the derivation's
// regime mu_a <= min_B mu (after clamping); violating it is a caller bug.
double z_statistic(const Family& family, std::span<const std::int64_t> counts,
                   std::span<const double> means, std::span<const int> tuple_b,
                   int arm_a);

// Max over admissible M-tuples (empirical top-M sets; several only under
// exact ties) of the min over outside arms of z_statistic. Ties break to the
// lexicographically smallest tuple and the lowest critical arm. threshold
// and stop are left unset.
GlrReport z_max_min(const Family& family, const HistoryState& state,
                    const StoppingConfig& config);

// beta(t, delta) = log[K^M (4/(M+1))^((M+1)/2) t^((M+1)/2) / delta].
double stopping_threshold(std::int64_t t, const StoppingConfig& config);

// z_max_min plus threshold and the stop decision (z > beta).
GlrReport evaluate_stopping(const Family& family, const HistoryState& state,
                            const StoppingConfig& config);

// Uniformly random member of the best tuple; requires report.stop.
int recommend(const GlrReport& report, RngStream& rng);

}  // namespace multibai
