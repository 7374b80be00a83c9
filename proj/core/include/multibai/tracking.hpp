#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "multibai/oracle.hpp"

namespace multibai {

enum class TrackingRule { kCTracking, kDTracking };

// Sufficient statistics of one sample path: pull counts, reward sums, and
// the cumulative projected-weight tally used by C-Tracking.
struct HistoryState {
  explicit HistoryState(int k);

  std::int64_t t = 0;
  std::vector<std::int64_t> counts;
  std::vector<double> sums;
  std::vector<double> cum_weights;

  int k() const { return static_cast<int>(counts.size()); }
  void record(int arm, double reward);
  double empirical_mean(int arm) const;  // requires counts[arm] >= 1
  std::vector<double> clamped_means(const Family& family) const;
  void accumulate_cum_weights(std::span<const double> w);
};

// Forced-exploration schedule: epsilon_t = 1 / (2 sqrt(K^2 + t)).
double epsilon_schedule(std::int64_t t, int k);

// L-infinity projection onto the epsilon-truncated simplex: the uniform
// downward shift with clamping, u_a = max(epsilon, w_a - c), with the
// smallest c >= 0 restoring sum one.
Weights project_truncated_simplex(const Weights& w, double epsilon);

// Arms whose count has fallen below sqrt(t) - K/2 (strict); least-sampled
// first, ties by lowest index. Empty when no arm is starved.
std::optional<int> forced_exploration_arm(const HistoryState& state);

// Next arm under the given rule. Every arm must have been pulled once.
// C-Tracking folds the epsilon_t-projected plug-in weights into
// state.cum_weights before selecting. Ties break to the lowest index.
int next_arm(TrackingRule rule, HistoryState& state, const Weights& plugin_weights);

}  // namespace multibai
