#include "multibai/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace multibai {

HistoryState::HistoryState(int k) {
  if (k < 2) throw std::invalid_argument("history needs at least two arms");
  counts.assign(static_cast<std::size_t>(k), 0);
  sums.assign(static_cast<std::size_t>(k), 0.0);
  cum_weights.assign(static_cast<std::size_t>(k), 0.0);
}

void HistoryState::record(int arm, double reward) {
  if (arm < 0 || arm >= k()) throw std::invalid_argument("arm index out of range");
  ++counts[static_cast<std::size_t>(arm)];
  sums[static_cast<std::size_t>(arm)] += reward;
  ++t;
}

double HistoryState::empirical_mean(int arm) const {
  if (arm < 0 || arm >= k()) throw std::invalid_argument("arm index out of range");
  if (counts[static_cast<std::size_t>(arm)] < 1) {
    throw std::logic_error("empirical mean undefined before the first pull");
  }
  return sums[static_cast<std::size_t>(arm)] /
         static_cast<double>(counts[static_cast<std::size_t>(arm)]);
}

std::vector<double> HistoryState::clamped_means(const Family& family) const {
  std::vector<double> out(static_cast<std::size_t>(k()));
  for (int a = 0; a < k(); ++a) {
    out[static_cast<std::size_t>(a)] = family.clamp_mean(empirical_mean(a));
  }
  return out;
}

void HistoryState::accumulate_cum_weights(std::span<const double> w) {
  if (static_cast<int>(w.size()) != k()) {
    throw std::invalid_argument("weight vector size mismatch");
  }
  for (int a = 0; a < k(); ++a) cum_weights[static_cast<std::size_t>(a)] += w[static_cast<std::size_t>(a)];
}

double epsilon_schedule(std::int64_t t, int k) {
  if (k < 2) throw std::invalid_argument("epsilon schedule needs K >= 2");
  if (t < 0) throw std::invalid_argument("epsilon schedule needs t >= 0");
  return 1.0 / (2.0 * std::sqrt(static_cast<double>(k) * k + static_cast<double>(t)));
}

Weights project_truncated_simplex(const Weights& w, double epsilon) {
  const int k = w.size();
  if (k < 1) throw std::invalid_argument("empty weights");
  if (!(epsilon > 0.0) || epsilon > 1.0 / k + 1e-15) {
    throw std::invalid_argument("epsilon must lie in (0, 1/K]");
  }
  bool feasible = true;
  for (double x : w.values()) feasible = feasible && x >= epsilon;
  if (feasible) return w;

  // Find the uniform shift c with sum_a max(epsilon, w_a - c) = 1. With j
  // coordinates left unclamped (the j largest), c = (S_j + (K-j) eps - 1)/j.
  std::vector<double> sorted = w.values();
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double c = 0.0;
  double prefix = 0.0;
  bool found = false;
  for (int j = 1; j <= k; ++j) {
    prefix += sorted[static_cast<std::size_t>(j - 1)];
    const double cj = (prefix + (k - j) * epsilon - 1.0) / j;
    const bool lower_ok = sorted[static_cast<std::size_t>(j - 1)] - cj >= epsilon - 1e-15;
    const bool upper_ok =
        j == k || sorted[static_cast<std::size_t>(j)] - cj <= epsilon + 1e-15;
    if (lower_ok && upper_ok) {
      c = std::max(0.0, cj);
      found = true;
      break;
    }
  }
  if (!found) c = (1.0 - k * epsilon) <= 0.0 ? 1.0 : 0.0;  // all clamp to epsilon

  std::vector<double> u(static_cast<std::size_t>(k));
  double sum = 0.0;
  int arg_max = 0;
  for (int a = 0; a < k; ++a) {
    u[static_cast<std::size_t>(a)] = std::max(epsilon, w[a] - c);
    sum += u[static_cast<std::size_t>(a)];
    if (u[static_cast<std::size_t>(a)] > u[static_cast<std::size_t>(arg_max)]) arg_max = a;
  }
  // push rounding residue onto the largest coordinate
  u[static_cast<std::size_t>(arg_max)] += 1.0 - sum;
  return Weights::unchecked(std::move(u));
}

std::optional<int> forced_exploration_arm(const HistoryState& state) {
  const double threshold =
      std::sqrt(static_cast<double>(state.t)) - static_cast<double>(state.k()) / 2.0;
  int pick = -1;
  std::int64_t fewest = std::numeric_limits<std::int64_t>::max();
  for (int a = 0; a < state.k(); ++a) {
    const std::int64_t n = state.counts[static_cast<std::size_t>(a)];
    if (static_cast<double>(n) < threshold && n < fewest) {
      pick = a;
      fewest = n;
    }
  }
  if (pick < 0) return std::nullopt;
  return pick;
}

int next_arm(TrackingRule rule, HistoryState& state, const Weights& plugin_weights) {
  const int k = state.k();
  if (plugin_weights.size() != k) {
    throw std::invalid_argument("plugin weights size mismatch");
  }
  for (int a = 0; a < k; ++a) {
    if (state.counts[static_cast<std::size_t>(a)] < 1) {
      throw std::logic_error("tracking requires one initial pull per arm");
    }
  }

  if (rule == TrackingRule::kDTracking) {
    if (const auto forced = forced_exploration_arm(state)) return *forced;
    int best = 0;
    double best_deficit = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) {
      const double deficit = static_cast<double>(state.t) * plugin_weights[a] -
                             static_cast<double>(state.counts[static_cast<std::size_t>(a)]);
      if (deficit > best_deficit) {
        best_deficit = deficit;
        best = a;
      }
    }
    return best;
  }

  const double eps = epsilon_schedule(state.t, k);
  const Weights projected = project_truncated_simplex(plugin_weights, eps);
  state.accumulate_cum_weights(projected.span());
  int best = 0;
  double best_deficit = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < k; ++a) {
    const double deficit = state.cum_weights[static_cast<std::size_t>(a)] -
                           static_cast<double>(state.counts[static_cast<std::size_t>(a)]);
    if (deficit > best_deficit) {
      best_deficit = deficit;
      best = a;
    }
  }
  return best;
}

}  // namespace multibai
