#include "multibai/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace multibai {

namespace {

void validate_config(const StoppingConfig& cfg) {
  if (cfg.k_arms < 2) throw std::invalid_argument("stopping needs K >= 2");
  if (cfg.m_opt < 1 || cfg.m_opt > cfg.k_arms - 1) {
    throw std::invalid_argument("stopping needs m_opt in [1, K-1]");
  }
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("delta must be positive");
}

}  // namespace

double pooled_empirical_mean(std::span<const std::int64_t> counts,
                             std::span<const double> means) {
  if (counts.size() != means.size() || counts.empty()) {
    throw std::invalid_argument("pooled mean needs matching nonempty inputs");
  }
  double n = 0.0, nx = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1) throw std::invalid_argument("pooled mean needs counts >= 1");
    n += static_cast<double>(counts[i]);
    nx += static_cast<double>(counts[i]) * means[i];
  }
  return nx / n;
}

double z_statistic(const Family& family, std::span<const std::int64_t> counts,
                   std::span<const double> means, std::span<const int> tuple_b,
                   int arm_a) {
  const int k = static_cast<int>(counts.size());
  if (counts.size() != means.size()) {
    throw std::invalid_argument("z_statistic needs matching counts and means");
  }
  if (tuple_b.empty() || static_cast<int>(tuple_b.size()) > k - 1) {
    throw std::invalid_argument("tuple size must lie in [1, K-1]");
  }
  auto check_index = [&](int a) {
    if (a < 0 || a >= k) throw std::invalid_argument("arm index out of range");
    if (counts[static_cast<std::size_t>(a)] < 1) {
      throw std::invalid_argument("z_statistic needs counts >= 1 for involved arms");
    }
  };
  check_index(arm_a);
  const double mu_a = family.clamp_mean(means[static_cast<std::size_t>(arm_a)]);
  double n = static_cast<double>(counts[static_cast<std::size_t>(arm_a)]);
  double nx = n * mu_a;
  for (int b : tuple_b) {
    check_index(b);
    if (b == arm_a) throw std::invalid_argument("arm_a must lie outside the tuple");
    const double mu_b = family.clamp_mean(means[static_cast<std::size_t>(b)]);
    if (mu_a > mu_b) {
      throw std::invalid_argument(
          "z_statistic regime violated: outside arm exceeds a tuple mean");
    }
    n += static_cast<double>(counts[static_cast<std::size_t>(b)]);
    nx += static_cast<double>(counts[static_cast<std::size_t>(b)]) * mu_b;
  }
  const double pooled = nx / n;
  double z = static_cast<double>(counts[static_cast<std::size_t>(arm_a)]) *
             family.kl(mu_a, pooled);
  for (int b : tuple_b) {
    const double mu_b = family.clamp_mean(means[static_cast<std::size_t>(b)]);
    z += static_cast<double>(counts[static_cast<std::size_t>(b)]) * family.kl(mu_b, pooled);
  }
  return z;
}

GlrReport z_max_min(const Family& family, const HistoryState& state,
                    const StoppingConfig& config) {
  validate_config(config);
  const int k = state.k();
  const int m = config.m_opt;
  if (config.k_arms != k) throw std::invalid_argument("config K does not match state");
  for (int a = 0; a < k; ++a) {
    if (state.counts[static_cast<std::size_t>(a)] < 1) {
      throw std::invalid_argument("z_max_min needs every arm pulled once");
    }
  }
  const std::vector<double> means = state.clamped_means(family);

  // Admissible tuples are the empirical top-m sets: all arms strictly above
  // the m-th value, padded with ties at that value.
  std::vector<double> sorted = means;
  std::nth_element(sorted.begin(), sorted.begin() + (m - 1), sorted.end(),
                   std::greater<double>());
  const double boundary = sorted[static_cast<std::size_t>(m - 1)];
  std::vector<int> above, tied;
  for (int a = 0; a < k; ++a) {
    if (means[static_cast<std::size_t>(a)] > boundary) {
      above.push_back(a);
    } else if (means[static_cast<std::size_t>(a)] == boundary) {
      tied.push_back(a);
    }
  }
  const int need = m - static_cast<int>(above.size());

  GlrReport best;
  best.z_value = -std::numeric_limits<double>::infinity();

  std::vector<int> sel(static_cast<std::size_t>(need));
  for (int i = 0; i < need; ++i) sel[static_cast<std::size_t>(i)] = i;
  std::vector<char> in_tuple(static_cast<std::size_t>(k), 0);

  for (;;) {
    std::vector<int> tuple = above;
    for (int i = 0; i < need; ++i) tuple.push_back(tied[static_cast<std::size_t>(sel[static_cast<std::size_t>(i)])]);
    std::sort(tuple.begin(), tuple.end());

    std::fill(in_tuple.begin(), in_tuple.end(), 0);
    for (int b : tuple) in_tuple[static_cast<std::size_t>(b)] = 1;
    double inner = std::numeric_limits<double>::infinity();
    int critical = -1;
    for (int a = 0; a < k; ++a) {
      if (in_tuple[static_cast<std::size_t>(a)]) continue;
      const double z = z_statistic(family, state.counts, means, tuple, a);
      if (z < inner) {
        inner = z;
        critical = a;
      }
    }
    if (inner > best.z_value) {
      best.z_value = inner;
      best.best_tuple = tuple;
      best.critical_arm = critical;
    }

    // next lexicographic combination of `tied` choose `need`
    if (need == 0) break;
    int i = need - 1;
    while (i >= 0 &&
           sel[static_cast<std::size_t>(i)] == static_cast<int>(tied.size()) - need + i) {
      --i;
    }
    if (i < 0) break;
    ++sel[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < need; ++j) {
      sel[static_cast<std::size_t>(j)] = sel[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  return best;
}

double stopping_threshold(std::int64_t t, const StoppingConfig& config) {
  validate_config(config);
  if (t < 1) throw std::invalid_argument("threshold needs t >= 1");
  const double m = static_cast<double>(config.m_opt);
  const double mp1 = m + 1.0;
  return m * std::log(static_cast<double>(config.k_arms)) +
         0.5 * mp1 * (std::log(4.0 / mp1) + std::log(static_cast<double>(t))) -
         std::log(config.delta);
}

GlrReport evaluate_stopping(const Family& family, const HistoryState& state,
                            const StoppingConfig& config) {
  GlrReport report = z_max_min(family, state, config);
  report.threshold = stopping_threshold(state.t, config);
  report.stop = report.z_value > report.threshold;
  return report;
}

int recommend(const GlrReport& report, RngStream& rng) {
  if (!report.stop) throw std::logic_error("recommend requires a stopped report");
  const int m = static_cast<int>(report.best_tuple.size());
  if (m < 1) throw std::logic_error("recommend requires a nonempty tuple");
  int i = static_cast<int>(rng.next_double01() * m);
  if (i >= m) i = m - 1;
  return report.best_tuple[static_cast<std::size_t>(i)];
}

}  // namespace multibai
