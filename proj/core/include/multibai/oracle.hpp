#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "multibai/exp_family.hpp"

namespace multibai {

inline constexpr double kSimplexTol = 1e-12;
inline constexpr double kPlateauTol = 1e-12;

// Point on the K-dimensional probability simplex.
class Weights {
 public:
  Weights() = default;
  // Validates nonnegativity and that the coordinates sum to one.
  explicit Weights(std::vector<double> w);
  static Weights uniform(int k);
  static Weights unchecked(std::vector<double> w);

  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int a) const { return w_[static_cast<std::size_t>(a)]; }
  const std::vector<double>& values() const { return w_; }
  std::span<const double> span() const { return w_; }

 private:
  std::vector<double> w_;
};

// Bandit model: K arms from one family with a declared optimal plateau of
// size m_opt. The top m_opt means must be equal (within kPlateauTol) and
// strictly above the remaining means.
class BanditInstance {
 public:
  BanditInstance(Family family, std::vector<double> means, int m_opt);

  const Family& family() const { return family_; }
  const std::vector<double>& means() const { return means_; }
  int k() const { return static_cast<int>(means_.size()); }
  int m_opt() const { return m_opt_; }
  double mu_star() const { return mu_star_; }

  // Arms whose configured mean equals mu_star exactly, ascending.
  const std::vector<int>& optimal_set() const { return optimal_set_; }

 private:
  Family family_;
  std::vector<double> means_;
  int m_opt_;
  double mu_star_ = 0.0;
  std::vector<int> optimal_set_;
};

// Indices of the m largest entries (ties broken by lowest index), returned
// sorted ascending.
std::vector<int> top_m_arms(std::span<const double> means, int m);

// Weighted arithmetic mean; every weight must be strictly positive.
double pooled_alt_mean(std::span<const double> means,
                       std::span<const double> weights);

// Mixture-KL discrimination functional:
//   sum_i alpha_i d(mu_i, mbar) + (1 - sum_i alpha_i) d(mu_alt, mbar),
// where mbar is the alpha-weighted mixture of means_top and mean_alt.
// Requires alpha_i >= 0 and sum alpha_i <= 1.
double i_alpha(const Family& family, std::span<const double> means_top,
               double mean_alt, std::span<const double> alphas);

struct BestResponse {
  double value = 0.0;       // min over alternatives of the transport cost
  int critical_arm = -1;    // minimizing alternative, lowest index on ties
  double pooled_mean = 0.0; // common value the binding block collapses to
};

// Inner minimization over the alternative set for fixed weights, using the
// pooled-mean closed form for every arm outside the top-m set. The means
// need not form an exact plateau; the top set is taken by value with ties
// broken by index, which is how plug-in estimates are handled.
BestResponse best_response(const Family& family, std::span<const double> means,
                           int m_opt, std::span<const double> w);
BestResponse best_response(const BanditInstance& instance, const Weights& w);

// Value component of best_response; the objective whose supremum is 1/T*.
double g_value(const Family& family, std::span<const double> means, int m_opt,
               std::span<const double> w);
double g_value(const BanditInstance& instance, const Weights& w);

struct SolveOptions {
  double tol = 1e-8;             // relative certified-gap target
  long max_evaluations = 400000; // objective/supergradient evaluation budget
  int multistarts = 8;           // random restarts beyond the uniform start
};

struct OracleSolution {
  double t_star = 0.0;
  Weights w_star;
  double gap_certificate = 0.0;  // certified upper bound minus achieved value
  bool converged = false;
  long evaluations = 0;
};

class OracleSolveError : public std::runtime_error {
 public:
  OracleSolveError(const std::string& what, OracleSolution best);
  const OracleSolution& best() const { return best_; }

 private:
  OracleSolution best_;
};

// Characteristic time T* and maximizing weights w*. Projected supergradient
// ascent over the simplex (uniform start plus random multistarts), refined
// until a supergradient-mixture certificate bounds the optimality gap by
// tol * g. Deterministic for a fixed instance and options. Throws
// OracleSolveError (carrying the best iterate) if the budget runs out.
OracleSolution solve(const BanditInstance& instance,
                     const SolveOptions& options = {});

inline OracleSolution solve(const BanditInstance& instance, double tol) {
  SolveOptions options;
  options.tol = tol;
  return solve(instance, options);
}

// Relaxed warm-started solver for per-round plug-in weights. Never throws:
// degenerate inputs (all means equal) fall back to uniform weights.
class PluginOracle {
 public:
  PluginOracle(Family family, int k, int m_opt);

  // means must be valid (already clamped) for the family.
  const Weights& update(std::span<const double> means);
  const Weights& current() const { return w_; }

 private:
  Family family_;
  int k_;
  int m_opt_;
  long calls_ = 0;
  Weights w_;
};

}  // namespace multibai
