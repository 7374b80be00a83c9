#pragma once

#include <string>

#include "multibai/rng.hpp"

namespace multibai {

enum class FamilyKind { kBernoulli, kGaussian, kPoisson };

// Empirical means are pulled at least this far inside the mean domain before
// any KL evaluation, so likelihood statistics stay finite in early rounds.
inline constexpr double kMeanClampEta = 1e-9;

// One-parameter exponential family with fixed nuisance parameters. The
// Gaussian case carries a known standard deviation shared by all arms.
class Family {
 public:
  static Family bernoulli() { return Family(FamilyKind::kBernoulli, 0.0); }
  static Family gaussian(double sigma);
  static Family poisson() { return Family(FamilyKind::kPoisson, 0.0); }

  FamilyKind kind() const { return kind_; }
  double sigma() const { return sigma_; }

  bool mean_in_domain(double mu) const;
  void require_mean(double mu) const;

  // KL divergence d(mu, lambda) between family members with the given means.
  // Natural logarithm. Throws std::domain_error outside the mean domain.
  double kl(double mu, double lambda) const;

  // Clamps a boundary empirical mean into the open domain (identity for the
  // Gaussian family).
  double clamp_mean(double mu) const;

  // One draw; deterministic given the stream's seed and position.
  double sample(double mean, RngStream& rng) const;

  std::string name() const;

 private:
  Family(FamilyKind kind, double sigma) : kind_(kind), sigma_(sigma) {}

  FamilyKind kind_;
  double sigma_;
};

// Bernoulli KL divergence kl(x, y) on [0,1]^2 with the conventions
// kl(0,0) = kl(1,1) = 0, and +inf when y is 0 or 1 and x differs.
double binary_kl(double x, double y);

}  // namespace multibai
