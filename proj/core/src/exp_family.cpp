#include "multibai/exp_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace multibai {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925287;

// x * log(x/y) with the 0 * log 0 = 0 convention.
double xlogxy(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(x / y);
}

double poisson_knuth(double lam, RngStream& rng) {
  const double limit = std::exp(-lam);
  double prod = rng.next_double01();
  double k = 0.0;
  while (prod > limit) {
    prod *= rng.next_double01();
    k += 1.0;
  }
  return k;
}

// Transformed rejection with squeeze (Hoermann), for larger rates.
double poisson_ptrs(double lam, RngStream& rng) {
  const double slam = std::sqrt(lam);
  const double loglam = std::log(lam);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.next_double01() - 0.5;
    const double v = rng.next_double01();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lam + 0.43);
    if (us >= 0.07 && v <= v_r) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * loglam - lam - std::lgamma(k + 1.0)) {
      return k;
    }
  }
}

}  // namespace

Family Family::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("gaussian sigma must be positive and finite");
  }
  return Family(FamilyKind::kGaussian, sigma);
}

bool Family::mean_in_domain(double mu) const {
  if (!std::isfinite(mu)) return false;
  switch (kind_) {
    case FamilyKind::kBernoulli:
      return mu > 0.0 && mu < 1.0;
    case FamilyKind::kGaussian:
      return true;
    case FamilyKind::kPoisson:
      return mu > 0.0;
  }
  return false;
}

void Family::require_mean(double mu) const {
  if (!mean_in_domain(mu)) {
    throw std::domain_error(name() + " mean out of domain: " + std::to_string(mu));
  }
}

double Family::kl(double mu, double lambda) const {
  require_mean(mu);
  require_mean(lambda);
  switch (kind_) {
    case FamilyKind::kBernoulli:
      return xlogxy(mu, lambda) + xlogxy(1.0 - mu, 1.0 - lambda);
    case FamilyKind::kGaussian: {
      const double d = mu - lambda;
      return d * d / (2.0 * sigma_ * sigma_);
    }
    case FamilyKind::kPoisson:
      return lambda - mu + xlogxy(mu, lambda);
  }
  return 0.0;
}

double Family::clamp_mean(double mu) const {
  switch (kind_) {
    case FamilyKind::kBernoulli:
      return std::min(1.0 - kMeanClampEta, std::max(kMeanClampEta, mu));
    case FamilyKind::kGaussian:
      return mu;
    case FamilyKind::kPoisson:
      return std::max(kMeanClampEta, mu);
  }
  return mu;
}

double Family::sample(double mean, RngStream& rng) const {
  require_mean(mean);
  switch (kind_) {
    case FamilyKind::kBernoulli:
      return rng.next_double01() < mean ? 1.0 : 0.0;
    case FamilyKind::kGaussian: {
      // Box-Muller, cosine branch only. Consuming exactly two uniforms per
      // draw keeps the stream position independent of the values drawn.
      const double u1 = 1.0 - rng.next_double01();
      const double u2 = rng.next_double01();
      return mean + sigma_ * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }
    case FamilyKind::kPoisson:
      return mean < 10.0 ? poisson_knuth(mean, rng) : poisson_ptrs(mean, rng);
  }
  return 0.0;
}

std::string Family::name() const {
  switch (kind_) {
    case FamilyKind::kBernoulli:
      return "bernoulli";
    case FamilyKind::kGaussian:
      return "gaussian";
    case FamilyKind::kPoisson:
      return "poisson";
  }
  return "unknown";
}

double binary_kl(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw std::domain_error("binary_kl arguments must lie in [0,1]");
  }
  if (x == y) return 0.0;
  if (y <= 0.0 || y >= 1.0) return kInf;
  return xlogxy(x, y) + xlogxy(1.0 - x, 1.0 - y);
}

}  // namespace multibai
