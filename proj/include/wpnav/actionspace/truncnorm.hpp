#pragma once

#include "wpnav/common/rng.hpp"

namespace wpnav {

// Standard-normal helpers that stay accurate far into the tails.
double normal_logpdf(double z);
double log_ndtr(double z);                   // log Phi(z)
double log_ndtr_diff(double a, double b);    // log(Phi(b) - Phi(a)), a < b
// Solves log Phi(z) = target for z in [lo, hi].
double inverse_log_ndtr(double target, double lo, double hi);

// Gaussian N(mu, sigma^2) restricted to [lower, upper].
struct TruncatedGaussian {
  double mu = 0.0;
  double sigma = 1.0;
  double lower = -1.0;
  double upper = 1.0;

  // Throws InvalidArgument when sigma <= 0, bounds are inverted or non-finite.
  void validate() const;

  double alpha() const { return (lower - mu) / sigma; }
  double beta() const { return (upper - mu) / sigma; }
  double log_normalizer() const { return log_ndtr_diff(alpha(), beta()); }

  // Inverse-CDF sample using one open-interval uniform.
  double sample(Rng& rng) const;
  double quantile(double u) const;
  double cdf(double x) const;

  // -infinity outside [lower, upper].
  double logprob(double x) const;
  double entropy() const;
  double mode() const;
  double mean() const;
  double variance() const;
};

}  // namespace wpnav
