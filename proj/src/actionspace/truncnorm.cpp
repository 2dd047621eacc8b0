#include "wpnav/actionspace/truncnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wpnav/common/error.hpp"

namespace wpnav {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// log(1 - exp(t)) for t <= 0.
double log1mexp(double t) {
  if (t > -std::numbers::ln2) return std::log(-std::expm1(t));
  return std::log1p(-std::exp(t));
}

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

double normal_logpdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double log_ndtr(double z) {
  if (z > 5.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
  if (z > -30.0) return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
  // Asymptotic expansion of the Mills ratio.
  const double z2 = z * z;
  const double inv = 1.0 / z2;
  const double series = 1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv)));
  return -0.5 * z2 - std::log(-z) - kLogSqrt2Pi + std::log(series);
}

double log_ndtr_diff(double a, double b) {
  if (!(a < b)) return kNegInf;
  if (b <= 0.0) {
    const double lb = log_ndtr(b);
    return lb + log1mexp(log_ndtr(a) - lb);
  }
  if (a >= 0.0) {
    const double qa = log_ndtr(-a);
    return qa + log1mexp(log_ndtr(-b) - qa);
  }
  const double lower_tail = 0.5 * std::erfc(-a / std::numbers::sqrt2);
  const double upper_tail = 0.5 * std::erfc(b / std::numbers::sqrt2);
  return std::log1p(-(lower_tail + upper_tail));
}

double inverse_log_ndtr(double target, double lo, double hi) {
  // log Phi is concave and increasing, so Newton from the left end
  // approaches the root monotonically from below.
  double z = lo;
  for (int it = 0; it < 200; ++it) {
    const double lz = log_ndtr(z);
    const double f = lz - target;
    if (f >= 0.0) break;
    const double slope = std::exp(normal_logpdf(z) - lz);
    const double step = -f / slope;
    z += step;
    if (z >= hi) return hi;
    if (step <= 1e-15 * (1.0 + std::abs(z))) break;
  }
  return std::clamp(z, lo, hi);
}

void TruncatedGaussian::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || !std::isfinite(lower) ||
      !std::isfinite(upper))
    throw InvalidArgument("truncated gaussian parameters must be finite");
  if (!(sigma > 0.0)) throw InvalidArgument("truncated gaussian sigma must be positive");
  if (!(lower < upper)) throw InvalidArgument("truncated gaussian bounds are inverted");
}

double TruncatedGaussian::quantile(double u) const {
  double a = alpha();
  double b = beta();
  const bool flip = a + b > 0.0;
  if (flip) {
    std::swap(a, b);
    a = -a;
    b = -b;
    u = 1.0 - u;
  }
  // Phi(z) = (1-u) Phi(a) + u Phi(b), evaluated in log space.
  const double la = log_ndtr(a);
  const double lb = log_ndtr(b);
  const double lu = u > 0.0 ? std::log(u) : kNegInf;
  const double l1u = u < 1.0 ? std::log1p(-u) : kNegInf;
  const double target = logaddexp(l1u + la, lu + lb);
  double z = inverse_log_ndtr(target, a, b);
  if (flip) z = -z;
  return std::clamp(mu + sigma * z, lower, upper);
}

double TruncatedGaussian::sample(Rng& rng) const { return quantile(rng.uniform_open()); }

double TruncatedGaussian::cdf(double x) const {
  if (x <= lower) return 0.0;
  if (x >= upper) return 1.0;
  return std::exp(log_ndtr_diff(alpha(), (x - mu) / sigma) - log_normalizer());
}

double TruncatedGaussian::logprob(double x) const {
  if (!(x >= lower && x <= upper)) return kNegInf;
  const double z = (x - mu) / sigma;
  return normal_logpdf(z) - std::log(sigma) - log_normalizer();
}

double TruncatedGaussian::entropy() const {
  const double a = alpha();
  const double b = beta();
  const double log_z = log_normalizer();
  const double ra = std::exp(normal_logpdf(a) - log_z);
  const double rb = std::exp(normal_logpdf(b) - log_z);
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e) + std::log(sigma) + log_z +
         0.5 * (a * ra - b * rb);
}

double TruncatedGaussian::mode() const { return std::clamp(mu, lower, upper); }

double TruncatedGaussian::mean() const {
  const double log_z = log_normalizer();
  const double ra = std::exp(normal_logpdf(alpha()) - log_z);
  const double rb = std::exp(normal_logpdf(beta()) - log_z);
  return mu + sigma * (ra - rb);
}

double TruncatedGaussian::variance() const {
  const double a = alpha();
  const double b = beta();
  const double log_z = log_normalizer();
  const double ra = std::exp(normal_logpdf(a) - log_z);
  const double rb = std::exp(normal_logpdf(b) - log_z);
  const double m = ra - rb;
  return sigma * sigma * (1.0 + a * ra - b * rb - m * m);
}

}  // namespace wpnav
