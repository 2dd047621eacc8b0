#include "wpnav/policy/head_ops.hpp"

#include <cmath>

#include "wpnav/common/error.hpp"

namespace wpnav {
namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * kPi);

GaussianVars gaussian(Tape& t, Var raw, double mean_lo, double mean_hi, bool tanh_mean,
                      double spread) {
  GaussianVars g;
  const Var m = t.slice_cols(raw, 0, 1);
  const Var s = t.slice_cols(raw, 1, 2);
  if (tanh_mean)
    g.mu = t.scale(t.tanh(m), mean_hi);
  else
    g.mu = t.add_scalar(t.scale(t.sigmoid(m), mean_hi - mean_lo), mean_lo);
  g.sigma = t.add_scalar(t.scale(t.sigmoid(s), spread), kSigmaFloor);
  g.lower = mean_lo;
  g.upper = mean_hi;
  return g;
}

// Standardized bounds and log normalizer.
struct Standardized {
  Var alpha;
  Var beta;
  Var log_z;
};

Standardized standardize(Tape& t, const GaussianVars& g) {
  Standardized s;
  s.alpha = t.div(t.add_scalar(t.neg(g.mu), g.lower), g.sigma);
  s.beta = t.div(t.add_scalar(t.neg(g.mu), g.upper), g.sigma);
  s.log_z = t.log_ndtr_diff(s.alpha, s.beta);
  return s;
}

Var zero(Tape& t) { return t.scalar(0.0); }

// Categorical entropy of each row of logits, r x 1.
Var row_entropies(Tape& t, Var logits) {
  const Var lp = t.log_softmax_rows(logits);
  return t.neg(t.sum_cols(t.mul(t.exp(lp), lp)));
}

}  // namespace

GaussianVars offset_gaussian(Tape& t, Var raw) {
  GaussianVars g = gaussian(t, raw, -kMaxOffset, kMaxOffset, true, kMaxOffset);
  return g;
}

GaussianVars distance_gaussian(Tape& t, Var raw) {
  return gaussian(t, raw, kMinDistance, kMaxDistance, false,
                  0.5 * (kMaxDistance - kMinDistance));
}

Var truncnorm_logpdf(Tape& t, const GaussianVars& g, Var x) {
  const Standardized s = standardize(t, g);
  const Var xi = t.div(t.sub(x, g.mu), g.sigma);
  const Var lp = t.add(t.scale(t.square(xi), 0.5), t.log(g.sigma));
  return t.add_scalar(t.neg(t.add(lp, s.log_z)), -kHalfLog2Pi);
}

Var truncnorm_entropy(Tape& t, const GaussianVars& g) {
  // H = 0.5 log(2 pi e) + log sigma + log Z + (alpha phi(alpha) - beta phi(beta)) / (2 Z)
  const Standardized s = standardize(t, g);
  auto phi_over_z = [&](Var z) {
    return t.exp(t.sub(t.add_scalar(t.scale(t.square(z), -0.5), -kHalfLog2Pi), s.log_z));
  };
  const Var tail = t.scale(
      t.sub(t.mul(s.alpha, phi_over_z(s.alpha)), t.mul(s.beta, phi_over_z(s.beta))), 0.5);
  return t.add(t.add_scalar(t.add(t.log(g.sigma), s.log_z), kHalfLog2Pi + 0.5), tail);
}

Var joint_logprob(Tape& t, const PolicyVars& v, const ExpressivityConfig& cfg,
                  const WaypointAction& a) {
  const Var pano_lp = t.log_softmax_rows(v.pano_logits);
  if (a.pano < 0 || a.pano > kStopIndex) throw InvalidArgument("joint_logprob: bad pano index");
  Var total = t.element(pano_lp, 0, static_cast<std::size_t>(a.pano));
  if (a.is_stop()) return total;
  const auto row = static_cast<std::size_t>(a.pano);

  auto component = [&](HeadMode mode, Var raw, double value, std::span<const double> atoms,
                       bool is_offset, double fixed) -> Var {
    switch (mode) {
      case HeadMode::fixed:
        if (std::abs(value - fixed) > 1e-9)
          throw InvalidArgument("joint_logprob: value differs from the fixed component");
        return {};
      case HeadMode::discrete: {
        int idx = -1;
        for (std::size_t k = 0; k < atoms.size(); ++k)
          if (std::abs(atoms[k] - value) <= 1e-9) idx = static_cast<int>(k);
        if (idx < 0) throw InvalidArgument("joint_logprob: value is not a discrete atom");
        return t.element(t.log_softmax_rows(t.row(raw, row)), 0, static_cast<std::size_t>(idx));
      }
      case HeadMode::continuous: {
        const Var r = t.row(raw, row);
        const GaussianVars g = is_offset ? offset_gaussian(t, r) : distance_gaussian(t, r);
        if (value < g.lower - 1e-12 || value > g.upper + 1e-12)
          throw InvalidArgument("joint_logprob: value outside the truncation bounds");
        return truncnorm_logpdf(t, g, t.scalar(value));
      }
    }
    return {};
  };
  const Var lo = component(cfg.offset_mode, v.offset_raw, a.offset, discrete_offsets(), true,
                           kFixedOffset);
  const Var ld = component(cfg.distance_mode, v.distance_raw, a.distance, discrete_distances(),
                           false, kFixedDistance);
  if (lo.valid()) total = t.add(total, lo);
  if (ld.valid()) total = t.add(total, ld);
  return total;
}

EntropyVars decomposed_entropy(Tape& t, const PolicyVars& v, const ExpressivityConfig& cfg) {
  EntropyVars e;
  e.pano = t.sum(t.neg(t.mul(t.softmax_rows(v.pano_logits), t.log_softmax_rows(v.pano_logits))));
  // Sector weights renormalized over the 12 motion sectors.
  const Var w = t.softmax_rows(t.slice_cols(v.pano_logits, 0, kSectors));  // 1 x 12
  auto weighted = [&](HeadMode mode, Var raw, bool is_offset) -> Var {
    switch (mode) {
      case HeadMode::fixed: return zero(t);
      case HeadMode::discrete: return t.matmul(w, row_entropies(t, raw));
      case HeadMode::continuous: {
        const GaussianVars g = is_offset ? offset_gaussian(t, raw) : distance_gaussian(t, raw);
        return t.matmul(w, truncnorm_entropy(t, g));
      }
    }
    return zero(t);
  };
  e.offset = weighted(cfg.offset_mode, v.offset_raw, true);
  e.distance = weighted(cfg.distance_mode, v.distance_raw, false);
  return e;
}

Var offset_magnitude(Tape& t, const PolicyVars& v, const ExpressivityConfig& cfg,
                     const WaypointAction& a, double u) {
  if (a.is_stop()) return zero(t);
  const auto row = static_cast<std::size_t>(a.pano);
  switch (cfg.offset_mode) {
    case HeadMode::fixed: return zero(t);
    case HeadMode::discrete: {
      Tensor mags(static_cast<std::size_t>(discrete_offsets().size()), 1);
      for (std::size_t k = 0; k < mags.rows; ++k) mags[k] = std::abs(discrete_offsets()[k]);
      return t.matmul(t.softmax_rows(t.row(v.offset_raw, row)), t.constant(std::move(mags)));
    }
    case HeadMode::continuous: {
      const GaussianVars g = offset_gaussian(t, t.row(v.offset_raw, row));
      const double us[] = {u};
      return t.abs(t.truncnorm_quantile(g.mu, g.sigma, g.lower, g.upper, us));
    }
  }
  return zero(t);
}

}  // namespace wpnav
