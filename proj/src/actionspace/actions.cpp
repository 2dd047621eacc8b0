#include "wpnav/actionspace/actions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wpnav/common/error.hpp"

namespace wpnav {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const std::array<double, 7> kOffsetAtoms = {deg2rad(-15.0), deg2rad(-10.0), deg2rad(-5.0),
                                            0.0,            deg2rad(5.0),    deg2rad(10.0),
                                            deg2rad(15.0)};
const std::array<double, 6> kDistanceAtoms = {0.25, 0.75, 1.25, 1.75, 2.25, 2.75};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require_finite(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw NumericError("non-finite raw head output");
}

}  // namespace

std::string to_string(HeadMode m) {
  switch (m) {
    case HeadMode::continuous: return "continuous";
    case HeadMode::discrete: return "discrete";
    case HeadMode::fixed: return "fixed";
  }
  return "fixed";
}

HeadMode head_mode_from_string(const std::string& s) {
  if (s == "continuous" || s == "c") return HeadMode::continuous;
  if (s == "discrete" || s == "d") return HeadMode::discrete;
  if (s == "fixed" || s == "-") return HeadMode::fixed;
  throw InvalidArgument("unknown head mode '" + s + "'");
}

std::string ExpressivityConfig::code() const {
  auto part = [](HeadMode m) {
    return m == HeadMode::continuous ? std::string("c")
           : m == HeadMode::discrete ? std::string("d")
                                     : std::string("fixed");
  };
  return part(distance_mode) + part(offset_mode);
}

ExpressivityConfig ExpressivityConfig::from_code(const std::string& code) {
  for (const auto& row : table_rows())
    if (row.code() == code) return row;
  // Remaining combinations are also representable.
  for (HeadMode d : {HeadMode::continuous, HeadMode::discrete, HeadMode::fixed})
    for (HeadMode o : {HeadMode::continuous, HeadMode::discrete, HeadMode::fixed}) {
      const ExpressivityConfig cfg{o, d};
      if (cfg.code() == code) return cfg;
    }
  throw InvalidArgument("unknown expressivity code '" + code + "'");
}

std::array<ExpressivityConfig, 6> ExpressivityConfig::table_rows() {
  using M = HeadMode;
  // (distance, offset) = (C,C) (D,C) (D,D) (D,-) (-,C) (-,-)
  return {ExpressivityConfig{M::continuous, M::continuous},
          ExpressivityConfig{M::continuous, M::discrete},
          ExpressivityConfig{M::discrete, M::discrete},
          ExpressivityConfig{M::fixed, M::discrete},
          ExpressivityConfig{M::continuous, M::fixed},
          ExpressivityConfig{M::fixed, M::fixed}};
}

std::span<const double> discrete_offsets() { return kOffsetAtoms; }
std::span<const double> discrete_distances() { return kDistanceAtoms; }

Categorical Categorical::from_logits(std::span<const double> logits) {
  Categorical c;
  if (logits.empty()) throw InvalidArgument("categorical needs at least one entry");
  const double m = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(m)) throw NumericError("non-finite categorical logits");
  double total = 0.0;
  for (double l : logits) total += std::exp(l - m);
  const double lse = m + std::log(total);
  c.log_probs_.reserve(logits.size());
  c.probs_.reserve(logits.size());
  for (double l : logits) {
    c.log_probs_.push_back(l - lse);
    c.probs_.push_back(std::exp(l - lse));
  }
  return c;
}

Categorical Categorical::from_probs(std::span<const double> probs) {
  Categorical c;
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw InvalidArgument("categorical probabilities must be nonnegative");
    total += p;
  }
  if (probs.empty() || std::abs(total - 1.0) > 1e-9)
    throw InvalidArgument("categorical probabilities must sum to 1");
  c.probs_.assign(probs.begin(), probs.end());
  for (double p : probs) c.log_probs_.push_back(p > 0.0 ? std::log(p) : kNegInf);
  return c;
}

double Categorical::entropy() const {
  double h = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i)
    if (probs_[i] > 0.0) h -= probs_[i] * log_probs_[i];
  return h;
}

int Categorical::mode() const {
  return static_cast<int>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

int Categorical::sample(Rng& rng) const { return rng.categorical(probs_); }

ComponentHead ComponentHead::continuous(TruncatedGaussian d) {
  d.validate();
  ComponentHead h;
  h.mode_ = HeadMode::continuous;
  h.gaussian_ = d;
  return h;
}

ComponentHead ComponentHead::discrete(Categorical c, std::span<const double> atoms) {
  if (c.size() != atoms.size()) throw InvalidArgument("categorical size does not match atoms");
  ComponentHead h;
  h.mode_ = HeadMode::discrete;
  h.categorical_ = std::move(c);
  h.atoms_ = atoms;
  return h;
}

ComponentHead ComponentHead::fixed(double value) {
  ComponentHead h;
  h.mode_ = HeadMode::fixed;
  h.fixed_ = value;
  return h;
}

int ComponentHead::atom_index(double value) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (std::abs(atoms_[i] - value) < 1e-9) return static_cast<int>(i);
  return -1;
}

double ComponentHead::logprob(double value) const {
  switch (mode_) {
    case HeadMode::continuous: return gaussian_.logprob(value);
    case HeadMode::discrete: {
      const int i = atom_index(value);
      return i < 0 ? kNegInf : categorical_.log_prob(static_cast<std::size_t>(i));
    }
    case HeadMode::fixed: return std::abs(value - fixed_) < 1e-12 ? 0.0 : kNegInf;
  }
  return kNegInf;
}

double ComponentHead::entropy() const {
  switch (mode_) {
    case HeadMode::continuous: return gaussian_.entropy();
    case HeadMode::discrete: return categorical_.entropy();
    case HeadMode::fixed: return 0.0;
  }
  return 0.0;
}

double ComponentHead::mode_value() const {
  switch (mode_) {
    case HeadMode::continuous: return gaussian_.mode();
    case HeadMode::discrete: return atoms_[static_cast<std::size_t>(categorical_.mode())];
    case HeadMode::fixed: return fixed_;
  }
  return fixed_;
}

double ComponentHead::sample(Rng& rng) const {
  switch (mode_) {
    case HeadMode::continuous: return gaussian_.sample(rng);
    case HeadMode::discrete:
      return atoms_[static_cast<std::size_t>(categorical_.sample(rng))];
    case HeadMode::fixed: return fixed_;
  }
  return fixed_;
}

TruncatedGaussian map_offset_head(double raw_mean, double raw_spread) {
  require_finite(raw_mean, raw_spread);
  return {kMaxOffset * std::tanh(raw_mean), kMaxOffset * sigmoid(raw_spread) + kSigmaFloor,
          -kMaxOffset, kMaxOffset};
}

TruncatedGaussian map_distance_head(double raw_mean, double raw_spread) {
  require_finite(raw_mean, raw_spread);
  const double half = 0.5 * (kMaxDistance - kMinDistance);
  return {kMinDistance + (kMaxDistance - kMinDistance) * sigmoid(raw_mean),
          half * sigmoid(raw_spread) + kSigmaFloor, kMinDistance, kMaxDistance};
}

PolarWaypoint compose_waypoint(const WaypointAction& a) {
  if (a.is_stop() || a.pano < 0 || a.pano >= kSectors)
    throw InvalidArgument("STOP is not a motion waypoint");
  return {a.distance, wrap_2pi(RangeScan::sector_center(a.pano) + a.offset)};
}

double joint_logprob(const HeadOutputs& h, const WaypointAction& a) {
  if (a.pano < 0 || a.pano > kStopIndex) return kNegInf;
  const double lp = h.pano.log_prob(static_cast<std::size_t>(a.pano));
  if (a.is_stop()) return lp;
  const auto i = static_cast<std::size_t>(a.pano);
  return lp + h.offset[i].logprob(a.offset) + h.distance[i].logprob(a.distance);
}

EntropyTerms decomposed_entropy(const HeadOutputs& h) {
  EntropyTerms e;
  e.pano = h.pano.entropy();
  double mass = 0.0;
  for (int i = 0; i < kSectors; ++i) mass += h.pano.prob(static_cast<std::size_t>(i));
  if (mass <= 0.0) return e;
  for (int i = 0; i < kSectors; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double w = h.pano.prob(k) / mass;
    e.offset += w * h.offset[k].entropy();
    e.distance += w * h.distance[k].entropy();
  }
  return e;
}

WaypointAction mode_action(const HeadOutputs& h) {
  WaypointAction a;
  a.pano = h.pano.mode();
  if (a.is_stop()) return a;
  const auto i = static_cast<std::size_t>(a.pano);
  a.offset = h.offset[i].mode_value();
  a.distance = h.distance[i].mode_value();
  return a;
}

WaypointAction sample_action(const HeadOutputs& h, Rng& rng) {
  WaypointAction a;
  a.pano = h.pano.sample(rng);
  if (a.is_stop()) return a;
  const auto i = static_cast<std::size_t>(a.pano);
  a.offset = h.offset[i].sample(rng);
  a.distance = h.distance[i].sample(rng);
  return a;
}

}  // namespace wpnav
