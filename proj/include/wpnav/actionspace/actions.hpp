#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "wpnav/actionspace/truncnorm.hpp"
#include "wpnav/common/angles.hpp"
#include "wpnav/common/rng.hpp"
#include "wpnav/world/sensing.hpp"

namespace wpnav {

enum class HeadMode { continuous, discrete, fixed };

std::string to_string(HeadMode m);
HeadMode head_mode_from_string(const std::string& s);

// Offset and distance head modes. The six table configurations are
// addressed by "<distance><offset>" codes: cc, dc, dd, dfixed, fixedc,
// fixedfixed.
struct ExpressivityConfig {
  HeadMode offset_mode = HeadMode::continuous;
  HeadMode distance_mode = HeadMode::continuous;

  std::string code() const;
  static ExpressivityConfig from_code(const std::string& code);
  static std::array<ExpressivityConfig, 6> table_rows();

  friend bool operator==(const ExpressivityConfig&, const ExpressivityConfig&) = default;
};

inline constexpr int kStopIndex = kSectors;      // pano index 12
inline constexpr int kPanoSize = kSectors + 1;   // 12 sectors + STOP
inline const double kMaxOffset = deg2rad(15.0);  // radians
inline constexpr double kMinDistance = 0.25;
inline constexpr double kMaxDistance = 4.0;
inline constexpr double kFixedOffset = 0.0;
inline constexpr double kFixedDistance = 0.25;
inline constexpr double kSigmaFloor = 1e-3;

// Discrete atoms: offsets -15..15 deg step 5 (radians), distances 0.25..2.75 step 0.5.
std::span<const double> discrete_offsets();
std::span<const double> discrete_distances();

class Categorical {
 public:
  Categorical() = default;
  // Normalized softmax of logits.
  static Categorical from_logits(std::span<const double> logits);
  // Throws InvalidArgument unless nonnegative and summing to 1 within 1e-9.
  static Categorical from_probs(std::span<const double> probs);

  std::size_t size() const { return probs_.size(); }
  double prob(std::size_t i) const { return probs_[i]; }
  double log_prob(std::size_t i) const { return log_probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  double entropy() const;
  // Lowest index wins ties.
  int mode() const;
  int sample(Rng& rng) const;

 private:
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

// One offset or distance head of one sector.
class ComponentHead {
 public:
  static ComponentHead continuous(TruncatedGaussian d);
  static ComponentHead discrete(Categorical c, std::span<const double> atoms);
  static ComponentHead fixed(double value);

  HeadMode mode() const { return mode_; }
  const TruncatedGaussian& gaussian() const { return gaussian_; }
  const Categorical& categorical() const { return categorical_; }
  std::span<const double> atoms() const { return atoms_; }
  double fixed_value() const { return fixed_; }

  // -infinity outside the support; constants contribute 0.
  double logprob(double value) const;
  double entropy() const;
  double mode_value() const;
  double sample(Rng& rng) const;
  // Index of a discrete atom matching value, or -1.
  int atom_index(double value) const;

 private:
  HeadMode mode_ = HeadMode::fixed;
  TruncatedGaussian gaussian_;
  Categorical categorical_;
  std::span<const double> atoms_;
  double fixed_ = 0.0;
};

struct HeadOutputs {
  Categorical pano;  // 13 entries, index 12 is STOP
  std::array<ComponentHead, kSectors> offset;
  std::array<ComponentHead, kSectors> distance;
};

struct WaypointAction {
  int pano = kStopIndex;
  double offset = 0.0;    // radians
  double distance = 0.0;  // meters

  bool is_stop() const { return pano == kStopIndex; }
  static WaypointAction stop() { return {}; }
  friend bool operator==(const WaypointAction&, const WaypointAction&) = default;
};

// Relative polar waypoint; theta in [0, 2pi) counter-clockwise from heading.
struct PolarWaypoint {
  double r = 0.0;
  double theta = 0.0;
};

// mean = 15deg * tanh(raw_mean); sigma = 15deg * sigmoid(raw_spread) + floor.
TruncatedGaussian map_offset_head(double raw_mean, double raw_spread);
// mean = 0.25 + 3.75 * sigmoid(raw_mean); sigma = 1.875 * sigmoid(raw_spread) + floor.
TruncatedGaussian map_distance_head(double raw_mean, double raw_spread);

// Throws InvalidArgument for STOP.
PolarWaypoint compose_waypoint(const WaypointAction& a);

double joint_logprob(const HeadOutputs& h, const WaypointAction& a);

struct EntropyTerms {
  double pano = 0.0;
  double offset = 0.0;
  double distance = 0.0;
};

// Offset/distance entropies are the per-sector entropies averaged with the
// Pano sector probabilities renormalized over the 12 motion sectors.
EntropyTerms decomposed_entropy(const HeadOutputs& h);

WaypointAction mode_action(const HeadOutputs& h);
WaypointAction sample_action(const HeadOutputs& h, Rng& rng);

}  // namespace wpnav
