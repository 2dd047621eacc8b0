#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wpnav/actionspace/actions.hpp"
#include "wpnav/policy/layers.hpp"
#include "wpnav/world/sensing.hpp"

namespace wpnav {

struct PolicyConfig {
  std::size_t feature_dim = 32;  // per-sector feature
  std::size_t vis_hidden = 64;
  std::size_t act_hidden = 64;
  std::size_t embed_dim = 16;
  // Adds the goal's relative bearing and distance to every sector input.
  bool goal_cue = true;
  // Sector angle features; disabling them makes the encoder rotation-equivariant.
  bool pose_features = true;
  ExpressivityConfig expressivity;

  std::size_t obs_dim() const { return goal_cue ? 4 : 1; }
  std::size_t sector_input_dim() const { return 2 * obs_dim() + 2; }
  std::string canonical() const;
  std::string digest() const;
  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

// Goal position relative to the agent: distance and counter-clockwise bearing.
struct GoalCue {
  double distance = 0.0;
  double bearing = 0.0;
};

struct Observation {
  Tensor sectors;  // kSectors x obs_dim
  std::vector<int> instruction;
};

// Per-sector rows [range / max_range, cos d_i, sin d_i, min(goal distance,
// max_range) / max_range], where d_i is the goal bearing relative to the
// sector center. The goal columns are present only with goal_cue.
Observation make_observation(const PolicyConfig& cfg, const RangeScan& scan,
                             const std::vector<int>& instruction,
                             const std::optional<GoalCue>& goal);

struct PolicyState {
  Tensor h_vis;        // 1 x vis_hidden
  Tensor h_a;          // 1 x act_hidden
  Tensor prev_action;  // 1 x 4: [r, sin sector angle, cos sector angle, offset]
  Tensor prev_sector;  // 1 x obs_dim: observation row of the last chosen sector

  static PolicyState initial(const PolicyConfig& cfg);
  friend bool operator==(const PolicyState&, const PolicyState&) = default;
};

// Tape handles of one forward step.
struct PolicyVars {
  Var pano_logits;   // 1 x 13, index 12 is STOP
  Var offset_raw;    // 12 x {2 continuous, 7 discrete}; invalid when fixed
  Var distance_raw;  // 12 x {2 continuous, 6 discrete}; invalid when fixed
  Var value;         // 1 x 1
  Var h_vis;
  Var h_a;
};

struct PolicyOutput {
  Tensor pano_logits;
  Tensor offset_raw;
  Tensor distance_raw;
  double value = 0.0;
  Tensor h_vis;
  Tensor h_a;
};

class Policy {
 public:
  Policy(const PolicyConfig& cfg, std::uint64_t init_seed);
  // Same architecture with all parameters set to zero.
  static Policy zeros(const PolicyConfig& cfg);

  Policy(const Policy& other);
  Policy& operator=(const Policy& other);

  const PolicyConfig& config() const { return cfg_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }

  // Records one step on the tape. Recurrent inputs come from `h_vis`/`h_a`
  // when valid (unrolled training), otherwise from `state` as constants.
  PolicyVars forward(Tape& t, const Observation& obs, const PolicyState& state,
                     Var h_vis = {}, Var h_a = {}) const;
  PolicyOutput act(const Observation& obs, const PolicyState& state) const;

  // State for the next step after taking `action` from `obs`.
  PolicyState advance(const PolicyOutput& out, const Observation& obs,
                      const WaypointAction& action) const;

 private:
  void bind();

  PolicyConfig cfg_;
  ParamStore store_;
  Linear enc1_, enc2_, query_, key_, stop_, value_, offset_, distance_;
  GruCell gru_vis_, gru_act_;
  Parameter* embed_ = nullptr;
  Parameter* pano_ = nullptr;
};

// Distributions for the configured expressivity from raw head values.
HeadOutputs head_outputs(const PolicyOutput& out, const ExpressivityConfig& cfg);

}  // namespace wpnav
