#pragma once

#include "wpnav/actionspace/actions.hpp"
#include "wpnav/policy/policy.hpp"
#include "wpnav/policy/tape.hpp"

namespace wpnav {

// Differentiable counterparts of the action-space functions, evaluated on
// the raw head outputs recorded by Policy::forward.

// Truncated-Gaussian parameters of the offset or distance head (12 x 1 each).
struct GaussianVars {
  Var mu;
  Var sigma;
  double lower = 0.0;
  double upper = 0.0;
};
GaussianVars offset_gaussian(Tape& t, Var raw);
GaussianVars distance_gaussian(Tape& t, Var raw);

// Log density at constant points x (same shape as mu), and entropies.
Var truncnorm_logpdf(Tape& t, const GaussianVars& g, Var x);
Var truncnorm_entropy(Tape& t, const GaussianVars& g);

Var joint_logprob(Tape& t, const PolicyVars& v, const ExpressivityConfig& cfg,
                  const WaypointAction& a);

struct EntropyVars {
  Var pano;
  Var offset;
  Var distance;
};
EntropyVars decomposed_entropy(Tape& t, const PolicyVars& v, const ExpressivityConfig& cfg);

// |offset| of the chosen sector: the reparameterized draw at uniform u for
// continuous heads, the expected magnitude for discrete heads, 0 when fixed
// or for STOP.
Var offset_magnitude(Tape& t, const PolicyVars& v, const ExpressivityConfig& cfg,
                     const WaypointAction& a, double u);

}  // namespace wpnav
