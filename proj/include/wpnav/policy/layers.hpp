#pragma once

#include <deque>
#include <string>
#include <vector>

#include "wpnav/common/rng.hpp"
#include "wpnav/policy/tape.hpp"

namespace wpnav {

// Ordered, name-addressable parameter collection with stable addresses.
class ParamStore {
 public:
  Parameter& add(const std::string& name, std::size_t rows, std::size_t cols);
  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;
  Parameter& at(const std::string& name);

  std::deque<Parameter>& all() { return params_; }
  const std::deque<Parameter>& all() const { return params_; }
  std::size_t count() const;  // total scalar count

  void zero_grad();
  double grad_norm() const;
  // Scales all gradients so the global norm is at most max_norm; returns the
  // norm before clipping.
  double clip_grad_norm(double max_norm);

 private:
  std::deque<Parameter> params_;
};

// Uniform(-g*sqrt(6/(fan_in+fan_out)), +...) initialization.
void xavier_uniform(Tensor& w, Rng& rng, double gain = 1.0);

// y = x W + b; W is in x out, b is 1 x out.
struct Linear {
  Parameter* w = nullptr;
  Parameter* b = nullptr;

  static Linear create(ParamStore& store, const std::string& name, std::size_t in,
                       std::size_t out, Rng& rng, double gain = 1.0);
  static Linear bind(ParamStore& store, const std::string& name);
  Var operator()(Tape& t, Var x) const;
};

// Gated recurrent unit in the PyTorch formulation:
//   r = sigmoid(x W_ir + b_ir + h W_hr + b_hr)
//   z = sigmoid(x W_iz + b_iz + h W_hz + b_hz)
//   n = tanh(x W_in + b_in + r * (h W_hn + b_hn))
//   h' = (1 - z) * n + z * h
// with the three gates packed along the columns of W_i, W_h, b_i, b_h.
struct GruCell {
  Parameter* w_i = nullptr;
  Parameter* w_h = nullptr;
  Parameter* b_i = nullptr;
  Parameter* b_h = nullptr;
  std::size_t hidden = 0;

  static GruCell create(ParamStore& store, const std::string& name, std::size_t in,
                        std::size_t hidden, Rng& rng);
  static GruCell bind(ParamStore& store, const std::string& name);
  Var operator()(Tape& t, Var x, Var h) const;
};

// softmax(q K^T / sqrt(d)) V for a single query row q (1 x d), keys K (n x d)
// and values V (n x d_v).
Var attention(Tape& t, Var keys, Var values, Var query);

struct AdamConfig {
  double learning_rate = 2.0e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1.0e-5;
};

class Adam {
 public:
  Adam(ParamStore& store, AdamConfig cfg);
  void step();
  long steps() const { return t_; }

 private:
  ParamStore& store_;
  AdamConfig cfg_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  long t_ = 0;
};

}  // namespace wpnav
