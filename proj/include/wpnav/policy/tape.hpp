#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wpnav/policy/tensor.hpp"

namespace wpnav {

// A trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

// Handle to a tape node.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode differentiation tape over 2-D tensors. Nodes are recorded in
// evaluation order and backward() walks them in exact reverse. Parameter
// leaves accumulate directly into Parameter::grad.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var scalar(double v) { return constant(Tensor(1, 1, v)); }
  // One leaf per parameter per tape.
  Var param(Parameter& p);

  const Tensor& value(Var v) const;
  double item(Var v) const;  // value of a 1 x 1 node
  // Gradient of the last backward() with respect to a node; empty when the
  // node did not influence the loss.
  const Tensor& grad(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1; loss must be 1 x 1.
  void backward(Var loss);

  // Linear algebra and shape operations.
  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var concat_cols(std::span<const Var> parts);
  Var concat_rows(std::span<const Var> parts);
  Var slice_cols(Var a, std::size_t begin, std::size_t end);
  Var slice_rows(Var a, std::size_t begin, std::size_t end);
  Var row(Var a, std::size_t r) { return slice_rows(a, r, r + 1); }
  Var element(Var a, std::size_t r, std::size_t c);
  Var broadcast_rows(Var a, std::size_t n);  // 1 x c -> n x c
  Var gather_rows(Var table, std::span<const int> ids);

  // Elementwise with broadcasting of b: same shape, 1 x c row, or 1 x 1.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var minimum(Var a, Var b);  // ties pick a
  Var maximum(Var a, Var b);  // ties pick a

  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);
  Var neg(Var a) { return scale(a, -1.0); }
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var abs(Var a);
  Var square(Var a);
  Var clamp(Var a, double lo, double hi);

  // Reductions.
  Var sum(Var a);        // -> 1 x 1
  Var mean(Var a);       // -> 1 x 1
  Var mean_rows(Var a);  // r x c -> 1 x c
  Var sum_cols(Var a);   // r x c -> r x 1

  Var softmax_rows(Var a);
  Var log_softmax_rows(Var a);

  // log(Phi(b) - Phi(a)) elementwise, a < b, same shapes.
  Var log_ndtr_diff(Var a, Var b);
  // Inverse-CDF draw x = F^{-1}(u) of N(mu, sigma^2) truncated to [lo, hi],
  // differentiable in mu and sigma through the implicit function theorem.
  Var truncnorm_quantile(Var mu, Var sigma, double lo, double hi, std::span<const double> u);

 private:
  enum class Op : std::uint8_t {
    constant, param, matmul, transpose, concat_cols, concat_rows, slice_cols, slice_rows,
    element, broadcast_rows, gather_rows, add, sub, mul, div, minimum, maximum, scale,
    add_scalar, tanh, sigmoid, exp, log, abs, square, clamp, sum, mean, mean_rows, sum_cols,
    softmax_rows, log_softmax_rows, log_ndtr_diff, truncnorm_quantile
  };

  struct Node {
    Op op = Op::constant;
    bool needs_grad = false;
    int a = -1;
    int b = -1;
    double s0 = 0.0;
    double s1 = 0.0;
    std::size_t i0 = 0;
    std::size_t i1 = 0;
    std::vector<int> inputs;   // concat parts
    std::vector<double> aux;   // saved per-op data
    Tensor value;
    Tensor grad;
    Parameter* param = nullptr;
  };

  Var push(Node n);
  Node& node(Var v);
  const Node& node(Var v) const;
  Tensor& grad_of(int id);
  void backward_node(Node& n);
  Var unary(Op op, Var a, const char* name);
  Var binary(Op op, Var a, Var b, const char* name);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_ids_;
  Tensor empty_;
};

}  // namespace wpnav
