#include "wpnav/policy/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wpnav/actionspace/truncnorm.hpp"
#include "wpnav/common/error.hpp"
#include "wpnav/kernels/kernels.hpp"

namespace wpnav {
namespace {

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows) + "x" + std::to_string(t.cols);
}

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " +
                   shape_str(b));
}

enum class Bcast { same, row, scalar };

Bcast broadcast_kind(const char* op, const Tensor& a, const Tensor& b) {
  if (a.same_shape(b)) return Bcast::same;
  if (b.rows == 1 && b.cols == 1) return Bcast::scalar;
  if (b.rows == 1 && b.cols == a.cols) return Bcast::row;
  shape_fail(op, a, b);
}

std::size_t b_index(Bcast k, std::size_t i, std::size_t cols) {
  switch (k) {
    case Bcast::same: return i;
    case Bcast::row: return i % cols;
    case Bcast::scalar: return 0;
  }
  return 0;
}

}  // namespace

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return {static_cast<int>(nodes_.size()) - 1};
}

Tape::Node& Tape::node(Var v) {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size())
    throw InvalidArgument("tape: invalid variable");
  return nodes_[static_cast<std::size_t>(v.id)];
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size())
    throw InvalidArgument("tape: invalid variable");
  return nodes_[static_cast<std::size_t>(v.id)];
}

const Tensor& Tape::value(Var v) const {
  const Node& n = node(v);
  return n.param ? n.param->value : n.value;
}

double Tape::item(Var v) const {
  const Tensor& t = value(v);
  if (t.size() != 1) throw ShapeError("item: expected 1x1, got " + shape_str(t));
  return t[0];
}

const Tensor& Tape::grad(Var v) const {
  const Node& n = node(v);
  return n.param ? n.param->grad : n.grad;
}

Tensor& Tape::grad_of(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  Tensor& g = n.param ? n.param->grad : n.grad;
  const Tensor& v = n.param ? n.param->value : n.value;
  if (!g.same_shape(v)) g = Tensor(v.rows, v.cols);
  return g;
}

Var Tape::constant(Tensor value) {
  Node n;
  n.op = Op::constant;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::param(Parameter& p) {
  if (auto it = param_ids_.find(&p); it != param_ids_.end()) return {it->second};
  Node n;
  n.op = Op::param;
  n.param = &p;
  n.needs_grad = true;
  const Var v = push(std::move(n));
  param_ids_[&p] = v.id;
  return v;
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& x = value(a);
  const Tensor& y = value(b);
  if (x.cols != y.rows) shape_fail("matmul", x, y);
  Node n;
  n.op = Op::matmul;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.value = Tensor(x.rows, y.cols);
  kernels::active().gemm_nn(x.rows, y.cols, x.cols, x.data.data(), y.data.data(),
                            n.value.data.data());
  return push(std::move(n));
}

Var Tape::transpose(Var a) {
  const Tensor& x = value(a);
  Node n;
  n.op = Op::transpose;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = Tensor(x.cols, x.rows);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) n.value(c, r) = x(r, c);
  return push(std::move(n));
}

Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const std::size_t rows = value(parts[0]).rows;
  std::size_t cols = 0;
  Node n;
  n.op = Op::concat_cols;
  for (Var p : parts) {
    const Tensor& t = value(p);
    if (t.rows != rows) shape_fail("concat_cols", value(parts[0]), t);
    cols += t.cols;
    n.inputs.push_back(p.id);
    n.needs_grad = n.needs_grad || node(p).needs_grad;
  }
  n.value = Tensor(rows, cols);
  std::size_t off = 0;
  for (Var p : parts) {
    const Tensor& t = value(p);
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(t.data.begin() + static_cast<std::ptrdiff_t>(r * t.cols), t.cols,
                  n.value.data.begin() + static_cast<std::ptrdiff_t>(r * cols + off));
    off += t.cols;
  }
  return push(std::move(n));
}

Var Tape::concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const std::size_t cols = value(parts[0]).cols;
  std::size_t rows = 0;
  Node n;
  n.op = Op::concat_rows;
  for (Var p : parts) {
    const Tensor& t = value(p);
    if (t.cols != cols) shape_fail("concat_rows", value(parts[0]), t);
    rows += t.rows;
    n.inputs.push_back(p.id);
    n.needs_grad = n.needs_grad || node(p).needs_grad;
  }
  n.value = Tensor(rows, cols);
  std::size_t off = 0;
  for (Var p : parts) {
    const Tensor& t = value(p);
    std::copy(t.data.begin(), t.data.end(), n.value.data.begin() + static_cast<std::ptrdiff_t>(off));
    off += t.size();
  }
  return push(std::move(n));
}

Var Tape::slice_cols(Var a, std::size_t begin, std::size_t end) {
  const Tensor& x = value(a);
  if (begin >= end || end > x.cols)
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") out of " + shape_str(x));
  Node n;
  n.op = Op::slice_cols;
  n.a = a.id;
  n.i0 = begin;
  n.i1 = end;
  n.needs_grad = node(a).needs_grad;
  n.value = Tensor(x.rows, end - begin);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = begin; c < end; ++c) n.value(r, c - begin) = x(r, c);
  return push(std::move(n));
}

Var Tape::slice_rows(Var a, std::size_t begin, std::size_t end) {
  const Tensor& x = value(a);
  if (begin >= end || end > x.rows)
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") out of " + shape_str(x));
  Node n;
  n.op = Op::slice_rows;
  n.a = a.id;
  n.i0 = begin;
  n.i1 = end;
  n.needs_grad = node(a).needs_grad;
  n.value = Tensor(end - begin, x.cols);
  std::copy(x.data.begin() + static_cast<std::ptrdiff_t>(begin * x.cols),
            x.data.begin() + static_cast<std::ptrdiff_t>(end * x.cols), n.value.data.begin());
  return push(std::move(n));
}

Var Tape::element(Var a, std::size_t r, std::size_t c) {
  const Tensor& x = value(a);
  if (r >= x.rows || c >= x.cols)
    throw ShapeError("element: index out of " + shape_str(x));
  Node n;
  n.op = Op::element;
  n.a = a.id;
  n.i0 = r;
  n.i1 = c;
  n.needs_grad = node(a).needs_grad;
  n.value = Tensor(1, 1, x(r, c));
  return push(std::move(n));
}

Var Tape::broadcast_rows(Var a, std::size_t count) {
  const Tensor& x = value(a);
  if (x.rows != 1) throw ShapeError("broadcast_rows: expected a row, got " + shape_str(x));
  Node n;
  n.op = Op::broadcast_rows;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = Tensor(count, x.cols);
  for (std::size_t r = 0; r < count; ++r)
    std::copy(x.data.begin(), x.data.end(),
              n.value.data.begin() + static_cast<std::ptrdiff_t>(r * x.cols));
  return push(std::move(n));
}

Var Tape::gather_rows(Var table, std::span<const int> ids) {
  const Tensor& t = value(table);
  if (ids.empty()) throw ShapeError("gather_rows: no indices");
  Node n;
  n.op = Op::gather_rows;
  n.a = table.id;
  n.needs_grad = node(table).needs_grad;
  n.value = Tensor(ids.size(), t.cols);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= t.rows)
      throw InvalidArgument("gather_rows: index " + std::to_string(ids[i]) + " out of range");
    n.inputs.push_back(ids[i]);
    for (std::size_t c = 0; c < t.cols; ++c)
      n.value(i, c) = t(static_cast<std::size_t>(ids[i]), c);
  }
  return push(std::move(n));
}

Var Tape::binary(Op op, Var a, Var b, const char* name) {
  const Tensor& x = value(a);
  const Tensor& y = value(b);
  const Bcast k = broadcast_kind(name, x, y);
  Node n;
  n.op = op;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.value = Tensor(x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i];
    const double w = y[b_index(k, i, x.cols)];
    double r = 0.0;
    switch (op) {
      case Op::add: r = u + w; break;
      case Op::sub: r = u - w; break;
      case Op::mul: r = u * w; break;
      case Op::div: r = u / w; break;
      case Op::minimum: r = w < u ? w : u; break;
      case Op::maximum: r = w > u ? w : u; break;
      default: break;
    }
    n.value[i] = r;
  }
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) { return binary(Op::add, a, b, "add"); }
Var Tape::sub(Var a, Var b) { return binary(Op::sub, a, b, "sub"); }
Var Tape::mul(Var a, Var b) { return binary(Op::mul, a, b, "mul"); }
Var Tape::div(Var a, Var b) { return binary(Op::div, a, b, "div"); }
Var Tape::minimum(Var a, Var b) { return binary(Op::minimum, a, b, "minimum"); }
Var Tape::maximum(Var a, Var b) { return binary(Op::maximum, a, b, "maximum"); }

Var Tape::unary(Op op, Var a, const char*) {
  const Tensor& x = value(a);
  Node n;
  n.op = op;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = Tensor(x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i];
    double r = 0.0;
    switch (op) {
      case Op::tanh: r = std::tanh(u); break;
      case Op::sigmoid:
        r = u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
        break;
      case Op::exp: r = std::exp(u); break;
      case Op::log: r = std::log(u); break;
      case Op::abs: r = std::abs(u); break;
      case Op::square: r = u * u; break;
      default: break;
    }
    n.value[i] = r;
  }
  return push(std::move(n));
}

Var Tape::tanh(Var a) { return unary(Op::tanh, a, "tanh"); }
Var Tape::sigmoid(Var a) { return unary(Op::sigmoid, a, "sigmoid"); }
Var Tape::exp(Var a) { return unary(Op::exp, a, "exp"); }
Var Tape::log(Var a) { return unary(Op::log, a, "log"); }
Var Tape::abs(Var a) { return unary(Op::abs, a, "abs"); }
Var Tape::square(Var a) { return unary(Op::square, a, "square"); }

Var Tape::scale(Var a, double s) {
  const Tensor& x = value(a);
  Node n;
  n.op = Op::scale;
  n.a = a.id;
  n.s0 = s;
  n.needs_grad = node(a).needs_grad;
  n.value = x;
  for (double& v : n.value.data) v *= s;
  return push(std::move(n));
}

Var Tape::add_scalar(Var a, double s) {
  const Tensor& x = value(a);
  Node n;
  n.op = Op::add_scalar;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = x;
  for (double& v : n.value.data) v += s;
  return push(std::move(n));
}

Var Tape::clamp(Var a, double lo, double hi) {
  if (!(lo <= hi)) throw InvalidArgument("clamp: lo > hi");
  const Tensor& x = value(a);
  Node n;
  n.op = Op::clamp;
  n.a = a.id;
  n.s0 = lo;
  n.s1 = hi;
  n.needs_grad = node(a).needs_grad;
  n.value = x;
  for (double& v : n.value.data) v = std::clamp(v, lo, hi);
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  const Tensor& x = value(a);
  Node n;
  n.op = Op::sum;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  double s = 0.0;
  for (double v : x.data) s += v;
  n.value = Tensor(1, 1, s);
  return push(std::move(n));
}

Var Tape::mean(Var a) {
  const Tensor& x = value(a);
  if (x.empty()) throw ShapeError("mean: empty input");
  Node n;
  n.op = Op::mean;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  double s = 0.0;
  for (double v : x.data) s += v;
  n.value = Tensor(1, 1, s / static_cast<double>(x.size()));
  return push(std::move(n));
}

Var Tape::mean_rows(Var a) {
  const Tensor& x = value(a);
  if (x.rows == 0) throw ShapeError("mean_rows: empty input");
  Node n;
  n.op = Op::mean_rows;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = Tensor(1, x.cols);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) n.value[c] += x(r, c);
  for (double& v : n.value.data) v /= static_cast<double>(x.rows);
  return push(std::move(n));
}

Var Tape::sum_cols(Var a) {
  const Tensor& x = value(a);
  Node n;
  n.op = Op::sum_cols;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = Tensor(x.rows, 1);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) n.value[r] += x(r, c);
  return push(std::move(n));
}

Var Tape::softmax_rows(Var a) {
  const Tensor& x = value(a);
  if (x.cols == 0) throw ShapeError("softmax_rows: empty rows");
  Node n;
  n.op = Op::softmax_rows;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = Tensor(x.rows, x.cols);
  for (std::size_t r = 0; r < x.rows; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < x.cols; ++c) mx = std::max(mx, x(r, c));
    double z = 0.0;
    for (std::size_t c = 0; c < x.cols; ++c) z += (n.value(r, c) = std::exp(x(r, c) - mx));
    for (std::size_t c = 0; c < x.cols; ++c) n.value(r, c) /= z;
  }
  return push(std::move(n));
}

Var Tape::log_softmax_rows(Var a) {
  const Tensor& x = value(a);
  if (x.cols == 0) throw ShapeError("log_softmax_rows: empty rows");
  Node n;
  n.op = Op::log_softmax_rows;
  n.a = a.id;
  n.needs_grad = node(a).needs_grad;
  n.value = Tensor(x.rows, x.cols);
  for (std::size_t r = 0; r < x.rows; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < x.cols; ++c) mx = std::max(mx, x(r, c));
    double z = 0.0;
    for (std::size_t c = 0; c < x.cols; ++c) z += std::exp(x(r, c) - mx);
    const double lz = mx + std::log(z);
    for (std::size_t c = 0; c < x.cols; ++c) n.value(r, c) = x(r, c) - lz;
  }
  return push(std::move(n));
}

Var Tape::log_ndtr_diff(Var a, Var b) {
  const Tensor& x = value(a);
  const Tensor& y = value(b);
  if (!x.same_shape(y)) shape_fail("log_ndtr_diff", x, y);
  Node n;
  n.op = Op::log_ndtr_diff;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = node(a).needs_grad || node(b).needs_grad;
  n.value = Tensor(x.rows, x.cols);
  n.aux.resize(2 * x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = wpnav::log_ndtr_diff(x[i], y[i]);
    n.value[i] = v;
    // d/da = -phi(a)/Z, d/db = phi(b)/Z, formed in log space.
    n.aux[2 * i] = std::isfinite(x[i]) ? -std::exp(normal_logpdf(x[i]) - v) : 0.0;
    n.aux[2 * i + 1] = std::isfinite(y[i]) ? std::exp(normal_logpdf(y[i]) - v) : 0.0;
  }
  return push(std::move(n));
}

Var Tape::truncnorm_quantile(Var mu, Var sigma, double lo, double hi,
                             std::span<const double> u) {
  const Tensor& m = value(mu);
  const Tensor& s = value(sigma);
  if (!m.same_shape(s)) shape_fail("truncnorm_quantile", m, s);
  if (u.size() != m.size())
    throw ShapeError("truncnorm_quantile: " + std::to_string(u.size()) + " uniforms for " +
                     shape_str(m));
  Node n;
  n.op = Op::truncnorm_quantile;
  n.a = mu.id;
  n.b = sigma.id;
  n.needs_grad = node(mu).needs_grad || node(sigma).needs_grad;
  n.value = Tensor(m.rows, m.cols);
  n.aux.resize(2 * m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const TruncatedGaussian d{m[i], s[i], lo, hi};
    d.validate();
    const double x = d.quantile(u[i]);
    n.value[i] = x;
    // Implicit differentiation of F(x; mu, sigma) = u. With xi, alpha, beta
    // the standardized sample and bounds:
    //   dx/dmu    = 1 - [(1-u) phi(alpha) + u phi(beta)] / phi(xi)
    //   dx/dsigma = xi - [(1-u) alpha phi(alpha) + u beta phi(beta)] / phi(xi)
    // The density ratios are formed in log space.
    const double xi = (x - d.mu) / d.sigma;
    const double al = d.alpha();
    const double be = d.beta();
    auto weighted_ratio = [&](double w, double z) {
      if (w <= 0.0 || !std::isfinite(z)) return 0.0;
      return std::exp(std::log(w) + 0.5 * (xi * xi - z * z));
    };
    const double ra = weighted_ratio(1.0 - u[i], al);
    const double rb = weighted_ratio(u[i], be);
    n.aux[2 * i] = 1.0 - ra - rb;
    n.aux[2 * i + 1] = xi - al * ra - be * rb;
  }
  return push(std::move(n));
}

void Tape::backward(Var loss) {
  const Tensor& l = value(loss);
  if (l.size() != 1) throw ShapeError("backward: loss must be 1x1, got " + shape_str(l));
  for (Node& n : nodes_)
    if (!n.param) n.grad = Tensor();
  grad_of(loss.id)[0] += 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.needs_grad || n.op == Op::param || n.op == Op::constant) continue;
    if (n.grad.empty()) continue;
    backward_node(n);
  }
}

void Tape::backward_node(Node& n) {
  // grad_of may allocate on other nodes but never reallocates nodes_, so
  // references to n stay valid.
  const Tensor& g = n.grad;
  auto wants = [&](int id) { return id >= 0 && nodes_[static_cast<std::size_t>(id)].needs_grad; };
  auto val = [&](int id) -> const Tensor& { return value(Var{id}); };
  const auto& K = kernels::active();

  switch (n.op) {
    case Op::constant:
    case Op::param:
      break;
    case Op::matmul: {
      const Tensor& x = val(n.a);
      const Tensor& y = val(n.b);
      if (wants(n.a))
        K.gemm_nt(x.rows, x.cols, y.cols, g.data.data(), y.data.data(), grad_of(n.a).data.data());
      if (wants(n.b))
        K.gemm_tn(x.cols, y.cols, x.rows, x.data.data(), g.data.data(), grad_of(n.b).data.data());
      break;
    }
    case Op::transpose: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = 0; c < g.cols; ++c) ga(c, r) += g(r, c);
      break;
    }
    case Op::concat_cols: {
      std::size_t off = 0;
      for (int id : n.inputs) {
        const std::size_t w = val(id).cols;
        if (wants(id)) {
          Tensor& gi = grad_of(id);
          for (std::size_t r = 0; r < g.rows; ++r)
            for (std::size_t c = 0; c < w; ++c) gi(r, c) += g(r, off + c);
        }
        off += w;
      }
      break;
    }
    case Op::concat_rows: {
      std::size_t off = 0;
      for (int id : n.inputs) {
        const std::size_t sz = val(id).size();
        if (wants(id)) {
          Tensor& gi = grad_of(id);
          for (std::size_t i = 0; i < sz; ++i) gi[i] += g[off + i];
        }
        off += sz;
      }
      break;
    }
    case Op::slice_cols: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = 0; c < g.cols; ++c) ga(r, n.i0 + c) += g(r, c);
      break;
    }
    case Op::slice_rows: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[n.i0 * g.cols + i] += g[i];
      break;
    }
    case Op::element: {
      if (wants(n.a)) grad_of(n.a)(n.i0, n.i1) += g[0];
      break;
    }
    case Op::broadcast_rows: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = 0; c < g.cols; ++c) ga[c] += g(r, c);
      break;
    }
    case Op::gather_rows: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      for (std::size_t i = 0; i < n.inputs.size(); ++i)
        for (std::size_t c = 0; c < g.cols; ++c)
          ga(static_cast<std::size_t>(n.inputs[i]), c) += g(i, c);
      break;
    }
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::minimum:
    case Op::maximum: {
      const Tensor& x = val(n.a);
      const Tensor& y = val(n.b);
      const Bcast k = broadcast_kind("backward", x, y);
      Tensor* ga = wants(n.a) ? &grad_of(n.a) : nullptr;
      Tensor* gb = wants(n.b) ? &grad_of(n.b) : nullptr;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t j = b_index(k, i, x.cols);
        const double u = x[i];
        const double w = y[j];
        double da = 0.0;
        double db = 0.0;
        switch (n.op) {
          case Op::add: da = g[i]; db = g[i]; break;
          case Op::sub: da = g[i]; db = -g[i]; break;
          case Op::mul: da = g[i] * w; db = g[i] * u; break;
          case Op::div: da = g[i] / w; db = -g[i] * u / (w * w); break;
          case Op::minimum: (w < u ? db : da) = g[i]; break;
          case Op::maximum: (w > u ? db : da) = g[i]; break;
          default: break;
        }
        if (ga) (*ga)[i] += da;
        if (gb) (*gb)[j] += db;
      }
      break;
    }
    case Op::scale: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += n.s0 * g[i];
      break;
    }
    case Op::add_scalar: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      break;
    }
    case Op::tanh:
    case Op::sigmoid:
    case Op::exp:
    case Op::log:
    case Op::abs:
    case Op::square:
    case Op::clamp: {
      if (!wants(n.a)) break;
      const Tensor& x = val(n.a);
      Tensor& ga = grad_of(n.a);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = n.value[i];
        double d = 0.0;
        switch (n.op) {
          case Op::tanh: d = 1.0 - y * y; break;
          case Op::sigmoid: d = y * (1.0 - y); break;
          case Op::exp: d = y; break;
          case Op::log: d = 1.0 / x[i]; break;
          case Op::abs: d = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0); break;
          case Op::square: d = 2.0 * x[i]; break;
          case Op::clamp: d = (x[i] >= n.s0 && x[i] <= n.s1) ? 1.0 : 0.0; break;
          default: break;
        }
        ga[i] += d * g[i];
      }
      break;
    }
    case Op::sum:
    case Op::mean: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      const double d = n.op == Op::sum ? g[0] : g[0] / static_cast<double>(ga.size());
      for (double& v : ga.data) v += d;
      break;
    }
    case Op::mean_rows: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      const double inv = 1.0 / static_cast<double>(ga.rows);
      for (std::size_t r = 0; r < ga.rows; ++r)
        for (std::size_t c = 0; c < ga.cols; ++c) ga(r, c) += g[c] * inv;
      break;
    }
    case Op::sum_cols: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      for (std::size_t r = 0; r < ga.rows; ++r)
        for (std::size_t c = 0; c < ga.cols; ++c) ga(r, c) += g[r];
      break;
    }
    case Op::softmax_rows: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      const Tensor& y = n.value;
      for (std::size_t r = 0; r < y.rows; ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < y.cols; ++c) dot += g(r, c) * y(r, c);
        for (std::size_t c = 0; c < y.cols; ++c) ga(r, c) += y(r, c) * (g(r, c) - dot);
      }
      break;
    }
    case Op::log_softmax_rows: {
      if (!wants(n.a)) break;
      Tensor& ga = grad_of(n.a);
      const Tensor& y = n.value;
      for (std::size_t r = 0; r < y.rows; ++r) {
        double gs = 0.0;
        for (std::size_t c = 0; c < y.cols; ++c) gs += g(r, c);
        for (std::size_t c = 0; c < y.cols; ++c) ga(r, c) += g(r, c) - std::exp(y(r, c)) * gs;
      }
      break;
    }
    case Op::log_ndtr_diff:
    case Op::truncnorm_quantile: {
      Tensor* ga = wants(n.a) ? &grad_of(n.a) : nullptr;
      Tensor* gb = wants(n.b) ? &grad_of(n.b) : nullptr;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (ga) (*ga)[i] += n.aux[2 * i] * g[i];
        if (gb) (*gb)[i] += n.aux[2 * i + 1] * g[i];
      }
      break;
    }
  }
}

}  // namespace wpnav
