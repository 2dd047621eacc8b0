#include "wpnav/policy/layers.hpp"

#include <array>
#include <cmath>

#include "wpnav/common/error.hpp"

namespace wpnav {

Parameter& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols) {
  if (find(name)) throw InvalidArgument("duplicate parameter " + name);
  Parameter& p = params_.emplace_back();
  p.name = name;
  p.value = Tensor(rows, cols);
  p.grad = Tensor(rows, cols);
  return p;
}

Parameter* ParamStore::find(const std::string& name) {
  for (auto& p : params_)
    if (p.name == name) return &p;
  return nullptr;
}

const Parameter* ParamStore::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return &p;
  return nullptr;
}

Parameter& ParamStore::at(const std::string& name) {
  Parameter* p = find(name);
  if (!p) throw InvalidArgument("unknown parameter " + name);
  return *p;
}

std::size_t ParamStore::count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) {
    if (!p.grad.same_shape(p.value)) p.grad = Tensor(p.value.rows, p.value.cols);
    p.grad.zero();
  }
}

double ParamStore::grad_norm() const {
  double ss = 0.0;
  for (const auto& p : params_)
    for (double g : p.grad.data) ss += g * g;
  return std::sqrt(ss);
}

double ParamStore::clip_grad_norm(double max_norm) {
  const double norm = grad_norm();
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
  if (norm > max_norm) {
    const double s = max_norm / (norm + 1e-12);
    for (auto& p : params_)
      for (double& g : p.grad.data) g *= s;
  }
  return norm;
}

void xavier_uniform(Tensor& w, Rng& rng, double gain) {
  const double bound =
      gain * std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
  for (double& v : w.data) v = rng.uniform(-bound, bound);
}

Linear Linear::create(ParamStore& store, const std::string& name, std::size_t in,
                      std::size_t out, Rng& rng, double gain) {
  Linear l;
  l.w = &store.add(name + ".w", in, out);
  l.b = &store.add(name + ".b", 1, out);
  xavier_uniform(l.w->value, rng, gain);
  return l;
}

Linear Linear::bind(ParamStore& store, const std::string& name) {
  return {&store.at(name + ".w"), &store.at(name + ".b")};
}

Var Linear::operator()(Tape& t, Var x) const {
  return t.add(t.matmul(x, t.param(*w)), t.param(*b));
}

GruCell GruCell::create(ParamStore& store, const std::string& name, std::size_t in,
                        std::size_t hidden, Rng& rng) {
  GruCell g;
  g.hidden = hidden;
  g.w_i = &store.add(name + ".w_i", in, 3 * hidden);
  g.w_h = &store.add(name + ".w_h", hidden, 3 * hidden);
  g.b_i = &store.add(name + ".b_i", 1, 3 * hidden);
  g.b_h = &store.add(name + ".b_h", 1, 3 * hidden);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (Parameter* p : {g.w_i, g.w_h})
    for (double& v : p->value.data) v = rng.uniform(-bound, bound);
  return g;
}

GruCell GruCell::bind(ParamStore& store, const std::string& name) {
  GruCell g;
  g.w_i = &store.at(name + ".w_i");
  g.w_h = &store.at(name + ".w_h");
  g.b_i = &store.at(name + ".b_i");
  g.b_h = &store.at(name + ".b_h");
  g.hidden = g.w_h->value.rows;
  return g;
}

Var GruCell::operator()(Tape& t, Var x, Var h) const {
  const std::size_t H = hidden;
  if (t.value(x).cols != w_i->value.rows)
    throw ShapeError("gru_cell: input width " + std::to_string(t.value(x).cols) +
                     " does not match " + std::to_string(w_i->value.rows));
  if (t.value(h).cols != H)
    throw ShapeError("gru_cell: hidden width " + std::to_string(t.value(h).cols) +
                     " does not match " + std::to_string(H));
  const Var gi = t.add(t.matmul(x, t.param(*w_i)), t.param(*b_i));
  const Var gh = t.add(t.matmul(h, t.param(*w_h)), t.param(*b_h));
  const Var r = t.sigmoid(t.add(t.slice_cols(gi, 0, H), t.slice_cols(gh, 0, H)));
  const Var z = t.sigmoid(t.add(t.slice_cols(gi, H, 2 * H), t.slice_cols(gh, H, 2 * H)));
  const Var n = t.tanh(t.add(t.slice_cols(gi, 2 * H, 3 * H), t.mul(r, t.slice_cols(gh, 2 * H, 3 * H))));
  // h' = n + z * (h - n)
  return t.add(n, t.mul(z, t.sub(h, n)));
}

Var attention(Tape& t, Var keys, Var values, Var query) {
  const Tensor& k = t.value(keys);
  const Tensor& v = t.value(values);
  const Tensor& q = t.value(query);
  if (k.rows == 0) throw InvalidArgument("attention: empty key set");
  if (q.rows != 1 || q.cols != k.cols || v.rows != k.rows)
    throw ShapeError("attention: query " + std::to_string(q.rows) + "x" + std::to_string(q.cols) +
                     ", keys " + std::to_string(k.rows) + "x" + std::to_string(k.cols) +
                     ", values " + std::to_string(v.rows) + "x" + std::to_string(v.cols));
  const double inv = 1.0 / std::sqrt(static_cast<double>(k.cols));
  const Var scores = t.scale(t.matmul(query, t.transpose(keys)), inv);  // 1 x n
  return t.matmul(t.softmax_rows(scores), values);
}

Adam::Adam(ParamStore& store, AdamConfig cfg) : store_(store), cfg_(cfg) {
  for (const auto& p : store_.all()) {
    m_.emplace_back(p.value.rows, p.value.cols);
    v_.emplace_back(p.value.rows, p.value.cols);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  std::size_t i = 0;
  for (auto& p : store_.all()) {
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    ++i;
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g;
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g * g;
      const double mh = m[j] / bc1;
      const double vh = v[j] / bc2;
      p.value[j] -= cfg_.learning_rate * mh / (std::sqrt(vh) + cfg_.epsilon);
    }
  }
}

}  // namespace wpnav
