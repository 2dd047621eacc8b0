#include "wpnav/policy/policy.hpp"

#include <cmath>
#include <sstream>

#include "wpnav/common/digest.hpp"
#include "wpnav/common/error.hpp"
#include "wpnav/world/episode.hpp"

namespace wpnav {
namespace {

std::size_t head_width(HeadMode m, std::size_t atoms) {
  switch (m) {
    case HeadMode::continuous: return 2;
    case HeadMode::discrete: return atoms;
    case HeadMode::fixed: return 0;
  }
  return 0;
}

Tensor row_of(const Tensor& t, std::size_t r) {
  Tensor out(1, t.cols);
  for (std::size_t c = 0; c < t.cols; ++c) out[c] = t(r, c);
  return out;
}

}  // namespace

std::string PolicyConfig::canonical() const {
  std::ostringstream os;
  os << "feature_dim=" << feature_dim << ";vis_hidden=" << vis_hidden
     << ";act_hidden=" << act_hidden << ";embed_dim=" << embed_dim
     << ";goal_cue=" << goal_cue << ";pose_features=" << pose_features
     << ";expressivity=" << expressivity.code() << ";vocab=" << Vocabulary::size();
  return os.str();
}

std::string PolicyConfig::digest() const { return digest_hex(canonical()); }

Observation make_observation(const PolicyConfig& cfg, const RangeScan& scan,
                             const std::vector<int>& instruction,
                             const std::optional<GoalCue>& goal) {
  if (cfg.goal_cue && !goal) throw InvalidArgument("observation needs a goal cue");
  Observation obs;
  obs.instruction = instruction;
  obs.sectors = Tensor(kSectors, cfg.obs_dim());
  const double range = scan.max_range > 0.0 ? scan.max_range : 1.0;
  for (int i = 0; i < kSectors; ++i) {
    const auto r = static_cast<std::size_t>(i);
    obs.sectors(r, 0) = scan.readings[r] / range;
    if (cfg.goal_cue) {
      const double d = goal->bearing - RangeScan::sector_center(i);
      obs.sectors(r, 1) = std::cos(d);
      obs.sectors(r, 2) = std::sin(d);
      obs.sectors(r, 3) = std::min(goal->distance, range) / range;
    }
  }
  return obs;
}

PolicyState PolicyState::initial(const PolicyConfig& cfg) {
  return {Tensor(1, cfg.vis_hidden), Tensor(1, cfg.act_hidden), Tensor(1, 4),
          Tensor(1, cfg.obs_dim())};
}

Policy::Policy(const PolicyConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
  Rng rng(init_seed);
  const std::size_t F = cfg.feature_dim;
  const std::size_t E = cfg.embed_dim;
  const std::size_t Hv = cfg.vis_hidden;
  const std::size_t Ha = cfg.act_hidden;
  const double tanh_gain = 5.0 / 3.0;
  Linear::create(store_, "encoder.l1", cfg.sector_input_dim(), F, rng, tanh_gain);
  Linear::create(store_, "encoder.l2", F, F, rng, tanh_gain);
  GruCell::create(store_, "gru_vis", F + cfg.obs_dim() + 4, Hv, rng);
  Parameter& embed = store_.add("instruction.embedding", Vocabulary::size(), E);
  for (double& v : embed.value.data) v = rng.normal() * 0.5;
  Linear::create(store_, "instruction.query", Hv, E, rng);
  Linear::create(store_, "pano.key", F, E, rng);
  GruCell::create(store_, "gru_act", F + E + Hv + 4, Ha, rng);
  Parameter& pano = store_.add("pano.w", Ha, F);
  xavier_uniform(pano.value, rng);
  Linear::create(store_, "pano.stop", Ha, 1, rng);
  Linear::create(store_, "value", Ha, 1, rng);
  const auto& ex = cfg.expressivity;
  if (ex.offset_mode != HeadMode::fixed)
    Linear::create(store_, "head.offset", F + Ha,
                   head_width(ex.offset_mode, discrete_offsets().size()), rng, 0.01);
  if (ex.distance_mode != HeadMode::fixed)
    Linear::create(store_, "head.distance", F + Ha,
                   head_width(ex.distance_mode, discrete_distances().size()), rng, 0.01);
  bind();
}

Policy Policy::zeros(const PolicyConfig& cfg) {
  Policy p(cfg, 0);
  for (auto& param : p.store_.all()) param.value.zero();
  return p;
}

Policy::Policy(const Policy& other) : cfg_(other.cfg_), store_(other.store_) { bind(); }

Policy& Policy::operator=(const Policy& other) {
  if (this != &other) {
    cfg_ = other.cfg_;
    store_ = other.store_;
    bind();
  }
  return *this;
}

void Policy::bind() {
  enc1_ = Linear::bind(store_, "encoder.l1");
  enc2_ = Linear::bind(store_, "encoder.l2");
  gru_vis_ = GruCell::bind(store_, "gru_vis");
  embed_ = &store_.at("instruction.embedding");
  query_ = Linear::bind(store_, "instruction.query");
  key_ = Linear::bind(store_, "pano.key");
  gru_act_ = GruCell::bind(store_, "gru_act");
  pano_ = &store_.at("pano.w");
  stop_ = Linear::bind(store_, "pano.stop");
  value_ = Linear::bind(store_, "value");
  offset_ = store_.find("head.offset.w") ? Linear::bind(store_, "head.offset") : Linear{};
  distance_ = store_.find("head.distance.w") ? Linear::bind(store_, "head.distance") : Linear{};
}

PolicyVars Policy::forward(Tape& t, const Observation& obs, const PolicyState& state, Var h_vis,
                           Var h_a) const {
  const std::size_t od = cfg_.obs_dim();
  if (obs.sectors.rows != static_cast<std::size_t>(kSectors) || obs.sectors.cols != od)
    throw ShapeError("policy_forward: observation must be 12x" + std::to_string(od));
  if (obs.instruction.empty()) throw InvalidArgument("policy_forward: empty instruction");
  for (int tok : obs.instruction)
    if (!Vocabulary::valid(tok))
      throw InvalidArgument("policy_forward: token id " + std::to_string(tok) +
                            " outside the vocabulary");

  Tensor x(kSectors, cfg_.sector_input_dim());
  for (int i = 0; i < kSectors; ++i) {
    const auto r = static_cast<std::size_t>(i);
    for (std::size_t c = 0; c < od; ++c) {
      x(r, c) = obs.sectors(r, c);
      x(r, od + 2 + c) = state.prev_sector[c];
    }
    if (cfg_.pose_features) {
      x(r, od) = std::sin(RangeScan::sector_center(i));
      x(r, od + 1) = std::cos(RangeScan::sector_center(i));
    }
  }
  const Var sectors = t.tanh(enc2_(t, t.tanh(enc1_(t, t.constant(std::move(x))))));

  const Var prev_action = t.constant(state.prev_action);
  const Var hv_in = h_vis.valid() ? h_vis : t.constant(state.h_vis);
  const Var ha_in = h_a.valid() ? h_a : t.constant(state.h_a);
  const Var vis_parts[] = {t.mean_rows(sectors), t.constant(state.prev_sector), prev_action};
  const Var hv = gru_vis_(t, t.concat_cols(vis_parts), hv_in);

  const Var words = t.gather_rows(t.param(*embed_), obs.instruction);
  const Var instr = attention(t, words, words, query_(t, hv));

  const Var pano_ctx = attention(t, key_(t, sectors), sectors, instr);
  const Var act_parts[] = {pano_ctx, instr, hv, prev_action};
  const Var ha = gru_act_(t, t.concat_cols(act_parts), ha_in);

  // Sector logit i is s_i^T W_p h_a.
  const Var proj = t.matmul(ha, t.param(*pano_));                      // 1 x F
  const Var sector_logits = t.transpose(t.matmul(sectors, t.transpose(proj)));  // 1 x 12
  const Var logit_parts[] = {sector_logits, stop_(t, ha)};

  PolicyVars v;
  v.pano_logits = t.concat_cols(logit_parts);
  const Var head_parts[] = {sectors, t.broadcast_rows(ha, kSectors)};
  const Var head_in = t.concat_cols(head_parts);
  if (offset_.w) v.offset_raw = offset_(t, head_in);
  if (distance_.w) v.distance_raw = distance_(t, head_in);
  v.value = value_(t, ha);
  v.h_vis = hv;
  v.h_a = ha;
  return v;
}

PolicyOutput Policy::act(const Observation& obs, const PolicyState& state) const {
  Tape t;
  const PolicyVars v = forward(t, obs, state);
  PolicyOutput out;
  out.pano_logits = t.value(v.pano_logits);
  if (v.offset_raw.valid()) out.offset_raw = t.value(v.offset_raw);
  if (v.distance_raw.valid()) out.distance_raw = t.value(v.distance_raw);
  out.value = t.item(v.value);
  out.h_vis = t.value(v.h_vis);
  out.h_a = t.value(v.h_a);
  return out;
}

PolicyState Policy::advance(const PolicyOutput& out, const Observation& obs,
                            const WaypointAction& action) const {
  PolicyState s = PolicyState::initial(cfg_);
  s.h_vis = out.h_vis;
  s.h_a = out.h_a;
  if (!action.is_stop()) {
    const double angle = RangeScan::sector_center(action.pano);
    s.prev_action = Tensor::row({action.distance, std::sin(angle), std::cos(angle), action.offset});
    s.prev_sector = row_of(obs.sectors, static_cast<std::size_t>(action.pano));
  }
  return s;
}

HeadOutputs head_outputs(const PolicyOutput& out, const ExpressivityConfig& cfg) {
  HeadOutputs h;
  h.pano = Categorical::from_logits(out.pano_logits.data);
  for (int i = 0; i < kSectors; ++i) {
    const auto r = static_cast<std::size_t>(i);
    switch (cfg.offset_mode) {
      case HeadMode::continuous:
        h.offset[r] = ComponentHead::continuous(
            map_offset_head(out.offset_raw(r, 0), out.offset_raw(r, 1)));
        break;
      case HeadMode::discrete:
        h.offset[r] = ComponentHead::discrete(
            Categorical::from_logits(row_of(out.offset_raw, r).data), discrete_offsets());
        break;
      case HeadMode::fixed: h.offset[r] = ComponentHead::fixed(kFixedOffset); break;
    }
    switch (cfg.distance_mode) {
      case HeadMode::continuous:
        h.distance[r] = ComponentHead::continuous(
            map_distance_head(out.distance_raw(r, 0), out.distance_raw(r, 1)));
        break;
      case HeadMode::discrete:
        h.distance[r] = ComponentHead::discrete(
            Categorical::from_logits(row_of(out.distance_raw, r).data), discrete_distances());
        break;
      case HeadMode::fixed: h.distance[r] = ComponentHead::fixed(kFixedDistance); break;
    }
  }
  return h;
}

}  // namespace wpnav
