#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "wpnav/common/angles.hpp"
#include "wpnav/common/error.hpp"
#include "wpnav/policy/checkpoint.hpp"
#include "wpnav/policy/head_ops.hpp"
#include "wpnav/policy/layers.hpp"
#include "wpnav/policy/policy.hpp"
#include "wpnav/world/episode.hpp"

using namespace wpnav;

namespace {

RangeScan ramp_scan() {
  RangeScan s;
  s.max_range = 6.0;
  for (int i = 0; i < kSectors; ++i) s.readings[i] = 0.5 + 0.4 * i;
  return s;
}

const std::vector<int> kInstr{Vocabulary::kGo, Vocabulary::kForward, Vocabulary::kThen,
                              Vocabulary::kStop};

PolicyConfig small_config(const std::string& code = "cc") {
  PolicyConfig c;
  c.feature_dim = 8;
  c.vis_hidden = 8;
  c.act_hidden = 8;
  c.embed_dim = 4;
  c.expressivity = ExpressivityConfig::from_code(code);
  return c;
}

}  // namespace

TEST_CASE("observation layout") {
  const PolicyConfig cfg;
  const Observation o = make_observation(cfg, ramp_scan(), kInstr, GoalCue{2.0, deg2rad(90.0)});
  CHECK(o.sectors.rows == 12);
  CHECK(o.sectors.cols == 4);
  CHECK(o.sectors(0, 0) == doctest::Approx(0.5 / 6.0));
  CHECK(o.sectors(3, 1) == doctest::Approx(1.0));  // sector 3 faces the goal
  CHECK(o.sectors(9, 1) == doctest::Approx(-1.0));
  CHECK(o.sectors(5, 3) == doctest::Approx(2.0 / 6.0));
  CHECK_THROWS_AS(make_observation(cfg, ramp_scan(), kInstr, std::nullopt), InvalidArgument);

  PolicyConfig blind = cfg;
  blind.goal_cue = false;
  CHECK(make_observation(blind, ramp_scan(), kInstr, std::nullopt).sectors.cols == 1);
}

TEST_CASE("tape forward matches act") {
  const PolicyConfig cfg = small_config();
  const Policy p(cfg, 3);
  const Observation o = make_observation(cfg, ramp_scan(), kInstr, GoalCue{1.5, 0.7});
  PolicyState s = PolicyState::initial(cfg);
  const PolicyOutput out = p.act(o, s);
  Tape t;
  const PolicyVars v = p.forward(t, o, s);
  CHECK(t.value(v.pano_logits) == out.pano_logits);
  CHECK(t.value(v.offset_raw) == out.offset_raw);
  CHECK(t.value(v.distance_raw) == out.distance_raw);
  CHECK(t.item(v.value) == out.value);
  CHECK(t.value(v.h_a) == out.h_a);

  // Scalar and tape joint log-probabilities agree.
  const HeadOutputs h = head_outputs(out, cfg.expressivity);
  const WaypointAction a = mode_action(h);
  CHECK(t.item(joint_logprob(t, v, cfg.expressivity, a)) ==
        doctest::Approx(joint_logprob(h, a)).epsilon(1e-12));
  const EntropyTerms e = decomposed_entropy(h);
  const EntropyVars ev = decomposed_entropy(t, v, cfg.expressivity);
  CHECK(t.item(ev.pano) == doctest::Approx(e.pano).epsilon(1e-12));
  CHECK(t.item(ev.offset) == doctest::Approx(e.offset).epsilon(1e-12));
  CHECK(t.item(ev.distance) == doctest::Approx(e.distance).epsilon(1e-12));

  const PolicyState next = p.advance(out, o, a);
  CHECK(next.h_a == out.h_a);
  CHECK(next.prev_action[0] == doctest::Approx(a.distance));
  CHECK(next.prev_action[3] == doctest::Approx(a.offset));
  CHECK(next.prev_sector[0] == o.sectors(static_cast<std::size_t>(a.pano), 0));
}

TEST_CASE("heads follow the expressivity configuration") {
  for (const ExpressivityConfig& ex : ExpressivityConfig::table_rows()) {
    const PolicyConfig cfg = small_config(ex.code());
    const Policy p(cfg, 1);
    const Observation o = make_observation(cfg, ramp_scan(), kInstr, GoalCue{1.0, 0.0});
    const PolicyOutput out = p.act(o, PolicyState::initial(cfg));
    const HeadOutputs h = head_outputs(out, ex);
    CHECK(h.offset[0].mode() == ex.offset_mode);
    CHECK(h.distance[0].mode() == ex.distance_mode);
    CHECK((p.params().find("head.offset.w") != nullptr) == (ex.offset_mode != HeadMode::fixed));
  }
}

TEST_CASE("zero policy is uniform over pano") {
  const PolicyConfig cfg = small_config();
  const Policy p = Policy::zeros(cfg);
  const Observation o = make_observation(cfg, ramp_scan(), kInstr, GoalCue{1.0, 0.0});
  const HeadOutputs h = head_outputs(p.act(o, PolicyState::initial(cfg)), cfg.expressivity);
  for (int i = 0; i < kPanoSize; ++i) CHECK(h.pano.prob(i) == doctest::Approx(1.0 / 13.0));
  const WaypointAction a = mode_action(h);
  CHECK(a.distance == doctest::Approx(2.125));
}

TEST_CASE("sector logits are equivariant without pose features") {
  PolicyConfig cfg = small_config();
  cfg.pose_features = false;
  const Policy p(cfg, 8);
  const RangeScan scan = ramp_scan();
  for (int k = 1; k < 12; k += 4) {
    RangeScan shifted = scan;
    for (int i = 0; i < kSectors; ++i) shifted.readings[i] = scan.readings[(i + k) % kSectors];
    const double bearing = 1.1;
    const Observation a = make_observation(cfg, scan, kInstr, GoalCue{2.0, bearing});
    const Observation b =
        make_observation(cfg, shifted, kInstr, GoalCue{2.0, wrap_2pi(bearing - k * kSectorWidth)});
    const PolicyOutput oa = p.act(a, PolicyState::initial(cfg));
    const PolicyOutput ob = p.act(b, PolicyState::initial(cfg));
    for (int i = 0; i < kSectors; ++i)
      CHECK(ob.pano_logits[i] == doctest::Approx(oa.pano_logits[(i + k) % kSectors]).epsilon(1e-9));
    CHECK(ob.pano_logits[kStopIndex] == doctest::Approx(oa.pano_logits[kStopIndex]).epsilon(1e-9));
    CHECK(ob.value == doctest::Approx(oa.value).epsilon(1e-9));
  }
}

TEST_CASE("forward input validation") {
  const PolicyConfig cfg = small_config();
  const Policy p(cfg, 1);
  Observation o = make_observation(cfg, ramp_scan(), kInstr, GoalCue{1.0, 0.0});
  Observation bad = o;
  bad.instruction = {99};
  CHECK_THROWS_AS(p.act(bad, PolicyState::initial(cfg)), InvalidArgument);
  bad = o;
  bad.sectors = Tensor(11, 4);
  CHECK_THROWS_AS(p.act(bad, PolicyState::initial(cfg)), ShapeError);
}

TEST_CASE("policy copies are independent") {
  const PolicyConfig cfg = small_config();
  Policy a(cfg, 1);
  Policy b = a;
  b.params().all().front().value.data[0] += 1.0;
  CHECK(a.params().all().front().value.data[0] != b.params().all().front().value.data[0]);
  const Observation o = make_observation(cfg, ramp_scan(), kInstr, GoalCue{1.0, 0.0});
  CHECK_FALSE(a.act(o, PolicyState::initial(cfg)).pano_logits ==
              b.act(o, PolicyState::initial(cfg)).pano_logits);
}

TEST_CASE("config digest") {
  PolicyConfig a, b;
  CHECK(a.digest() == b.digest());
  b.expressivity = ExpressivityConfig::from_code("dd");
  CHECK(a.digest() != b.digest());
  CHECK(a.digest().size() == 16);
}

TEST_CASE("adam and gradient clipping") {
  ParamStore store;
  Parameter& w = store.add("w", 1, 2);
  w.value.data = {1.0, -1.0};
  Adam adam(store, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  // d/dw of w0^2 + 3 w1: one bias-corrected step moves each entry by lr.
  w.grad.data = {2.0, 3.0};
  adam.step();
  CHECK(w.value[0] == doctest::Approx(0.9));
  CHECK(w.value[1] == doctest::Approx(-1.1));
  CHECK(adam.steps() == 1);

  w.grad.data = {3.0, 4.0};
  CHECK(store.grad_norm() == doctest::Approx(5.0));
  CHECK(store.clip_grad_norm(1.0) == doctest::Approx(5.0));
  CHECK(w.grad[0] == doctest::Approx(0.6));
  CHECK(store.grad_norm() == doctest::Approx(1.0));
  CHECK(store.clip_grad_norm(10.0) == doctest::Approx(1.0));
  CHECK(w.grad[0] == doctest::Approx(0.6));
  w.grad.data[1] = NAN;
  CHECK_THROWS_AS(store.clip_grad_norm(1.0), NumericError);
  store.zero_grad();
  CHECK(w.grad[1] == 0.0);
}

TEST_CASE("xavier initialization bounds") {
  Tensor w(30, 10);
  Rng rng(1);
  xavier_uniform(w, rng, 2.0);
  const double bound = 2.0 * std::sqrt(6.0 / 40.0);
  double lo = 0, hi = 0;
  for (double x : w.data) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(hi <= bound);
  CHECK(lo >= -bound);
  CHECK(hi > 0.8 * bound);
}

TEST_CASE("attention rejects empty key sets") {
  Tape t;
  CHECK_THROWS_AS(attention(t, t.constant(Tensor(0, 3)), t.constant(Tensor(0, 2)),
                            t.constant(Tensor(1, 3))),
                  InvalidArgument);
}

TEST_CASE("checkpoint round trip") {
  const PolicyConfig cfg = small_config("dc");
  const Policy p(cfg, 42);
  const std::string bytes = serialize_checkpoint(p, "step 10");
  CheckpointMeta meta;
  const Policy q = deserialize_checkpoint(bytes, cfg, cfg.digest(), false, &meta);
  CHECK(meta.note == "step 10");
  CHECK(meta.digest == cfg.digest());
  CHECK(serialize_checkpoint(q, "step 10") == bytes);
  const Observation o = make_observation(cfg, ramp_scan(), kInstr, GoalCue{1.0, 0.0});
  CHECK(p.act(o, PolicyState::initial(cfg)).pano_logits ==
        q.act(o, PolicyState::initial(cfg)).pano_logits);

  // Digest mismatch is refused unless forced.
  CHECK_THROWS_AS(deserialize_checkpoint(bytes, cfg, "0000000000000000"), DigestMismatch);
  CHECK_NOTHROW(deserialize_checkpoint(bytes, cfg, "0000000000000000", true));
  // Architecture mismatch.
  CHECK_THROWS_AS(deserialize_checkpoint(bytes, small_config("cc"), "", true), ShapeError);
  // Truncation, trailing bytes and bad magic.
  CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() - 3), cfg), ParseError);
  CHECK_THROWS_AS(deserialize_checkpoint(bytes + "x", cfg), ParseError);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(read_checkpoint_meta(bad), ParseError);

  const auto path = std::filesystem::temp_directory_path() / "wpnav_test_ckpt.bin";
  save_checkpoint(path.string(), p, "disk");
  CheckpointMeta disk;
  const Policy r = load_checkpoint(path.string(), cfg, false, &disk);
  CHECK(disk.note == "disk");
  CHECK(serialize_checkpoint(r, "disk") == serialize_checkpoint(p, "disk"));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path.string(), cfg), Error);
}
