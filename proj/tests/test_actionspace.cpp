#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "wpnav/actionspace/actions.hpp"
#include "wpnav/actionspace/truncnorm.hpp"
#include "wpnav/common/angles.hpp"
#include "wpnav/common/error.hpp"

using namespace wpnav;

namespace {

HeadOutputs uniform_heads(const ExpressivityConfig& cfg) {
  HeadOutputs h;
  h.pano = Categorical::from_logits(std::vector<double>(kPanoSize, 0.0));
  for (int i = 0; i < kSectors; ++i) {
    h.offset[i] = cfg.offset_mode == HeadMode::discrete
                      ? ComponentHead::discrete(Categorical::from_logits(std::vector<double>(
                                                    discrete_offsets().size(), 0.0)),
                                                discrete_offsets())
                  : cfg.offset_mode == HeadMode::continuous
                      ? ComponentHead::continuous(map_offset_head(0.0, 0.0))
                      : ComponentHead::fixed(kFixedOffset);
    h.distance[i] = cfg.distance_mode == HeadMode::discrete
                        ? ComponentHead::discrete(Categorical::from_logits(std::vector<double>(
                                                      discrete_distances().size(), 0.0)),
                                                  discrete_distances())
                    : cfg.distance_mode == HeadMode::continuous
                        ? ComponentHead::continuous(map_distance_head(0.0, 0.0))
                        : ComponentHead::fixed(kFixedDistance);
  }
  return h;
}

}  // namespace

TEST_CASE("standard normal tail helpers") {
  CHECK(log_ndtr(0.0) == doctest::Approx(std::log(0.5)));
  CHECK(log_ndtr(-40.0) == doctest::Approx(-804.608).epsilon(1e-5));
  CHECK(log_ndtr_diff(-1.0, 1.0) == doctest::Approx(std::log(std::erf(1.0 / std::sqrt(2.0)))));
  // Deep tail stays finite and matches the asymptotic difference.
  CHECK(std::isfinite(log_ndtr_diff(30.0, 31.0)));
  const double z = inverse_log_ndtr(std::log(0.975), -10.0, 10.0);
  CHECK(z == doctest::Approx(1.959964).epsilon(1e-6));
}

TEST_CASE("truncated gaussian validation and mode") {
  CHECK_THROWS_AS((TruncatedGaussian{0.0, 0.0, -1.0, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((TruncatedGaussian{0.0, 1.0, 1.0, -1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((TruncatedGaussian{NAN, 1.0, -1.0, 1.0}.validate()), InvalidArgument);
  CHECK(TruncatedGaussian{20.0, 3.0, -15.0, 15.0}.mode() == 15.0);
  CHECK(TruncatedGaussian{-20.0, 3.0, -15.0, 15.0}.mode() == -15.0);
  CHECK(TruncatedGaussian{2.0, 3.0, -15.0, 15.0}.mode() == 2.0);
  CHECK(TruncatedGaussian{0.0, 1.0, -1.0, 1.0}.logprob(1.5) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("truncated gaussian sampling") {
  Rng rng(7);
  const TruncatedGaussian tight{0.0, 1e-6, -1.0, 1.0};
  for (int i = 0; i < 1000; ++i) CHECK(std::abs(tight.sample(rng)) < 1e-4);

  const TruncatedGaussian sym{0.0, 1.0, -1.0, 1.0};
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sym.sample(rng);
    REQUIRE(x >= -1.0);
    REQUIRE(x <= 1.0);
    s += x;
  }
  CHECK(std::abs(s / n) < 3.0 * std::sqrt(sym.variance() / n));

  // Closed-form moments against the rejection oracle.
  const TruncatedGaussian d{0.5, 1.0, 0.0, 1.0};
  const oracle::Moments ref = oracle::rejection_moments(0.5, 1.0, 0.0, 1.0, 400000, 99);
  CHECK(std::abs(d.mean() - ref.mean) < 3.0 * std::sqrt(ref.variance / 400000));
  CHECK(std::abs(d.variance() - ref.variance) < 0.002);

  double m = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = d.sample(rng);
    m += x;
    m2 += x * x;
  }
  m /= n;
  CHECK(std::abs(m - ref.mean) < 3.0 * std::sqrt(2.0 * ref.variance / n));
  CHECK(std::abs((m2 / n - m * m) - ref.variance) < 0.003);
}

TEST_CASE("truncated gaussian density, cdf and entropy") {
  for (const TruncatedGaussian d : {TruncatedGaussian{0.5, 1.0, 0.0, 1.0},
                                    TruncatedGaussian{0.1, 0.05, -0.26, 0.26},
                                    TruncatedGaussian{3.9, 0.3, 0.25, 4.0},
                                    TruncatedGaussian{-8.0, 1.0, -1.0, 1.0}}) {
    const double mass =
        oracle::integrate([&](double x) { return std::exp(d.logprob(x)); }, d.lower, d.upper);
    CHECK(std::abs(mass - 1.0) < 1e-6);
    const double h = oracle::integrate(
        [&](double x) { return -std::exp(d.logprob(x)) * d.logprob(x); }, d.lower, d.upper);
    CHECK(d.entropy() == doctest::Approx(h).epsilon(1e-6));
    CHECK(d.cdf(d.quantile(0.3)) == doctest::Approx(0.3).epsilon(1e-9));
  }
  const TruncatedGaussian wide{0.0, 1.0, -10.0, 10.0};
  CHECK(wide.entropy() == doctest::Approx(0.5 * std::log(2.0 * kPi * std::exp(1.0))).epsilon(1e-4));
}

TEST_CASE("head mappings") {
  CHECK(map_offset_head(0.0, 0.0).mu == doctest::Approx(0.0));
  CHECK(map_distance_head(0.0, 0.0).mu == doctest::Approx(2.125));
  const TruncatedGaussian sat = map_offset_head(1e6, 0.0);
  CHECK(sat.mu <= kMaxOffset);
  CHECK(sat.mu == doctest::Approx(kMaxOffset));
  CHECK(map_offset_head(0.0, -1e6).sigma >= kSigmaFloor);
  CHECK(map_distance_head(0.0, 0.0).lower == kMinDistance);
  CHECK(map_distance_head(0.0, 0.0).upper == kMaxDistance);
}

TEST_CASE("waypoint composition") {
  PolarWaypoint w = compose_waypoint({3, deg2rad(10.0), 1.0});
  CHECK(w.r == 1.0);
  CHECK(rad2deg(w.theta) == doctest::Approx(100.0));
  w = compose_waypoint({0, 0.0, 0.25});
  CHECK(w.r == 0.25);
  CHECK(w.theta == doctest::Approx(0.0));
  w = compose_waypoint({11, deg2rad(15.0), 1.0});
  CHECK(rad2deg(w.theta) == doctest::Approx(345.0));
  w = compose_waypoint({0, deg2rad(-15.0), 1.0});
  CHECK(rad2deg(w.theta) == doctest::Approx(345.0));
  CHECK_THROWS_AS(compose_waypoint(WaypointAction::stop()), InvalidArgument);
}

TEST_CASE("every bearing is reachable") {
  Rng rng(4);
  for (int k = 0; k < 10000; ++k) {
    const double bearing = rng.uniform(0.0, kTwoPi);
    // Invert: nearest sector, remaining offset.
    const int sector = static_cast<int>(std::lround(bearing / kSectorWidth)) % kSectors;
    const double offset = wrap_pi(bearing - sector * kSectorWidth);
    REQUIRE(std::abs(offset) <= kMaxOffset + 1e-12);
    const PolarWaypoint w = compose_waypoint({sector, offset, 1.0});
    CHECK(std::abs(wrap_pi(w.theta - bearing)) < 1e-9);
  }
}

TEST_CASE("joint log probability") {
  const HeadOutputs dd = uniform_heads(ExpressivityConfig::from_code("dd"));
  CHECK(joint_logprob(dd, {4, discrete_offsets()[2], discrete_distances()[3]}) ==
        doctest::Approx(-std::log(546.0)));
  CHECK(-std::log(546.0) == doctest::Approx(-6.3026).epsilon(1e-4));

  HeadOutputs stop = dd;
  std::vector<double> probs(kPanoSize, 0.5 / kSectors);
  probs[kStopIndex] = 0.5;
  stop.pano = Categorical::from_probs(probs);
  CHECK(joint_logprob(stop, WaypointAction::stop()) == doctest::Approx(std::log(0.5)));

  const HeadOutputs ff = uniform_heads(ExpressivityConfig::from_code("fixedfixed"));
  CHECK(joint_logprob(ff, {2, kFixedOffset, kFixedDistance}) == doctest::Approx(-std::log(13.0)));
  // Off-atom values have zero probability.
  CHECK(joint_logprob(dd, {4, 0.01, 0.25}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("joint normalization for every configuration") {
  Rng rng(12);
  for (const ExpressivityConfig& cfg : ExpressivityConfig::table_rows()) {
    const HeadOutputs h = oracle::random_heads(cfg, rng);
    CHECK_MESSAGE(std::abs(oracle::joint_mass(h) - 1.0) < 1e-4, cfg.code());
  }
}

TEST_CASE("decomposed entropy") {
  const HeadOutputs dd = uniform_heads(ExpressivityConfig::from_code("dd"));
  const EntropyTerms e = decomposed_entropy(dd);
  CHECK(e.pano == doctest::Approx(std::log(13.0)));
  CHECK(e.offset == doctest::Approx(std::log(7.0)));
  CHECK(e.distance == doctest::Approx(std::log(6.0)));
  const EntropyTerms f = decomposed_entropy(uniform_heads(ExpressivityConfig::from_code("dfixed")));
  CHECK(f.offset == 0.0);
  CHECK(f.distance == doctest::Approx(std::log(6.0)));
  const EntropyTerms g = decomposed_entropy(uniform_heads(ExpressivityConfig::from_code("fixedc")));
  CHECK(g.distance == 0.0);
}

TEST_CASE("mode action") {
  HeadOutputs h = uniform_heads(ExpressivityConfig::from_code("cc"));
  std::vector<double> probs(kPanoSize, 0.1 / kSectors);
  probs[kStopIndex] = 0.9;
  h.pano = Categorical::from_probs(probs);
  CHECK(mode_action(h).is_stop());

  std::vector<double> logits(kPanoSize, 0.0);
  logits[2] = logits[5] = 3.0;
  h.pano = Categorical::from_logits(logits);
  const WaypointAction a = mode_action(h);
  CHECK(a.pano == 2);
  CHECK(a.offset == doctest::Approx(0.0));
  CHECK(a.distance == doctest::Approx(2.125));
}

TEST_CASE("categorical") {
  CHECK_THROWS_AS(Categorical::from_probs(std::vector<double>{0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(Categorical::from_probs(std::vector<double>{-0.1, 1.1}), InvalidArgument);
  const Categorical c = Categorical::from_probs(std::vector<double>{0.2, 0.3, 0.5});
  Rng rng(1);
  std::array<int, 3> counts{};
  for (int i = 0; i < 30000; ++i) ++counts[c.sample(rng)];
  CHECK(counts[2] / 30000.0 == doctest::Approx(0.5).epsilon(0.03));
  CHECK(c.entropy() == doctest::Approx(-(0.2 * std::log(0.2) + 0.3 * std::log(0.3) +
                                         0.5 * std::log(0.5))));
}

TEST_CASE("expressivity codes") {
  for (const char* code : {"cc", "dc", "dd", "dfixed", "fixedc", "fixedfixed"})
    CHECK(ExpressivityConfig::from_code(code).code() == code);
  const ExpressivityConfig hpn = ExpressivityConfig::from_code("fixedc");
  CHECK(hpn.distance_mode == HeadMode::fixed);
  CHECK(hpn.offset_mode == HeadMode::continuous);
  CHECK_THROWS_AS(ExpressivityConfig::from_code("xx"), InvalidArgument);
}
