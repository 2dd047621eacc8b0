#include <cmath>

#include "doctest.h"
#include "gradcheck.hpp"
#include "wpnav/actionspace/actions.hpp"
#include "wpnav/common/error.hpp"

using namespace wpnav;

TEST_CASE("primitive gradients match central differences") {
  for (gradcheck::Case& c : gradcheck::primitive_cases()) {
    const double err = gradcheck::max_relative_error(c);
    CHECK_MESSAGE(err < 1e-4, c.name << " relative error " << err);
  }
}

TEST_CASE("unrolled loss gradients match central differences") {
  for (const char* code : {"cc", "dc", "dd", "dfixed", "fixedc", "fixedfixed"}) {
    const double err = gradcheck::full_loss_error(code, 17);
    CHECK_MESSAGE(err < 1e-3, code << " relative error " << err);
  }
}

TEST_CASE("forward values") {
  Tape t;
  const Var x = t.constant(Tensor::row({1.0, 2.0, 3.0}));
  const Tensor& sm = t.value(t.softmax_rows(x));
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  CHECK(sm[2] == doctest::Approx(std::exp(3.0) / z));
  CHECK(t.value(t.log_softmax_rows(x))[0] == doctest::Approx(1.0 - std::log(z)));
  CHECK(t.item(t.sum(x)) == 6.0);
  CHECK(t.item(t.mean(x)) == 2.0);
  CHECK(t.value(t.sigmoid(x))[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(t.value(t.clamp(x, 1.5, 2.5)) == Tensor::row({1.5, 2.0, 2.5}));
  Tensor sq(2, 2);
  sq.data = {1, 2, 3, 4};
  const Var m = t.constant(sq);
  const Tensor& prod = t.value(t.matmul(m, m));
  CHECK(prod(0, 0) == 7.0);
  CHECK(prod(1, 1) == 22.0);
  // Large logits stay finite.
  CHECK(std::isfinite(t.value(t.log_softmax_rows(t.constant(Tensor::row({1000.0, -1000.0}))))[1]));
}

TEST_CASE("tape head terms agree with the scalar distributions") {
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    const double m = rng.uniform(-3, 3), s = rng.uniform(-3, 3);
    Tape t;
    const Var raw = t.constant(Tensor::row({m, s}));
    for (const bool offset : {true, false}) {
      const GaussianVars g = offset ? offset_gaussian(t, raw) : distance_gaussian(t, raw);
      const TruncatedGaussian d = offset ? map_offset_head(m, s) : map_distance_head(m, s);
      CHECK(t.item(g.mu) == doctest::Approx(d.mu).epsilon(1e-12));
      CHECK(t.item(g.sigma) == doctest::Approx(d.sigma).epsilon(1e-12));
      const double x = rng.uniform(d.lower, d.upper);
      CHECK(t.item(truncnorm_logpdf(t, g, t.scalar(x))) ==
            doctest::Approx(d.logprob(x)).epsilon(1e-9));
      CHECK(t.item(truncnorm_entropy(t, g)) == doctest::Approx(d.entropy()).epsilon(1e-9));
      const double u = rng.uniform_open();
      const double us[] = {u};
      CHECK(t.item(t.truncnorm_quantile(g.mu, g.sigma, d.lower, d.upper, us)) ==
            doctest::Approx(d.quantile(u)).epsilon(1e-9));
    }
  }
}

TEST_CASE("tape errors") {
  Tape t;
  const Var a = t.constant(Tensor(2, 3));
  const Var b = t.constant(Tensor(2, 2));
  CHECK_THROWS_AS(t.matmul(a, b), ShapeError);
  CHECK_THROWS_AS(t.add(a, b), ShapeError);
  CHECK_THROWS_AS(t.backward(a), ShapeError);
  try {
    t.matmul(a, b);
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("matmul") != std::string::npos);
  }
}

TEST_CASE("parameter leaves accumulate gradients") {
  Parameter p{"w", Tensor::row({2.0}), Tensor(1, 1)};
  for (int k = 0; k < 2; ++k) {
    Tape t;
    const Var w = t.param(p);
    CHECK(t.param(p).id == w.id);
    t.backward(t.mul(w, w));
  }
  CHECK(p.grad[0] == doctest::Approx(8.0));
}
