#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "morphevo/net.hpp"
#include "morphevo/rng.hpp"

using namespace morphevo;

TEST_CASE("parameter count formula") {
  CHECK(NetworkTopology{4, 20, 1}.parameter_count() == 121);
  CHECK(NetworkTopology{24, 20, 4}.parameter_count() == 584);
  CHECK(NetworkTopology{1, 1, 1}.parameter_count() == 4);

  // property over randomized topologies
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const int ni = static_cast<int>(rng.uniform_int(64)) + 1;
    const int nh = static_cast<int>(rng.uniform_int(64)) + 1;
    const int no = static_cast<int>(rng.uniform_int(64)) + 1;
    const NetworkTopology t{ni, nh, no};
    CHECK(t.parameter_count() == (ni + 1) * nh + (nh + 1) * no);
    const auto slots = layout(t);
    CHECK(static_cast<int>(slots.size()) == t.parameter_count());
    // bijection: indices 0..count-1 in order, each (layer, dst, src) unique
    for (std::size_t k = 0; k < slots.size(); ++k) {
      CHECK(slots[k].index == static_cast<int>(k));
    }
  }
}

TEST_CASE("layout block boundaries for the cart-pole topology") {
  const NetworkTopology t{4, 20, 1};
  const auto slots = layout(t);
  REQUIRE(slots.size() == 121);
  for (int k = 0; k <= 99; ++k) {
    CHECK(slots[static_cast<std::size_t>(k)].layer ==
          ConnectionSlot::Layer::kInputToHidden);
  }
  for (int k = 100; k <= 120; ++k) {
    CHECK(slots[static_cast<std::size_t>(k)].layer ==
          ConnectionSlot::Layer::kHiddenToOutput);
  }
  // bias last per destination
  CHECK(slots[4].source == 4);       // hidden 0 bias (inputs = 4)
  CHECK(slots[4].destination == 0);
  CHECK(slots[120].source == 20);    // output bias (hidden = 20)
}

TEST_CASE("all-zero parameters give all-zero output") {
  const NetworkTopology t{4, 20, 1};
  const std::vector<double> params(121, 0.0);
  const std::vector<double> obs = {0.3, -1.2, 0.05, 7.0};
  const auto out = forward(t, params, obs);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == 0.0);
}

TEST_CASE("hand-set two-layer composition") {
  // (1,1,1) net, w_ih = 1, b_h = 0, w_ho = 1, b_o = 0, input 0.5:
  // output = tanh(tanh(0.5)); frozen from the independent oracle.
  const NetworkTopology t{1, 1, 1};
  const std::vector<double> params = {1.0, 0.0, 1.0, 0.0};
  const auto out = forward(t, params, std::vector<double>{0.5});
  CHECK(out[0] == doctest::Approx(0.4318081805950961).epsilon(1e-12));
}

TEST_CASE("output bound and determinism properties") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const NetworkTopology t{static_cast<int>(rng.uniform_int(6)) + 1,
                            static_cast<int>(rng.uniform_int(16)) + 1,
                            static_cast<int>(rng.uniform_int(4)) + 1};
    std::vector<double> params(static_cast<std::size_t>(t.parameter_count()));
    for (auto& p : params) p = rng.uniform(-50.0, 50.0);
    std::vector<double> obs(static_cast<std::size_t>(t.inputs));
    for (auto& o : obs) o = rng.uniform(-100.0, 100.0);
    const auto a = forward(t, params, obs);
    const auto b = forward(t, params, obs);
    CHECK(a == b);
    for (double v : a) {
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("encode/decode roundtrip is exact") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const NetworkTopology t{static_cast<int>(rng.uniform_int(8)) + 1,
                            static_cast<int>(rng.uniform_int(24)) + 1,
                            static_cast<int>(rng.uniform_int(6)) + 1};
    std::vector<double> params(static_cast<std::size_t>(t.parameter_count()));
    for (auto& p : params) p = rng.uniform(-10.0, 10.0);
    CHECK(encode(t, decode(t, params)) == params);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const NetworkTopology t{4, 20, 1};
  const std::vector<double> params(121, 0.0);
  CHECK_THROWS_AS(forward(t, params, std::vector<double>{1.0, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(forward(t, std::vector<double>(120, 0.0),
                          std::vector<double>{1, 2, 3, 4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(NetworkTopology{0, 1, 1}), std::invalid_argument);
  std::vector<double> bad(121, 0.0);
  bad[5] = std::nan("");
  CHECK_THROWS_AS(forward(t, bad, std::vector<double>{1, 2, 3, 4}),
                  std::invalid_argument);
}
