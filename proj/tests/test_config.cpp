#include <doctest.h>

#include "morphevo/config.hpp"

using namespace morphevo;

TEST_CASE("a three-line config yields the paper's cart-pole defaults") {
  const ExperimentConfig cfg = parse_config(
      "[env]\n"
      "name = cartpole\n"
      "[training]\n"
      "set_size = 64\n");
  CHECK(cfg.env_name == "cartpole");
  CHECK(cfg.set_size == 64);
  CHECK(cfg.max_generations == 5000);
  CHECK(cfg.sigma0 == 0.1);
  CHECK(cfg.hidden == 20);
  CHECK(cfg.stagnation_window == 50);
  CHECK(cfg.outlier_std_multiplier == 1.0);
  CHECK(cfg.n_runs == 30);
  CHECK(cfg.schedule == Schedule::Kind::kIncremental);
  CHECK(cfg.grid_origin_x == 0.1);
  CHECK(cfg.grid_step_y == 0.1);
  CHECK(cfg.global_nx == 18);
  CHECK(cfg.global_ny == 18);
  CHECK(cfg.n_eval == 3);
  CHECK(cfg.alpha == 0.05);
  CHECK(cfg.p_adjust == PAdjust::kNone);
  CHECK_FALSE(cfg.satisfaction_target.has_value());
}

TEST_CASE("comments, blank lines, and spacing are tolerated") {
  const ExperimentConfig cfg = parse_config(
      "# experiment file\n"
      "\n"
      "[env]\n"
      "name = cartpole   ; trailing comment\n"
      "\n"
      "[evolution]\n"
      "  max_generations =   1500  \n");
  CHECK(cfg.max_generations == 1500);
}

TEST_CASE("missing env name is reported by key") {
  try {
    parse_config("[training]\nset_size = 16\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("env.name") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected with the key path and line") {
  try {
    parse_config("[env]\nname = cartpole\nflavor = spicy\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("env.flavor") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
}

TEST_CASE("malformed values are rejected") {
  CHECK_THROWS_AS(parse_config("[env]\nname = cartpole\n[training]\nset_size = many\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("[env]\nname = cartpole\n[training]\nset_size = 50\n"),
                  ConfigError);  // not a perfect square
  CHECK_THROWS_AS(parse_config("[env]\nname = venus\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[env\nname = cartpole\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[env]\nname\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[env]\nname = cartpole\n[evolution]\nsigma0 = 0\n"),
                  ConfigError);
}

TEST_CASE("grids and x_split resolution") {
  ExperimentConfig cfg = parse_config("[env]\nname = synthetic\n[training]\nset_size = 64\n");
  SUBCASE("training grid matches the paper lattice") {
    const auto g = cfg.training_grid(Morphology{0.2, 0.1, -1});
    CHECK(g.nx == 8);
    CHECK(g.cells.back().x == doctest::Approx(0.8));
  }
  SUBCASE("x_split defaults to the training grid midpoint") {
    CHECK(cfg.resolved_x_split() == doctest::Approx(0.45));
    cfg.x_split = 0.35;
    CHECK(cfg.resolved_x_split() == 0.35);
  }
  SUBCASE("global grid uses the configured lattice") {
    const auto g = cfg.global_grid();
    CHECK(g.size() == 324);
    CHECK(g.cells.back().x == doctest::Approx(1.8));
  }
}

TEST_CASE("canonical text and hash are stable and order-insensitive") {
  const ExperimentConfig a = parse_config(
      "[training]\nset_size = 16\n[env]\nname = cartpole\n");
  const ExperimentConfig b = parse_config(
      "[env]\nname = cartpole\n[training]\nset_size = 16\n");
  CHECK(a.canonical_text() == b.canonical_text());
  CHECK(a.hash() == b.hash());

  const ExperimentConfig c = parse_config(
      "[env]\nname = cartpole\n[training]\nset_size = 25\n");
  CHECK(a.hash() != c.hash());
}
