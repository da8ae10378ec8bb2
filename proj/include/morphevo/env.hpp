#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morphevo/net.hpp"

namespace morphevo {

// A point in the 2-D morphological parameter space. For cart-pole x is the
// pole half-length constant (the simulator's stock `length` of 0.5) and y is
// the pole mass. `cell` is the originating grid index, -1 when off-grid.
struct Morphology {
  double x = 0.0;
  double y = 0.0;
  int cell = -1;

  bool valid() const { return x > 0.0 && y > 0.0; }
};

struct EpisodeResult {
  double reward_total = 0.0;
  int steps = 0;
  bool terminated_early = false;
};

struct EnvSpec {
  std::string name;
  int observation_dim = 0;
  int action_dim = 0;
  int episode_cap = 0;
  double sufficiency_threshold = 0.0;  // raw reward counted as "handled"
  double satisfaction_target = 0.0;    // mean fitness (negated reward) stop level
  Morphology default_morphology;
};

// Test hook: pin the initial episode state instead of drawing it from the
// seed. Length must match the environment's state dimension.
struct EpisodeOverrides {
  std::optional<std::vector<double>> initial_state;
};

// Environments are stateless factories; run_episode owns all episode state,
// so any number of episodes may run concurrently.
class Environment {
 public:
  virtual ~Environment() = default;
  const EnvSpec& spec() const { return spec_; }

  // One full episode. Deterministic given (morphology, policy, seed). A
  // non-finite physics state aborts the episode early with the reward
  // accrued so far.
  virtual EpisodeResult run_episode(const Morphology& morphology,
                                    const PolicyFn& policy, std::uint64_t seed,
                                    const EpisodeOverrides* overrides = nullptr) const = 0;

 protected:
  EnvSpec spec_;
};

// ---------------------------------------------------------------------------
// Cart-pole, morphology-parameterized (pole half-length x, pole mass y).

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
};

namespace cartpole {
inline constexpr double kGravity = 9.8;
inline constexpr double kCartMass = 1.0;
inline constexpr double kForceMag = 10.0;
inline constexpr double kDt = 0.02;
inline constexpr double kThetaLimit = 0.2095;  // rad
inline constexpr double kXLimit = 2.4;
inline constexpr int kEpisodeCap = 1000;
inline constexpr double kSufficiencyThreshold = 800.0;
inline constexpr double kSatisfactionTarget = -800.0;
}  // namespace cartpole

// One explicit Euler step of the standard cart-pole dynamics.
CartPoleState cartpole_step(const CartPoleState& state, double force,
                            const Morphology& morphology);

class CartPoleEnv : public Environment {
 public:
  CartPoleEnv();
  EpisodeResult run_episode(const Morphology&, const PolicyFn&, std::uint64_t seed,
                            const EpisodeOverrides* = nullptr) const override;
};

// ---------------------------------------------------------------------------
// Synthetic bimodal environment: a 1-D point mass of mass y driven by
// gain * action / mass, gain = +1 when x < x_split and -1 otherwise. The
// position starts at 1.0 and each of the 200 steps scores
// 1 - min(1, position^2). No controller can serve both sign classes, which
// makes evolutionary branching provable.

namespace synthetic {
inline constexpr double kStartPosition = 1.0;
inline constexpr double kDt = 0.05;
inline constexpr int kEpisodeCap = 200;
inline constexpr double kSufficiencyThreshold = 150.0;
inline constexpr double kSatisfactionTarget = -150.0;
inline constexpr double kDefaultXSplit = 0.45;
}  // namespace synthetic

class SyntheticBimodalEnv : public Environment {
 public:
  explicit SyntheticBimodalEnv(double x_split = synthetic::kDefaultXSplit);
  double x_split() const { return x_split_; }
  double actuator_gain(const Morphology& m) const {
    return m.x < x_split_ ? 1.0 : -1.0;
  }
  EpisodeResult run_episode(const Morphology&, const PolicyFn&, std::uint64_t seed,
                            const EpisodeOverrides* = nullptr) const override;

 private:
  double x_split_;
};

// Reward an ideal bounded action sequence can reach on a synthetic-env cell
// (greedy descent to the origin at maximum rate); the oracle for the
// analytic-optimum tests.
double synthetic_closed_form_optimum(const Morphology& morphology);

// name: "cartpole" | "synthetic". x_split applies to synthetic only.
std::unique_ptr<Environment> make_environment(
    const std::string& name,
    std::optional<double> x_split = std::nullopt);

// The spec-level evaluation entry point: one episode of a network controller.
EpisodeResult evaluate(const Environment& env, const Morphology& morphology,
                       const NetworkTopology& topology,
                       std::span<const double> params, std::uint64_t seed);

}  // namespace morphevo
