#include "morphevo/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "morphevo/rng.hpp"

namespace morphevo {

static void check_morphology(const Morphology& m) {
  if (!m.valid()) {
    throw std::invalid_argument("morphology parameters must be strictly positive");
  }
}

CartPoleState cartpole_step(const CartPoleState& s, double force,
                            const Morphology& m) {
  using namespace cartpole;
  const double pole_mass = m.y;
  const double half_length = m.x;
  const double total_mass = kCartMass + pole_mass;
  const double polemass_length = pole_mass * half_length;

  const double cos_t = std::cos(s.theta);
  const double sin_t = std::sin(s.theta);
  const double temp =
      (force + polemass_length * s.theta_dot * s.theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) /
      (half_length * (4.0 / 3.0 - pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

  CartPoleState next;
  next.x = s.x + kDt * s.x_dot;
  next.x_dot = s.x_dot + kDt * x_acc;
  next.theta = s.theta + kDt * s.theta_dot;
  next.theta_dot = s.theta_dot + kDt * theta_acc;
  return next;
}

CartPoleEnv::CartPoleEnv() {
  spec_.name = "cartpole";
  spec_.observation_dim = 4;
  spec_.action_dim = 1;
  spec_.episode_cap = cartpole::kEpisodeCap;
  spec_.sufficiency_threshold = cartpole::kSufficiencyThreshold;
  spec_.satisfaction_target = cartpole::kSatisfactionTarget;
  spec_.default_morphology = {0.5, 0.1, -1};
}

EpisodeResult CartPoleEnv::run_episode(const Morphology& m, const PolicyFn& policy,
                                       std::uint64_t seed,
                                       const EpisodeOverrides* overrides) const {
  using namespace cartpole;
  check_morphology(m);

  CartPoleState s;
  if (overrides && overrides->initial_state) {
    const auto& init = *overrides->initial_state;
    if (init.size() != 4) throw std::invalid_argument("cartpole initial state needs 4 values");
    s = {init[0], init[1], init[2], init[3]};
  } else {
    Rng rng(seed);
    s.x = rng.uniform(-0.05, 0.05);
    s.x_dot = rng.uniform(-0.05, 0.05);
    s.theta = rng.uniform(-0.05, 0.05);
    s.theta_dot = rng.uniform(-0.05, 0.05);
  }

  EpisodeResult result;
  double obs[4];
  double act[1];
  for (int t = 0; t < spec_.episode_cap; ++t) {
    obs[0] = s.x;
    obs[1] = s.x_dot;
    obs[2] = s.theta;
    obs[3] = s.theta_dot;
    policy(std::span<const double>(obs, 4), std::span<double>(act, 1));
    const double force = kForceMag * std::clamp(act[0], -1.0, 1.0);
    s = cartpole_step(s, force, m);
    const bool finite = std::isfinite(s.x) && std::isfinite(s.x_dot) &&
                        std::isfinite(s.theta) && std::isfinite(s.theta_dot);
    if (!finite || std::abs(s.theta) > kThetaLimit || std::abs(s.x) > kXLimit) {
      result.terminated_early = true;
      break;
    }
    result.reward_total += 1.0;  // 1 point per surviving step
    result.steps += 1;
  }
  return result;
}

SyntheticBimodalEnv::SyntheticBimodalEnv(double x_split) : x_split_(x_split) {
  spec_.name = "synthetic";
  spec_.observation_dim = 1;
  spec_.action_dim = 1;
  spec_.episode_cap = synthetic::kEpisodeCap;
  spec_.sufficiency_threshold = synthetic::kSufficiencyThreshold;
  spec_.satisfaction_target = synthetic::kSatisfactionTarget;
  spec_.default_morphology = {0.2, 0.1, -1};
}

EpisodeResult SyntheticBimodalEnv::run_episode(const Morphology& m,
                                               const PolicyFn& policy,
                                               std::uint64_t /*seed*/,
                                               const EpisodeOverrides* overrides) const {
  using namespace synthetic;
  check_morphology(m);
  if (m.x == x_split_) {
    throw std::invalid_argument("synthetic morphology sits on the sign boundary");
  }
  const double gain = actuator_gain(m);

  double p = kStartPosition;
  if (overrides && overrides->initial_state) {
    const auto& init = *overrides->initial_state;
    if (init.size() != 1) throw std::invalid_argument("synthetic initial state needs 1 value");
    p = init[0];
  }

  EpisodeResult result;
  double obs[1];
  double act[1];
  for (int t = 0; t < spec_.episode_cap; ++t) {
    obs[0] = p;
    policy(std::span<const double>(obs, 1), std::span<double>(act, 1));
    const double u = std::clamp(act[0], -1.0, 1.0);
    p += kDt * gain * u / m.y;
    if (!std::isfinite(p)) {
      result.terminated_early = true;
      break;
    }
    result.reward_total += 1.0 - std::min(1.0, p * p);
    result.steps += 1;
  }
  return result;
}

double synthetic_closed_form_optimum(const Morphology& m) {
  using namespace synthetic;
  check_morphology(m);
  const double rate = kDt / m.y;  // largest per-step position change
  double p = kStartPosition;
  double total = 0.0;
  for (int t = 0; t < kEpisodeCap; ++t) {
    p = std::max(0.0, p - rate);
    total += 1.0 - std::min(1.0, p * p);
  }
  return total;
}

std::unique_ptr<Environment> make_environment(const std::string& name,
                                              std::optional<double> x_split) {
  if (name == "cartpole") return std::make_unique<CartPoleEnv>();
  if (name == "synthetic") {
    return std::make_unique<SyntheticBimodalEnv>(
        x_split.value_or(synthetic::kDefaultXSplit));
  }
  throw std::invalid_argument("unknown environment: " + name);
}

EpisodeResult evaluate(const Environment& env, const Morphology& m,
                       const NetworkTopology& topology,
                       std::span<const double> params, std::uint64_t seed) {
  if (topology.inputs != env.spec().observation_dim ||
      topology.outputs != env.spec().action_dim) {
    throw std::invalid_argument("controller topology does not match environment dims");
  }
  std::vector<double> p(params.begin(), params.end());
  return env.run_episode(m, make_network_policy(topology, std::move(p)), seed);
}

}  // namespace morphevo
