#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "morphevo/schedule.hpp"
#include "morphevo/stats.hpp"

namespace morphevo {

// Raised on malformed or unknown configuration; the CLI maps it to exit 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key-value config with one section per module. Every field except
// env.name has a default matching the paper's CartPole settings, so a
// paper-parity run needs only [env] name and a training set size.
struct ExperimentConfig {
  // [experiment]
  std::string name = "experiment";
  std::string out_dir = "runs/out";
  int n_runs = 30;
  std::uint64_t base_seed = 1;
  int jobs = 1;

  // [env]
  std::string env_name;  // required: "cartpole" | "synthetic"
  std::optional<double> x_split;  // synthetic only; default: training grid midpoint

  // [net]
  int hidden = 20;

  // [training]
  int set_size = 64;  // 1 | 16 | 25 | 49 | 64 (any perfect square accepted)
  double grid_origin_x = 0.1;
  double grid_origin_y = 0.1;
  double grid_step_x = 0.1;
  double grid_step_y = 0.1;
  Schedule::Kind schedule = Schedule::Kind::kIncremental;
  int walk_step = 1;

  // [evolution]
  long max_generations = 5000;
  int stagnation_window = 50;
  double sigma0 = 0.1;
  double outlier_std_multiplier = 1.0;
  std::optional<double> satisfaction_target;  // default: the env's target
  long checkpoint_every = 200;
  long stop_after_generations = 0;  // pause + checkpoint after N gens (0 = off)
  int eval_threads = 1;

  // [evaluation]
  int n_eval = 3;
  int global_nx = 18;
  int global_ny = 18;
  double local_distance = 6;

  // [stats]
  double alpha = 0.05;
  PAdjust p_adjust = PAdjust::kNone;

  MorphologyGrid training_grid(const Morphology& default_morphology) const;
  MorphologyGrid global_grid() const;
  double resolved_x_split() const;  // training-grid midpoint unless pinned

  // Canonical text form (sorted section.key = value) and its FNV-1a hash;
  // the hash is embedded in every artifact file.
  std::string canonical_text() const;
  std::uint64_t hash() const;
};

// Parses INI-style text: [section] headers, key = value pairs, '#' or ';'
// comments. Unknown keys and malformed lines raise ConfigError with the key
// path and line number; a missing env.name raises ConfigError naming it.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace morphevo
