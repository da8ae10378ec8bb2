#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "morphevo/env.hpp"
#include "morphevo/generalist.hpp"
#include "morphevo/schedule.hpp"

namespace morphevo {

// Mean raw reward per lattice cell over n_eval seeded episodes; the data
// behind the heatmaps and sufficiency counts.
struct FitnessGrid {
  MorphologyGrid grid;
  std::vector<double> mean_reward;  // row-major, grid cell order
  int n_eval = 1;
};

// The three evaluation surfaces: default cell, local variation cells
// (Chebyshev dilation of the training cells on the global lattice), and the
// full global lattice shared by all controllers.
struct TestSets {
  Morphology default_cell;
  std::vector<int> training_cells;  // global-lattice indices
  std::vector<int> local_cells;     // global-lattice indices, ascending
  MorphologyGrid global;
};

// Maps every training cell onto the global lattice (off-lattice cells are
// rejected) and dilates by `local_distance` in Chebyshev lattice distance.
TestSets build_test_sets(const MorphologyGrid& training,
                         const MorphologyGrid& global,
                         const Morphology& default_morphology,
                         int local_distance = 6);

// Per-cell mean reward of the ensemble (dispatch per cell) over n_eval
// episodes with seeds episode_seed(seed_root, cell, k).
FitnessGrid sweep(const Environment& env, const GeneralistArchive& archive,
                  const MorphologyGrid& lattice, int n_eval,
                  std::uint64_t seed_root, int eval_threads = 1);

// Same for a single controller.
FitnessGrid sweep(const Environment& env, const NetworkTopology& topology,
                  std::span<const double> params, const MorphologyGrid& lattice,
                  int n_eval, std::uint64_t seed_root, int eval_threads = 1);

struct SufficiencyCount {
  int count = 0;
  double fraction = 0.0;
};

// Cells whose mean reward meets the threshold.
SufficiencyCount sufficiency_count(const FitnessGrid& grid, double threshold);

struct MetricSummary {
  double default_fitness = 0.0;  // negated mean reward on the default cell
  double local_mean = 0.0;       // negated mean reward over the local set
  double global_mean = 0.0;      // negated mean reward over the global set
  SufficiencyCount sufficiency;  // over the global set
};

// One global sweep drives the local/global means and the sufficiency count;
// the default cell is evaluated separately (kDefaultEval stream).
MetricSummary summarize(const Environment& env, const GeneralistArchive& archive,
                        const TestSets& sets, int n_eval, std::uint64_t seed_root,
                        int eval_threads = 1);

MetricSummary summarize_grid(const FitnessGrid& global_sweep,
                             const TestSets& sets, double default_fitness,
                             double sufficiency_threshold);

// CSV with header x_param,y_param,mean_reward,n_eval; %.17g doubles, LF
// endings; bit-exact for equal seeds and loss-free to re-parse.
std::string fitness_grid_to_csv(const FitnessGrid& grid);
FitnessGrid fitness_grid_from_csv(const std::string& csv_text);

}  // namespace morphevo
