#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "morphevo/env.hpp"
#include "morphevo/net.hpp"
#include "morphevo/schedule.hpp"
#include "morphevo/xnes.hpp"

namespace morphevo {

struct RunBudget {
  long max_generations = 5000;     // shared across all branches of a run
  int stagnation_window = 50;      // h
  double satisfaction_target = 0.0;
  double outlier_std_multiplier = 1.0;
};

struct ArchiveEntry {
  std::vector<double> params;
  std::vector<int> cluster;  // original grid cell indices, ascending
  double mean_fitness = 0.0;
  long generations_used = 0;
};

// Final controller ensemble: disjoint clusters partitioning the handled
// part of the training grid, plus the cells no branch got to.
struct GeneralistArchive {
  NetworkTopology topology;
  MorphologyGrid grid;
  std::vector<ArchiveEntry> entries;
  std::vector<int> uncovered;
};

// One line of the per-generation branch log.
struct TraceRecord {
  int branch = 0;
  long generation = 0;         // across branches
  long branch_generation = 0;  // within the branch
  int cell = -1;               // morphology trained on this generation
  double f_best = 0.0;         // best candidate fitness on that morphology
  double f_prime = 0.0;        // I_best mean fitness over M
  double f_hat = 0.0;          // champion mean fitness over M
  int stagnation_counter = 0;
  std::vector<int> removed_cells;       // outliers moved to O this generation
  std::vector<double> removed_fitness;  // their fitness at the removal sweep
  double removal_threshold = 0.0;       // mean + multiplier*std of that sweep
  std::string end_reason;  // "satisfied" | "no_removal" | "budget" on the
                           // branch's final record, else empty
};

using TraceSink = std::function<void(const TraceRecord&)>;

// Mean of negated episode rewards of one controller over a morphology set,
// one episode per cell, seeded per cell.
double mean_fitness(const Environment& env, const NetworkTopology& topology,
                    std::span<const double> params, std::span<const int> cells,
                    const MorphologyGrid& grid,
                    const std::function<std::uint64_t(int)>& seed_for_cell,
                    int eval_threads = 1);

// Indices whose fitness is strictly worse than mean + multiplier * population
// std. The removal rule of the branching step, exposed for direct testing.
std::vector<int> outlier_indices(std::span<const double> fitnesses,
                                 double multiplier);
double outlier_threshold(std::span<const double> fitnesses, double multiplier);

struct RunConfig {
  NetworkTopology topology;
  MorphologyGrid grid;
  Schedule::Kind schedule_kind = Schedule::Kind::kIncremental;
  int walk_step = 1;
  double sigma0 = 0.1;
  RunBudget budget;
  std::uint64_t run_seed = 0;
  int eval_threads = 1;
};

// One evolutionary run as a resumable state machine: repeated branches of
// the inner loop (schedule -> ask -> evaluate -> tell -> cross-evaluate ->
// champion update -> stagnation/branching), each restart on the outlier set
// with a clean slate, until the outlier set is empty or the generation
// budget is spent.
class GeneralistRun {
 public:
  GeneralistRun(const Environment& env, RunConfig config, TraceSink sink = {});

  bool finished() const { return finished_; }
  long generations_used() const { return global_generation_; }

  // Advances one generation (or finalizes the run); returns !finished().
  bool step();
  void run() {
    while (step()) {
    }
  }

  // Valid once finished(); partial (uncovered non-empty) iff the budget ran
  // out first.
  const GeneralistArchive& archive() const;

  nlohmann::json checkpoint() const;
  void restore(const nlohmann::json& snapshot);

 private:
  void begin_branch();
  void end_branch(const std::string& reason, TraceRecord& record);
  void finalize();
  double cross_evaluate(std::span<const double> params,
                        std::vector<double>* per_cell) const;

  const Environment& env_;
  RunConfig cfg_;
  TraceSink sink_;
  std::uint64_t cross_eval_root_ = 0;

  int branch_ = 0;
  long global_generation_ = 0;
  long branch_generation_ = 0;
  std::vector<int> active_;    // M
  std::vector<int> outliers_;  // O
  std::optional<Xnes> xnes_;
  std::optional<Schedule> schedule_;
  std::vector<double> champion_;
  double champion_fitness_ = std::numeric_limits<double>::infinity();
  double best_f_best_ = std::numeric_limits<double>::infinity();
  int stagnation_counter_ = 0;
  bool finished_ = false;
  GeneralistArchive archive_;
};

// Entry index serving a morphology: its cluster's entry when it is a member,
// otherwise the entry whose cluster comes closest in grid-step-normalized
// distance (ties to the earliest entry). Throws on an empty archive.
int dispatch(const GeneralistArchive& archive, const Morphology& morphology);

}  // namespace morphevo
