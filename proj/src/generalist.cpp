#include "morphevo/generalist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "morphevo/parallel.hpp"
#include "morphevo/rng.hpp"

namespace morphevo {

using nlohmann::json;

double mean_fitness(const Environment& env, const NetworkTopology& topology,
                    std::span<const double> params, std::span<const int> cells,
                    const MorphologyGrid& grid,
                    const std::function<std::uint64_t(int)>& seed_for_cell,
                    int eval_threads) {
  if (cells.empty()) throw std::invalid_argument("mean_fitness: empty morphology set");
  std::vector<double> fitness(cells.size());
  std::vector<double> p(params.begin(), params.end());
  const PolicyFn policy = make_network_policy(topology, std::move(p));
  parallel_for(static_cast<int>(cells.size()), eval_threads, [&](int i) {
    const int cell = cells[static_cast<std::size_t>(i)];
    const auto result = env.run_episode(grid.cells[static_cast<std::size_t>(cell)],
                                        policy, seed_for_cell(cell));
    fitness[static_cast<std::size_t>(i)] = -result.reward_total;
  });
  double sum = 0.0;
  for (double f : fitness) sum += f;
  return sum / static_cast<double>(cells.size());
}

double outlier_threshold(std::span<const double> fitnesses, double multiplier) {
  if (fitnesses.empty()) return 0.0;
  double mean = 0.0;
  for (double f : fitnesses) mean += f;
  mean /= static_cast<double>(fitnesses.size());
  double var = 0.0;
  for (double f : fitnesses) var += (f - mean) * (f - mean);
  var /= static_cast<double>(fitnesses.size());  // population variance
  return mean + multiplier * std::sqrt(var);
}

std::vector<int> outlier_indices(std::span<const double> fitnesses,
                                 double multiplier) {
  const double threshold = outlier_threshold(fitnesses, multiplier);
  std::vector<int> out;
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    if (fitnesses[i] > threshold) out.push_back(static_cast<int>(i));
  }
  return out;
}

GeneralistRun::GeneralistRun(const Environment& env, RunConfig config,
                             TraceSink sink)
    : env_(env), cfg_(std::move(config)), sink_(std::move(sink)) {
  validate(cfg_.topology);
  if (cfg_.topology.inputs != env_.spec().observation_dim ||
      cfg_.topology.outputs != env_.spec().action_dim) {
    throw std::invalid_argument("topology does not match environment dimensions");
  }
  if (cfg_.grid.size() < 1) throw std::invalid_argument("empty training grid");
  if (!(cfg_.sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be > 0");
  if (cfg_.budget.max_generations < 0) throw std::invalid_argument("negative budget");
  if (!(cfg_.budget.outlier_std_multiplier >= 0.0)) {
    throw std::invalid_argument("outlier std multiplier must be >= 0");
  }
  cross_eval_root_ = derive_seed(cfg_.run_seed, SeedStream::kCrossEval);
  active_.resize(static_cast<std::size_t>(cfg_.grid.size()));
  std::iota(active_.begin(), active_.end(), 0);
  archive_.topology = cfg_.topology;
  archive_.grid = cfg_.grid;
}

const GeneralistArchive& GeneralistRun::archive() const {
  if (!finished_) throw std::logic_error("archive requested before the run finished");
  return archive_;
}

double GeneralistRun::cross_evaluate(std::span<const double> params,
                                     std::vector<double>* per_cell) const {
  std::vector<double> fitness(active_.size());
  std::vector<double> p(params.begin(), params.end());
  const PolicyFn policy = make_network_policy(cfg_.topology, std::move(p));
  parallel_for(static_cast<int>(active_.size()), cfg_.eval_threads, [&](int i) {
    const int cell = active_[static_cast<std::size_t>(i)];
    const auto result =
        env_.run_episode(cfg_.grid.cells[static_cast<std::size_t>(cell)], policy,
                         episode_seed(cross_eval_root_, static_cast<std::uint64_t>(cell)));
    fitness[static_cast<std::size_t>(i)] = -result.reward_total;
  });
  double sum = 0.0;
  for (double f : fitness) sum += f;
  if (per_cell) *per_cell = std::move(fitness);
  return sum / static_cast<double>(active_.size());
}

void GeneralistRun::begin_branch() {
  const int d = cfg_.topology.parameter_count();
  Rng init_rng(derive_seed(cfg_.run_seed, SeedStream::kXnesInitMean,
                           static_cast<std::uint64_t>(branch_)));
  Eigen::VectorXd mean0(d);
  for (int i = 0; i < d; ++i) mean0[i] = init_rng.uniform(-1e-5, 1e-5);
  xnes_.emplace(std::move(mean0), cfg_.sigma0,
                derive_seed(cfg_.run_seed, SeedStream::kXnesAsk,
                            static_cast<std::uint64_t>(branch_)));
  schedule_.emplace(cfg_.schedule_kind, cfg_.grid,
                    derive_seed(cfg_.run_seed, SeedStream::kScheduleDraw,
                                static_cast<std::uint64_t>(branch_)),
                    cfg_.walk_step);
  if (static_cast<int>(active_.size()) != cfg_.grid.size()) {
    schedule_->restrict(active_);
  }
  champion_.clear();
  champion_fitness_ = std::numeric_limits<double>::infinity();
  best_f_best_ = std::numeric_limits<double>::infinity();
  stagnation_counter_ = 0;
  branch_generation_ = 0;
  outliers_.clear();
}

void GeneralistRun::end_branch(const std::string& reason, TraceRecord& record) {
  record.end_reason = reason;
  ArchiveEntry entry;
  entry.params = champion_;
  entry.cluster = active_;
  entry.mean_fitness = champion_fitness_;
  entry.generations_used = branch_generation_;
  archive_.entries.push_back(std::move(entry));

  active_ = outliers_;
  std::sort(active_.begin(), active_.end());
  outliers_.clear();
  xnes_.reset();
  schedule_.reset();
  ++branch_;
}

void GeneralistRun::finalize() {
  std::sort(active_.begin(), active_.end());
  archive_.uncovered = active_;
  finished_ = true;
}

bool GeneralistRun::step() {
  if (finished_) return false;
  if (!xnes_) {
    if (active_.empty() || global_generation_ >= cfg_.budget.max_generations) {
      finalize();
      return false;
    }
    begin_branch();
  }

  TraceRecord record;
  record.branch = branch_;
  record.generation = global_generation_;
  record.branch_generation = branch_generation_;

  // (a) the scheduled morphology of this generation
  const int cell = schedule_->next();
  record.cell = cell;
  const Morphology& morph = cfg_.grid.cells[static_cast<std::size_t>(cell)];

  // (b)-(c) sample candidates, evaluate all on the scheduled morphology.
  // Candidates share the episode seed so ranks compare like with like.
  Population pop = xnes_->ask();
  pop.fitnesses.resize(pop.candidates.size());
  const std::uint64_t cand_seed =
      derive_seed(cfg_.run_seed, SeedStream::kCandidateEval,
                  static_cast<std::uint64_t>(branch_),
                  static_cast<std::uint64_t>(branch_generation_));
  parallel_for(static_cast<int>(pop.candidates.size()), cfg_.eval_threads, [&](int k) {
    const Eigen::VectorXd& c = pop.candidates[static_cast<std::size_t>(k)];
    const auto result =
        evaluate(env_, morph, cfg_.topology,
                 std::span<const double>(c.data(), static_cast<std::size_t>(c.size())),
                 cand_seed);
    pop.fitnesses[static_cast<std::size_t>(k)] = -result.reward_total;
  });

  // (d) best candidate, ties to the lowest index
  int best_index = 0;
  for (int k = 1; k < static_cast<int>(pop.fitnesses.size()); ++k) {
    if (pop.fitnesses[static_cast<std::size_t>(k)] <
        pop.fitnesses[static_cast<std::size_t>(best_index)]) {
      best_index = k;
    }
  }
  const double f_best = pop.fitnesses[static_cast<std::size_t>(best_index)];
  const Eigen::VectorXd best_vec = pop.candidates[static_cast<std::size_t>(best_index)];
  record.f_best = f_best;

  // (e) distribution update
  xnes_->tell(pop);

  // (f) cross-evaluate I_best on every m in M with the fixed per-cell seeds
  const std::span<const double> best_params(best_vec.data(),
                                            static_cast<std::size_t>(best_vec.size()));
  const double f_prime = cross_evaluate(best_params, nullptr);
  record.f_prime = f_prime;

  // (g) champion replacement on improvement only
  if (f_prime < champion_fitness_) {
    champion_.assign(best_params.begin(), best_params.end());
    champion_fitness_ = f_prime;
  }

  // stagnation bookkeeping on f_best
  if (f_best < best_f_best_ - 1e-9) {
    best_f_best_ = f_best;
    stagnation_counter_ = 0;
  } else {
    ++stagnation_counter_;
  }
  record.stagnation_counter = stagnation_counter_;

  bool ended = false;
  std::string end_reason;

  if (stagnation_counter_ >= cfg_.budget.stagnation_window && !champion_.empty()) {
    // Branching sweep: evaluate the champion per morphology and split off
    // everything worse than mean + multiplier * std.
    std::vector<double> per_cell;
    cross_evaluate(champion_, &per_cell);
    const std::vector<int> out =
        outlier_indices(per_cell, cfg_.budget.outlier_std_multiplier);
    record.removal_threshold =
        outlier_threshold(per_cell, cfg_.budget.outlier_std_multiplier);
    if (out.empty()) {
      ended = true;
      end_reason = "no_removal";
    } else {
      std::vector<int> kept;
      double kept_sum = 0.0;
      std::size_t oi = 0;
      for (std::size_t i = 0; i < active_.size(); ++i) {
        if (oi < out.size() && static_cast<int>(i) == out[oi]) {
          record.removed_cells.push_back(active_[i]);
          record.removed_fitness.push_back(per_cell[i]);
          outliers_.push_back(active_[i]);
          ++oi;
        } else {
          kept.push_back(active_[i]);
          kept_sum += per_cell[i];
        }
      }
      active_ = std::move(kept);
      schedule_->restrict(active_);
      // The champion's recorded mean now refers to the shrunken set.
      champion_fitness_ = kept_sum / static_cast<double>(active_.size());
      stagnation_counter_ = 0;
    }
  }

  record.f_hat = champion_fitness_;

  if (!ended && champion_fitness_ <= cfg_.budget.satisfaction_target) {
    ended = true;
    end_reason = "satisfied";
  }

  ++branch_generation_;
  ++global_generation_;

  if (!ended && global_generation_ >= cfg_.budget.max_generations) {
    ended = true;
    end_reason = "budget";
  }

  if (ended) end_branch(end_reason, record);
  if (sink_) sink_(record);

  if (ended && end_reason == "budget") {
    finalize();
    return false;
  }
  return !finished_;
}

// --- checkpointing ---------------------------------------------------------

static json vector_to_json(std::span<const double> v) {
  return json(std::vector<double>(v.begin(), v.end()));
}

json GeneralistRun::checkpoint() const {
  json j;
  j["kind"] = "morphevo-checkpoint";
  j["format_version"] = 1;
  j["branch"] = branch_;
  j["global_generation"] = global_generation_;
  j["branch_generation"] = branch_generation_;
  j["active"] = active_;
  j["outliers"] = outliers_;
  j["finished"] = finished_;
  j["stagnation_counter"] = stagnation_counter_;
  j["best_f_best"] =
      std::isfinite(best_f_best_) ? json(best_f_best_) : json(nullptr);
  if (champion_.empty()) {
    j["champion"] = nullptr;
  } else {
    j["champion"] = {{"params", champion_}, {"fitness", champion_fitness_}};
  }
  if (xnes_) {
    const SearchState& s = xnes_->state();
    json m = json::array();
    for (Eigen::Index i = 0; i < s.mean.size(); ++i) m.push_back(s.mean[i]);
    json rows = json::array();
    for (Eigen::Index r = 0; r < s.shape.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < s.shape.cols(); ++c) row.push_back(s.shape(r, c));
      rows.push_back(std::move(row));
    }
    j["xnes"] = {{"mean", std::move(m)},
                 {"sigma", s.step_size},
                 {"shape", std::move(rows)},
                 {"generation", s.generation},
                 {"evaluations", s.evaluations},
                 {"seed", s.rng_seed}};
  } else {
    j["xnes"] = nullptr;
  }
  if (schedule_) {
    const Schedule::State s = schedule_->save_state();
    j["schedule"] = {{"draws", s.draws},
                     {"last_rank", s.last_rank},
                     {"current", s.current},
                     {"active", s.active}};
  } else {
    j["schedule"] = nullptr;
  }
  json entries = json::array();
  for (const auto& e : archive_.entries) {
    entries.push_back({{"params", e.params},
                       {"cluster", e.cluster},
                       {"mean_fitness", e.mean_fitness},
                       {"generations_used", e.generations_used}});
  }
  j["entries"] = std::move(entries);
  j["uncovered"] = archive_.uncovered;
  return j;
}

void GeneralistRun::restore(const json& j) {
  if (!j.is_object() || j.value("kind", "") != "morphevo-checkpoint") {
    throw std::invalid_argument("not a morphevo checkpoint");
  }
  if (j.value("format_version", -1) != 1) {
    throw std::invalid_argument("unsupported checkpoint format version");
  }
  branch_ = j.at("branch").get<int>();
  global_generation_ = j.at("global_generation").get<long>();
  branch_generation_ = j.at("branch_generation").get<long>();
  active_ = j.at("active").get<std::vector<int>>();
  outliers_ = j.at("outliers").get<std::vector<int>>();
  finished_ = j.at("finished").get<bool>();
  stagnation_counter_ = j.at("stagnation_counter").get<int>();
  best_f_best_ = j.at("best_f_best").is_null()
                     ? std::numeric_limits<double>::infinity()
                     : j.at("best_f_best").get<double>();
  if (j.at("champion").is_null()) {
    champion_.clear();
    champion_fitness_ = std::numeric_limits<double>::infinity();
  } else {
    champion_ = j.at("champion").at("params").get<std::vector<double>>();
    champion_fitness_ = j.at("champion").at("fitness").get<double>();
  }
  if (j.at("xnes").is_null()) {
    xnes_.reset();
  } else {
    const json& x = j.at("xnes");
    SearchState s;
    const auto mean = x.at("mean").get<std::vector<double>>();
    s.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                               static_cast<Eigen::Index>(mean.size()));
    s.step_size = x.at("sigma").get<double>();
    const json& rows = x.at("shape");
    s.shape.resize(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto row = rows[r].get<std::vector<double>>();
      for (std::size_t c = 0; c < row.size(); ++c) {
        s.shape(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
      }
    }
    s.generation = x.at("generation").get<long>();
    s.evaluations = x.at("evaluations").get<long>();
    s.rng_seed = x.at("seed").get<std::uint64_t>();
    xnes_.emplace(std::move(s));
  }
  if (j.at("schedule").is_null()) {
    schedule_.reset();
  } else {
    const json& sj = j.at("schedule");
    schedule_.emplace(cfg_.schedule_kind, cfg_.grid,
                      derive_seed(cfg_.run_seed, SeedStream::kScheduleDraw,
                                  static_cast<std::uint64_t>(branch_)),
                      cfg_.walk_step);
    Schedule::State s;
    s.draws = sj.at("draws").get<long>();
    s.last_rank = sj.at("last_rank").get<int>();
    s.current = sj.at("current").get<int>();
    s.active = sj.at("active").get<std::vector<int>>();
    schedule_->restore_state(s);
  }
  archive_.entries.clear();
  for (const json& e : j.at("entries")) {
    ArchiveEntry entry;
    entry.params = e.at("params").get<std::vector<double>>();
    entry.cluster = e.at("cluster").get<std::vector<int>>();
    entry.mean_fitness = e.at("mean_fitness").get<double>();
    entry.generations_used = e.at("generations_used").get<long>();
    archive_.entries.push_back(std::move(entry));
  }
  archive_.uncovered = j.at("uncovered").get<std::vector<int>>();
}

int dispatch(const GeneralistArchive& archive, const Morphology& morphology) {
  if (archive.entries.empty()) {
    throw std::invalid_argument("dispatch on an empty archive");
  }
  const MorphologyGrid& grid = archive.grid;
  const double sx = grid.step_x != 0.0 ? grid.step_x : 1.0;
  const double sy = grid.step_y != 0.0 ? grid.step_y : 1.0;

  // Exact cluster membership first.
  for (std::size_t e = 0; e < archive.entries.size(); ++e) {
    for (int cell : archive.entries[e].cluster) {
      const Morphology& c = grid.cells[static_cast<std::size_t>(cell)];
      if (std::abs(c.x - morphology.x) <= 1e-9 * sx &&
          std::abs(c.y - morphology.y) <= 1e-9 * sy) {
        return static_cast<int>(e);
      }
    }
  }
  // Otherwise the nearest cluster, axes normalized by the grid steps.
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < archive.entries.size(); ++e) {
    double dist = std::numeric_limits<double>::infinity();
    for (int cell : archive.entries[e].cluster) {
      const Morphology& c = grid.cells[static_cast<std::size_t>(cell)];
      const double dx = (c.x - morphology.x) / sx;
      const double dy = (c.y - morphology.y) / sy;
      dist = std::min(dist, std::sqrt(dx * dx + dy * dy));
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(e);
    }
  }
  return best;
}

}  // namespace morphevo
