#include "morphevo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "morphevo/parallel.hpp"
#include "morphevo/rng.hpp"

namespace morphevo {

// Lattice coordinates of a point on the global grid; throws when the point
// is not a lattice cell.
static std::pair<int, int> lattice_coords(const MorphologyGrid& g, double x,
                                          double y, const char* what) {
  const int i = static_cast<int>(std::lround((x - g.origin_x) / g.step_x));
  const int j = static_cast<int>(std::lround((y - g.origin_y) / g.step_y));
  const bool on = i >= 0 && i < g.nx && j >= 0 && j < g.ny &&
                  std::abs(g.origin_x + i * g.step_x - x) <= 1e-9 * std::abs(g.step_x) &&
                  std::abs(g.origin_y + j * g.step_y - y) <= 1e-9 * std::abs(g.step_y);
  if (!on) {
    throw std::invalid_argument(std::string(what) + " (" + std::to_string(x) +
                                ", " + std::to_string(y) +
                                ") is not a cell of the global lattice");
  }
  return {i, j};
}

TestSets build_test_sets(const MorphologyGrid& training,
                         const MorphologyGrid& global,
                         const Morphology& default_morphology,
                         int local_distance) {
  if (local_distance < 0) throw std::invalid_argument("local distance must be >= 0");
  TestSets sets;
  sets.default_cell = default_morphology;
  sets.global = global;

  std::set<int> local;
  for (const Morphology& m : training.cells) {
    const auto [ti, tj] = lattice_coords(global, m.x, m.y, "training cell");
    sets.training_cells.push_back(tj * global.nx + ti);
    const int ilo = std::max(0, ti - local_distance);
    const int ihi = std::min(global.nx - 1, ti + local_distance);
    const int jlo = std::max(0, tj - local_distance);
    const int jhi = std::min(global.ny - 1, tj + local_distance);
    for (int j = jlo; j <= jhi; ++j) {
      for (int i = ilo; i <= ihi; ++i) local.insert(j * global.nx + i);
    }
  }
  sets.local_cells.assign(local.begin(), local.end());
  return sets;
}

static FitnessGrid sweep_impl(
    const Environment& env, const MorphologyGrid& lattice, int n_eval,
    std::uint64_t seed_root, int eval_threads,
    const std::function<const PolicyFn&(const Morphology&)>& policy_for) {
  if (n_eval < 1) throw std::invalid_argument("n_eval must be >= 1");
  FitnessGrid out;
  out.grid = lattice;
  out.n_eval = n_eval;
  out.mean_reward.assign(static_cast<std::size_t>(lattice.size()), 0.0);
  parallel_for(lattice.size(), eval_threads, [&](int cell) {
    const Morphology& m = lattice.cells[static_cast<std::size_t>(cell)];
    const PolicyFn& policy = policy_for(m);
    double sum = 0.0;
    for (int k = 0; k < n_eval; ++k) {
      sum += env.run_episode(m, policy,
                             episode_seed(seed_root, static_cast<std::uint64_t>(cell),
                                          static_cast<std::uint64_t>(k)))
                 .reward_total;
    }
    out.mean_reward[static_cast<std::size_t>(cell)] = sum / n_eval;
  });
  return out;
}

FitnessGrid sweep(const Environment& env, const GeneralistArchive& archive,
                  const MorphologyGrid& lattice, int n_eval,
                  std::uint64_t seed_root, int eval_threads) {
  if (archive.entries.empty()) throw std::invalid_argument("sweep of an empty archive");
  std::vector<PolicyFn> policies;
  policies.reserve(archive.entries.size());
  for (const auto& e : archive.entries) {
    policies.push_back(make_network_policy(archive.topology, e.params));
  }
  return sweep_impl(env, lattice, n_eval, seed_root, eval_threads,
                    [&](const Morphology& m) -> const PolicyFn& {
                      return policies[static_cast<std::size_t>(dispatch(archive, m))];
                    });
}

FitnessGrid sweep(const Environment& env, const NetworkTopology& topology,
                  std::span<const double> params, const MorphologyGrid& lattice,
                  int n_eval, std::uint64_t seed_root, int eval_threads) {
  const PolicyFn policy =
      make_network_policy(topology, std::vector<double>(params.begin(), params.end()));
  return sweep_impl(env, lattice, n_eval, seed_root, eval_threads,
                    [&](const Morphology&) -> const PolicyFn& { return policy; });
}

SufficiencyCount sufficiency_count(const FitnessGrid& grid, double threshold) {
  SufficiencyCount s;
  for (double r : grid.mean_reward) {
    if (r >= threshold) ++s.count;
  }
  s.fraction = grid.mean_reward.empty()
                   ? 0.0
                   : static_cast<double>(s.count) /
                         static_cast<double>(grid.mean_reward.size());
  return s;
}

MetricSummary summarize_grid(const FitnessGrid& global_sweep,
                             const TestSets& sets, double default_fitness,
                             double sufficiency_threshold) {
  if (!global_sweep.grid.same_lattice(sets.global)) {
    throw std::invalid_argument("fitness grid does not match the global lattice");
  }
  MetricSummary s;
  s.default_fitness = default_fitness;
  double local_sum = 0.0;
  for (int cell : sets.local_cells) {
    local_sum += global_sweep.mean_reward[static_cast<std::size_t>(cell)];
  }
  s.local_mean = -local_sum / static_cast<double>(sets.local_cells.size());
  double global_sum = 0.0;
  for (double r : global_sweep.mean_reward) global_sum += r;
  s.global_mean = -global_sum / static_cast<double>(global_sweep.mean_reward.size());
  s.sufficiency = sufficiency_count(global_sweep, sufficiency_threshold);
  return s;
}

MetricSummary summarize(const Environment& env, const GeneralistArchive& archive,
                        const TestSets& sets, int n_eval, std::uint64_t seed_root,
                        int eval_threads) {
  const FitnessGrid global_sweep =
      sweep(env, archive, sets.global, n_eval, seed_root, eval_threads);

  const PolicyFn default_policy = make_network_policy(
      archive.topology,
      archive.entries[static_cast<std::size_t>(dispatch(archive, sets.default_cell))]
          .params);
  const std::uint64_t default_root = derive_seed(seed_root, SeedStream::kDefaultEval);
  double sum = 0.0;
  for (int k = 0; k < n_eval; ++k) {
    sum += env.run_episode(sets.default_cell, default_policy,
                           episode_seed(default_root, 0, static_cast<std::uint64_t>(k)))
               .reward_total;
  }
  return summarize_grid(global_sweep, sets, -sum / n_eval,
                        env.spec().sufficiency_threshold);
}

std::string fitness_grid_to_csv(const FitnessGrid& grid) {
  std::string out = "x_param,y_param,mean_reward,n_eval\n";
  char buf[96];
  for (int cell = 0; cell < grid.grid.size(); ++cell) {
    const Morphology& m = grid.grid.cells[static_cast<std::size_t>(cell)];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d\n", m.x, m.y,
                  grid.mean_reward[static_cast<std::size_t>(cell)], grid.n_eval);
    out += buf;
  }
  return out;
}

FitnessGrid fitness_grid_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line) || line != "x_param,y_param,mean_reward,n_eval") {
    throw std::invalid_argument("fitness grid CSV: bad header");
  }
  std::vector<double> xs, ys, rewards;
  int n_eval = 1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    double x = 0, y = 0, r = 0;
    int n = 0;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%d", &x, &y, &r, &n) != 4) {
      throw std::invalid_argument("fitness grid CSV: parse error at line " +
                                  std::to_string(line_no));
    }
    xs.push_back(x);
    ys.push_back(y);
    rewards.push_back(r);
    n_eval = n;
  }
  if (rewards.empty()) throw std::invalid_argument("fitness grid CSV: no rows");

  std::set<double> ux(xs.begin(), xs.end()), uy(ys.begin(), ys.end());
  const int nx = static_cast<int>(ux.size());
  const int ny = static_cast<int>(uy.size());
  if (nx * ny != static_cast<int>(rewards.size())) {
    throw std::invalid_argument("fitness grid CSV: rows do not form a lattice");
  }
  FitnessGrid out;
  out.grid.origin_x = *ux.begin();
  out.grid.origin_y = *uy.begin();
  out.grid.step_x = nx > 1 ? (*ux.rbegin() - *ux.begin()) / (nx - 1) : 1.0;
  out.grid.step_y = ny > 1 ? (*uy.rbegin() - *uy.begin()) / (ny - 1) : 1.0;
  out.grid.nx = nx;
  out.grid.ny = ny;
  out.n_eval = n_eval;
  out.grid.cells.resize(rewards.size());
  out.mean_reward.resize(rewards.size());
  std::map<double, int> xi, yj;
  int c = 0;
  for (double v : ux) xi[v] = c++;
  c = 0;
  for (double v : uy) yj[v] = c++;
  std::vector<bool> seen(rewards.size(), false);
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    const int cell = yj[ys[k]] * nx + xi[xs[k]];
    out.grid.cells[static_cast<std::size_t>(cell)] = {xs[k], ys[k], cell};
    out.mean_reward[static_cast<std::size_t>(cell)] = rewards[k];
    seen[static_cast<std::size_t>(cell)] = true;
  }
  for (bool s : seen) {
    if (!s) throw std::invalid_argument("fitness grid CSV: duplicate or missing cells");
  }
  return out;
}

}  // namespace morphevo
