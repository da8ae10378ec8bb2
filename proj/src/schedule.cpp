#include "morphevo/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "morphevo/rng.hpp"

namespace morphevo {

MorphologyGrid MorphologyGrid::make_rect(double origin_x, double origin_y,
                                         double step_x, double step_y, int nx,
                                         int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid shape must be >= 1x1");
  MorphologyGrid g;
  g.origin_x = origin_x;
  g.origin_y = origin_y;
  g.step_x = step_x;
  g.step_y = step_y;
  g.nx = nx;
  g.ny = ny;
  g.cells.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Morphology m{origin_x + i * step_x, origin_y + j * step_y,
                   j * nx + i};
      if (!m.valid()) {
        throw std::invalid_argument("grid contains non-positive morphology parameters");
      }
      g.cells.push_back(m);
    }
  }
  return g;
}

MorphologyGrid MorphologyGrid::make(double origin_x, double origin_y,
                                    double step_x, double step_y, int n,
                                    const Morphology& default_morphology) {
  if (n < 1) throw std::invalid_argument("grid size must be >= 1");
  if (n == 1) {
    MorphologyGrid g;
    g.origin_x = default_morphology.x;
    g.origin_y = default_morphology.y;
    g.step_x = step_x;
    g.step_y = step_y;
    g.nx = 1;
    g.ny = 1;
    Morphology m = default_morphology;
    m.cell = 0;
    if (!m.valid()) throw std::invalid_argument("default morphology invalid");
    g.cells.push_back(m);
    return g;
  }
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (side * side != n) {
    throw std::invalid_argument("training set size " + std::to_string(n) +
                                " is not a perfect square");
  }
  return make_rect(origin_x, origin_y, step_x, step_y, side, side);
}

bool MorphologyGrid::same_lattice(const MorphologyGrid& other) const {
  return origin_x == other.origin_x && origin_y == other.origin_y &&
         step_x == other.step_x && step_y == other.step_y && nx == other.nx &&
         ny == other.ny;
}

Schedule::Kind Schedule::kind_from_string(const std::string& s) {
  if (s == "incremental") return Kind::kIncremental;
  if (s == "random") return Kind::kRandom;
  if (s == "random_walk") return Kind::kRandomWalk;
  throw std::invalid_argument("unknown schedule kind: " + s);
}

std::string Schedule::kind_to_string(Kind k) {
  switch (k) {
    case Kind::kIncremental: return "incremental";
    case Kind::kRandom: return "random";
    case Kind::kRandomWalk: return "random_walk";
  }
  return "?";
}

Schedule::Schedule(Kind kind, const MorphologyGrid& grid, std::uint64_t seed,
                   int walk_step)
    : nx_(grid.nx), ny_(grid.ny), kind_(kind), walk_step_(walk_step), seed_(seed) {
  if (grid.size() < 1) throw std::invalid_argument("schedule needs a non-empty grid");
  if (walk_step_ < 1) throw std::invalid_argument("walk step must be >= 1");
  active_.resize(static_cast<std::size_t>(grid.size()));
  for (int k = 0; k < grid.size(); ++k) active_[static_cast<std::size_t>(k)] = k;
}

int Schedule::next() {
  const auto draw_index = [&](std::uint64_t n) {
    Rng rng(derive_seed(seed_, SeedStream::kScheduleDraw,
                        static_cast<std::uint64_t>(draws_)));
    return static_cast<int>(rng.uniform_int(n));
  };

  int cell = -1;
  switch (kind_) {
    case Kind::kIncremental: {
      // Smallest active rank above the cursor, wrapping around.
      auto it = std::upper_bound(active_.begin(), active_.end(), last_rank_);
      if (it == active_.end()) it = active_.begin();
      cell = *it;
      last_rank_ = cell;
      break;
    }
    case Kind::kRandom: {
      cell = active_[static_cast<std::size_t>(draw_index(active_.size()))];
      break;
    }
    case Kind::kRandomWalk: {
      if (current_ < 0) {
        cell = active_[static_cast<std::size_t>(draw_index(active_.size()))];
      } else {
        const int ci = current_ % nx_;
        const int cj = current_ / nx_;
        std::vector<int> neighbors;
        for (int c : active_) {
          if (c == current_) continue;
          const int di = std::abs(c % nx_ - ci);
          const int dj = std::abs(c / nx_ - cj);
          if (di <= walk_step_ && dj <= walk_step_) neighbors.push_back(c);
        }
        if (neighbors.empty()) {
          // Isolated position: self-loop when still active, otherwise the
          // walk restarts uniformly inside the subset.
          const bool current_active =
              std::binary_search(active_.begin(), active_.end(), current_);
          cell = current_active
                     ? current_
                     : active_[static_cast<std::size_t>(draw_index(active_.size()))];
        } else {
          cell = neighbors[static_cast<std::size_t>(draw_index(neighbors.size()))];
        }
      }
      current_ = cell;
      break;
    }
  }
  ++draws_;
  return cell;
}

void Schedule::restrict(const std::vector<int>& keep_cells) {
  if (keep_cells.empty()) throw std::invalid_argument("schedule restriction is empty");
  std::vector<int> keep = keep_cells;
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int c : keep) {
    if (!std::binary_search(active_.begin(), active_.end(), c)) {
      throw std::invalid_argument("restriction cell " + std::to_string(c) +
                                  " is not in the active set");
    }
  }
  active_ = std::move(keep);
}

Schedule::State Schedule::save_state() const {
  return {draws_, last_rank_, current_, active_};
}

void Schedule::restore_state(const State& s) {
  draws_ = s.draws;
  last_rank_ = s.last_rank;
  current_ = s.current;
  active_ = s.active;
}

}  // namespace morphevo
