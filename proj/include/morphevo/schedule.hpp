#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morphevo/env.hpp"

namespace morphevo {

// Row-major lattice of morphologies: cell k has lattice coordinates
// (i, j) = (k % nx, k / nx) and parameters (x0 + i*dx, y0 + j*dy). The
// incremental training order is exactly the cell order (x axis first).
struct MorphologyGrid {
  double origin_x = 0.0, origin_y = 0.0;
  double step_x = 0.0, step_y = 0.0;
  int nx = 0, ny = 0;
  std::vector<Morphology> cells;

  int size() const { return nx * ny; }
  int col(int cell) const { return cell % nx; }
  int row(int cell) const { return cell / nx; }
  const Morphology& at(int i, int j) const { return cells[static_cast<std::size_t>(j) * nx + i]; }

  static MorphologyGrid make_rect(double origin_x, double origin_y,
                                  double step_x, double step_y, int nx, int ny);

  // Square training grid of n cells (n must be a perfect square). n = 1
  // degenerates to the default morphology alone.
  static MorphologyGrid make(double origin_x, double origin_y, double step_x,
                             double step_y, int n,
                             const Morphology& default_morphology);

  bool same_lattice(const MorphologyGrid& other) const;
};

// Single-owner stateful iterator yielding one training morphology per
// generation. All draws are counter-based from the seed, so the full state
// is (draws, cursor, current, active set) and serializes trivially.
class Schedule {
 public:
  enum class Kind { kIncremental, kRandom, kRandomWalk };

  static Kind kind_from_string(const std::string& s);
  static std::string kind_to_string(Kind k);

  Schedule(Kind kind, const MorphologyGrid& grid, std::uint64_t seed,
           int walk_step = 1);

  Kind kind() const { return kind_; }
  int walk_step() const { return walk_step_; }
  const std::vector<int>& active_cells() const { return active_; }

  // Next training cell (index into the original grid).
  int next();

  // Narrow the schedule to a non-empty subset of the original grid's cells;
  // the traversal cursor is preserved. Throws on an empty subset.
  void restrict(const std::vector<int>& keep_cells);

  // Checkpoint plumbing.
  struct State {
    long draws = 0;
    int last_rank = -1;  // incremental cursor (original cell index)
    int current = -1;    // random-walk position (original cell index)
    std::vector<int> active;
  };
  State save_state() const;
  void restore_state(const State& s);

 private:
  int nx_, ny_;
  Kind kind_;
  int walk_step_;
  std::uint64_t seed_;
  std::vector<int> active_;  // sorted original cell indices
  long draws_ = 0;
  int last_rank_ = -1;
  int current_ = -1;
};

}  // namespace morphevo
