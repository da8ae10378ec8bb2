#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace morphevo {

// Exponential Natural Evolution Strategies over flat real vectors,
// minimization convention. Sampling is counter-based: ask() derives its
// noise stream from (rng_seed, generation), so a state snapshot alone
// reproduces the run exactly.

struct SearchState {
  Eigen::VectorXd mean;
  double step_size = 0.0;      // sigma > 0
  Eigen::MatrixXd shape;       // B, |det(B) - 1| <= 1e-6
  long generation = 0;
  long evaluations = 0;
  std::uint64_t rng_seed = 0;
};

struct Population {
  long generation = 0;  // generation of the state this was asked from
  std::vector<Eigen::VectorXd> candidates;
  std::vector<Eigen::VectorXd> base_noise;  // z_k with candidate = mean + sigma*B*z_k
  std::vector<double> fitnesses;            // filled by the caller before tell()
};

// lambda = 4 + floor(3 ln d)
int population_size(int dimension);

// Rank-based utilities u_k = max(0, ln(lambda/2+1) - ln(rank)) normalized to
// sum 1 and shifted by -1/lambda; index 0 is the best rank. Non-increasing,
// sums to 0.
std::vector<double> ranking_utilities(int lambda);

class Xnes {
 public:
  // B = I. Throws std::invalid_argument if sigma0 <= 0 or mean0 is empty or
  // non-finite.
  Xnes(Eigen::VectorXd mean0, double sigma0, std::uint64_t rng_seed);
  // Resume from a snapshot (validated).
  explicit Xnes(SearchState state);

  const SearchState& state() const { return state_; }
  int dimension() const { return static_cast<int>(state_.mean.size()); }
  int lambda() const { return lambda_; }

  // Samples lambda candidates; deterministic given (rng_seed, generation).
  Population ask() const;

  // Natural-gradient update from a population produced by ask() on this
  // state, with all fitnesses filled in (finite). Utilities are averaged
  // across candidates with exactly equal fitness so symmetric populations
  // leave the mean unchanged. eta_mu = 1, eta_sigma = eta_B =
  // (9 + 3 ln d) / (5 d sqrt(d)).
  void tell(const Population& population);

  // det(B) after the most recent update (1.0 before any update).
  double shape_determinant() const { return shape_det_; }

 private:
  SearchState state_;
  int lambda_;
  double eta_sigma_;
  double shape_det_ = 1.0;
};

}  // namespace morphevo
