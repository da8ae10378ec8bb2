#include "morphevo/xnes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "morphevo/rng.hpp"

namespace morphevo {

int population_size(int dimension) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dimension))));
}

std::vector<double> ranking_utilities(int lambda) {
  if (lambda < 1) throw std::invalid_argument("lambda must be >= 1");
  std::vector<double> u(static_cast<std::size_t>(lambda));
  const double log_half = std::log(lambda / 2.0 + 1.0);
  double sum = 0.0;
  for (int k = 0; k < lambda; ++k) {
    u[k] = std::max(0.0, log_half - std::log(static_cast<double>(k + 1)));
    sum += u[k];
  }
  for (int k = 0; k < lambda; ++k) u[k] = u[k] / sum - 1.0 / lambda;
  return u;
}

static void validate_state(const SearchState& s) {
  if (s.mean.size() == 0) throw std::invalid_argument("xnes: empty mean");
  if (!(s.step_size > 0.0)) throw std::invalid_argument("xnes: step size must be > 0");
  if (!s.mean.allFinite()) throw std::invalid_argument("xnes: mean has non-finite entries");
  if (s.shape.rows() != s.mean.size() || s.shape.cols() != s.mean.size()) {
    throw std::invalid_argument("xnes: shape matrix dimension mismatch");
  }
}

Xnes::Xnes(Eigen::VectorXd mean0, double sigma0, std::uint64_t rng_seed) {
  state_.mean = std::move(mean0);
  state_.step_size = sigma0;
  state_.shape = Eigen::MatrixXd::Identity(state_.mean.size(), state_.mean.size());
  state_.rng_seed = rng_seed;
  validate_state(state_);
  lambda_ = population_size(dimension());
  const double d = static_cast<double>(dimension());
  eta_sigma_ = (9.0 + 3.0 * std::log(d)) / (5.0 * d * std::sqrt(d));
}

Xnes::Xnes(SearchState state) : state_(std::move(state)) {
  validate_state(state_);
  lambda_ = population_size(dimension());
  const double d = static_cast<double>(dimension());
  eta_sigma_ = (9.0 + 3.0 * std::log(d)) / (5.0 * d * std::sqrt(d));
  shape_det_ = state_.shape.determinant();
}

Population Xnes::ask() const {
  const int d = dimension();
  Population pop;
  pop.generation = state_.generation;
  pop.candidates.reserve(static_cast<std::size_t>(lambda_));
  pop.base_noise.reserve(static_cast<std::size_t>(lambda_));
  Rng rng(derive_seed(state_.rng_seed, SeedStream::kXnesAsk,
                      static_cast<std::uint64_t>(state_.generation)));
  for (int k = 0; k < lambda_; ++k) {
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z[i] = rng.normal();
    pop.base_noise.push_back(z);
    pop.candidates.push_back(state_.mean + state_.step_size * (state_.shape * z));
  }
  return pop;
}

// expm of a symmetric matrix via eigendecomposition.
static Eigen::MatrixXd expm_symmetric(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  return es.eigenvectors() *
         es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

void Xnes::tell(const Population& pop) {
  const int d = dimension();
  if (static_cast<int>(pop.candidates.size()) != lambda_ ||
      static_cast<int>(pop.base_noise.size()) != lambda_) {
    throw std::invalid_argument("xnes: population size does not match lambda");
  }
  if (pop.generation != state_.generation) {
    throw std::invalid_argument("xnes: population was not produced by ask() on this state");
  }
  if (static_cast<int>(pop.fitnesses.size()) != lambda_) {
    throw std::invalid_argument("xnes: fitnesses not filled in");
  }
  for (double f : pop.fitnesses) {
    if (!std::isfinite(f)) throw std::invalid_argument("xnes: non-finite fitness");
  }

  // Order by (fitness, index): best first, stable under ties.
  std::vector<int> order(static_cast<std::size_t>(lambda_));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pop.fitnesses[a] != pop.fitnesses[b]) return pop.fitnesses[a] < pop.fitnesses[b];
    return a < b;
  });

  // Base utilities, averaged over groups of exactly equal fitness.
  std::vector<double> u = ranking_utilities(lambda_);
  for (int start = 0; start < lambda_;) {
    int end = start + 1;
    while (end < lambda_ &&
           pop.fitnesses[order[end]] == pop.fitnesses[order[start]]) {
      ++end;
    }
    if (end - start > 1) {
      double avg = 0.0;
      for (int r = start; r < end; ++r) avg += u[r];
      avg /= (end - start);
      for (int r = start; r < end; ++r) u[r] = avg;
    }
    start = end;
  }

  Eigen::VectorXd grad_delta = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd grad_m = Eigen::MatrixXd::Zero(d, d);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  for (int r = 0; r < lambda_; ++r) {
    const Eigen::VectorXd& z = pop.base_noise[order[r]];
    grad_delta += u[r] * z;
    grad_m += u[r] * (z * z.transpose() - eye);
  }
  const double grad_sigma = grad_m.trace() / d;
  const Eigen::MatrixXd grad_b = grad_m - grad_sigma * eye;

  state_.mean += state_.step_size * (state_.shape * grad_delta);  // eta_mu = 1
  state_.step_size *= std::exp(0.5 * eta_sigma_ * grad_sigma);
  state_.shape = state_.shape * expm_symmetric(0.5 * eta_sigma_ * grad_b);
  state_.generation += 1;
  state_.evaluations += lambda_;

  shape_det_ = state_.shape.determinant();
  if (std::abs(shape_det_ - 1.0) > 1e-6) {
    throw std::runtime_error("xnes: shape determinant drifted from 1");
  }
  if (!state_.mean.allFinite() || !std::isfinite(state_.step_size)) {
    throw std::runtime_error("xnes: update produced non-finite state");
  }
}

}  // namespace morphevo
