#pragma once

#include <cstdint>
#include <vector>

#include "plainwalk/linearize.hpp"

namespace plainwalk {

struct DriftEstimate {
  double estimate = 0.0;  // mean |X_T| / T
  double ci_half_width = 0.0;
  // windowed estimator mean(|X_T| - |X_{T/2}|) / (T - T/2); same limit,
  // without the O(1/T) near-origin bias of |X_T|/T
  double slope_estimate = 0.0;
  double slope_ci_half_width = 0.0;
  long n_paths = 0;
  long horizon = 0;
};

DriftEstimate empirical_drift(const ColoredKernel& k, long n_paths, long T, std::uint64_t seed, int start_color = 0,
                              int threads = 0);
DriftEstimate empirical_drift(const ScalarWalkSpec& w, long n_paths, long T, std::uint64_t seed, int threads = 0);

struct TrajectoryBatch {
  long n_paths = 0;
  long horizon = 0;
  std::uint64_t seed = 0;
  std::vector<double> mean_abs;  // mean |X_t| for t = 0..T
};

TrajectoryBatch trajectory_batch(const ScalarWalkSpec& w, long n_paths, long T, std::uint64_t seed, int threads = 0);
TrajectoryBatch trajectory_batch(const ColoredKernel& k, long n_paths, long T, std::uint64_t seed,
                                 int start_color = 0, int threads = 0);

// Least-squares slope of series[t] over t in [lo, hi].
double series_slope(const std::vector<double>& series, long lo, long hi);

struct EntropyEstimate {
  double estimate = 0.0;  // mean of -log P^T(e, X_T) / T over sampled endpoints
  double ci_half_width = 0.0;
  double exact_entropy_rate = 0.0;  // H(X_T)/T from the same exact table
  long n_samples = 0;
  std::size_t n_states = 0;
  long horizon = 0;
};

// Exact P^T(e, .) by convolution over the reachable reduced-word set (hash
// DP); errors out beyond max_states (use the random-action estimator then).
EntropyEstimate empirical_entropy_logp(const ScalarWalkSpec& w, long T, long n_samples, std::uint64_t seed,
                                       std::size_t max_states = 30000000);
EntropyEstimate empirical_entropy_logp(const ColoredKernel& k, int start_color, long T, long n_samples,
                                       std::uint64_t seed, std::size_t max_states = 30000000);

struct RandomActionSeries {
  long n = 0;  // permutation size
  std::vector<double> entropy;  // H_t of the projected walk, t = 0..T
  std::vector<char> saturated;  // 1 where h_reference * t > ln n
  double slope = 0.0;           // OLS slope over the non-saturated window
  long window_end = 0;
};

// Entropy series of the walk projected through independent uniform
// permutations of [n], one per free generator; valid while h t <= ln n.
RandomActionSeries random_action_entropy(const ScalarWalkSpec& w, long n, long T, std::uint64_t seed,
                                         double h_reference);

struct RenewalStats {
  double mean_gap = 0.0;
  double gap_ci_half_width = 0.0;
  double lag1_corr = 0.0;
  double lag1_sigma = 0.0;  // ~ 1/sqrt(#gaps)
  long n_gaps = 0;
  double law_max_z = 0.0;  // max binomial z-score of renewal increments vs p
};

RenewalStats renewal_statistics(const LinearizationResult& lin, const ScalarWalkSpec& w, long n_gaps,
                                std::uint64_t seed);

}  // namespace plainwalk
