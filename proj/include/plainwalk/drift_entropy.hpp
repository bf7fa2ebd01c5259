#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "plainwalk/boundary.hpp"
#include "plainwalk/kernel.hpp"

namespace plainwalk {

struct DriftReport {
  double value = 0.0;
  std::string method;  // exact | mc | closed-form-oracle
  double ci_half_width = 0.0;
  long n_samples = 0;
};

// gamma = sum_g <1, pi p_g (-mu_{g^-1} + sum_{h in Next(g)} mu_h)>.
DriftReport drift_exact(const ColoredKernel& k, const TrafficSolution& t);

// Sampler for the boundary measures nu_u on the open simplex: the law of the
// limit direction of q_{xi_1} q_{xi_2} ... along the boundary word started at
// color u. Words are drawn from the mu-chain (first letter unrestricted, then
// Next-restricted and Delta-normalized); points are truncated products of
// depth D applied to the uniform base point.
class NuSampler {
 public:
  NuSampler(const ColoredKernel& k, const HittingMatrices& h, const TrafficSolution& t, int depth = 0,
            std::uint64_t calibration_seed = 7);

  int depth() const { return depth_; }
  double depth_doubling_delta() const { return doubling_delta_; }
  Vector sample(int color, std::mt19937_64& rng) const;
  // law of the limit direction conditional on the first boundary step being
  // (letter, color): the chain continues Next-restricted from that state
  Vector sample_from(Gen letter, int color, std::mt19937_64& rng) const;

 private:
  struct Arrow {
    Gen letter;
    int color;
    double cum;
  };
  const ColoredKernel* kernel_;
  const HittingMatrices* hitting_;
  std::vector<std::vector<Arrow>> first_;                // per color
  std::vector<std::vector<std::vector<Arrow>>> chain_;   // per (letter, color)
  int depth_ = 0;
  double doubling_delta_ = 0.0;

  void draw_letters(int color, int depth, std::vector<Gen>& out, std::mt19937_64& rng) const;
  Vector product_point(const std::vector<Gen>& letters, int depth) const;
  void calibrate(int cap, std::uint64_t seed);
};

struct EntropyReport {
  double value = 0.0;
  std::string method;
  double ci_half_width = 0.0;
  long n_samples = 0;  // per color
  int depth = 0;
  double depth_doubling_delta = 0.0;
  std::uint64_t seed = 0;
};

// Explicit entropy formula with the boundary integrals estimated by Monte
// Carlo. Each term of the triple sum integrates against the law of the limit
// direction conditional on the first boundary step (xi_1, u_1) - the
// invariant family of the Delta-normalized chain - sampled by
// NuSampler::sample_from. n_samples is per (letter, color) state.
EntropyReport entropy_explicit_mc(const ColoredKernel& k, const BoundarySolution& b, long n_samples,
                                  std::uint64_t seed, int depth = 0, int threads = 0);

// r = 1 closed form
//   h = -sum_g p_g ( mu_{g^-1} log(1/q_{g^-1}) + sum_{h in Next(g)} mu_h log q_g
//                    + sum_{h: gh in S} mu_h log(q_{gh}/q_h) ).
double entropy_colorless_closed(const ColoredKernel& k, const BoundarySolution& b);

// Radon-Nikodym derivative d(g p^inf_v)/d p^inf_u at a boundary point with
// first letter xi_1 and limit direction V. V is the direction of the whole
// word for the prepend case (xi_1 in Next(g^-1)) and of the shifted word for
// the cancel (xi_1 = g) and merge (g^-1 xi_1 in S) cases.
double rn_derivative(Gen g, int u, int v, const Word& xi_prefix, const Vector& V, const ColoredKernel& k,
                     const HittingMatrices& h);

// gamma = E[tau_1] gamma~, h = E[tau_1] h~.
std::pair<double, double> relate_renewal(double expected_tau, double tilde_gamma, double tilde_h);

// Uniform-length walk on G_1 * G_2 (both finite): a step is a uniform word of
// length n starting in factor i with probability p_i(n), n = 1..L.
struct ApplicationWalkParams {
  int L = 1;
  int k1 = 2;  // |G_1| - 1
  int k2 = 2;
  std::vector<double> p1;  // p_1(n), n = 1..L
  std::vector<double> p2;
  void check() const;
};

// Drift via the two-block matrices Q, Q~ of the last-letter chain; exact up
// to the stationary-law solve. Used as an oracle against the main pipeline.
double application_drift_oracle(const ApplicationWalkParams& params);

// The same walk as an explicit scalar spec on Z/(k1+1) * Z/(k2+1)-style
// factors, for feeding the linearize -> solve -> drift pipeline.
ScalarWalkSpec application_walk(const ApplicationWalkParams& params);

}  // namespace plainwalk
