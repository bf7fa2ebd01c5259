#pragma once

#include <Eigen/Dense>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "plainwalk/group.hpp"

namespace plainwalk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Finitely supported probability measure p = (p_g) on the group, support K
// given by reduced words (the empty word carries the identity mass p_e).
struct ScalarWalkSpec {
  std::shared_ptr<const PlainGroup> group;
  std::vector<Word> support;
  std::vector<double> probs;

  double identity_mass() const;
  int max_word_length() const;  // l_K
  double prob_of(const Word& w) const;
  bool is_symmetric(double tol = 1e-12) const;  // p_g == p_{g^-1}
  bool is_nearest_neighbor() const;             // support in S u {e}
  double mean_length() const;                   // E|X_1|
  double mean_square_length() const;            // E|X_1|^2
  void check() const;
};

// Colored walk data: r x r nonnegative matrices p_g for g in S plus an
// optional identity block p_e; P = p_e + sum_g p_g must be row-stochastic.
struct ColoredKernel {
  std::shared_ptr<const PlainGroup> group;
  int r = 1;
  std::vector<Matrix> p;  // indexed by letter, |S| entries
  Matrix p_e;

  ColoredKernel() = default;
  ColoredKernel(std::shared_ptr<const PlainGroup> g, int colors);

  Matrix color_matrix() const;  // P
  bool has_identity_mass(double tol = 0.0) const;
  std::vector<Gen> support_letters() const;

  // r = 1 embedding of a nearest-neighbor scalar walk.
  static ColoredKernel from_scalar(const ScalarWalkSpec& p);
};

struct ColorChainSummary {
  Matrix P;
  Vector pi;
};

struct ValidationReport {
  double stochastic_residual = 0.0;
  bool color_chain_irreducible = false;
  bool support_generates = false;
  bool generation_check_capped = false;  // closure search hit its size cap
  bool ok(double tol = 1e-12) const {
    return stochastic_residual <= tol && color_chain_irreducible && support_generates;
  }
  std::string summary() const;
};

bool is_irreducible(const Matrix& P);

// Unique invariant law of an irreducible stochastic matrix; direct linear
// solve with a power-iteration fallback, residual ||pi P - pi||_inf <= tol.
Vector stationary_pi(const Matrix& P, double tol = 1e-12);

ValidationReport validate(const ColoredKernel& k);
ColorChainSummary color_chain(const ColoredKernel& k);

// Group-generation test shared by scalar and colored validation.
bool support_generates_group(const PlainGroup& g, const std::vector<Word>& support, bool* capped = nullptr);

struct ReversibilityReport {
  bool reversible = false;
  double max_violation = 0.0;
};
// Detailed balance pi(u) p_g(u,v) = pi(v) p_{g^-1}(v,u).
ReversibilityReport check_reversible(const ColoredKernel& k, double tol = 1e-12);

struct WalkState {
  Word position;
  int color = 0;
};

// One transition of the colored chain; the caller owns the RNG stream.
void step(WalkState& s, const ColoredKernel& k, std::mt19937_64& rng);

// Sampling tables for repeated stepping (cumulative masses per color).
struct KernelSampler {
  explicit KernelSampler(const ColoredKernel& k);
  // letter = -1 encodes the identity move
  struct Move {
    Gen letter;
    int color;
    double cum;
  };
  std::vector<std::vector<Move>> rows;  // per starting color
  const ColoredKernel* kernel;
  void step(WalkState& s, std::mt19937_64& rng) const;
};

}  // namespace plainwalk
