#pragma once

#include <map>
#include <utility>
#include <vector>

#include "plainwalk/kernel.hpp"

namespace plainwalk {

// Strict prefixes of the support representatives, ordered length-major then
// lexicographically in letter indices, with cumulative masses and ratios.
struct PrefixTree {
  std::vector<Word> prefixes;
  std::map<Word, int> index;   // prefix -> position in `prefixes`
  std::vector<double> mass;    // p_[w]
  std::vector<double> ratio;   // q_w = p_[w] / p_[parent(w)], p_[empty] := 1

  static PrefixTree build(const ScalarWalkSpec& walk);
};

enum class Construction { Prefix, Reversible };

struct LinearizationResult {
  ColoredKernel kernel;
  Construction construction = Construction::Prefix;
  std::vector<std::string> color_labels;  // color 0 is the neutral color
  double expected_return_time = 1.0;      // E[tau_1] from the closed formula
  // 1 + Card(K') - Card(K) with K' the suffixes of support representatives;
  // reported alongside the enumerated color count (they can differ).
  int suffix_count_estimate = 0;
};

// Nearest-neighbor colored walk whose returns to the neutral color replay the
// input walk; colors are shared along common prefixes of the support.
LinearizationResult linearize_prefix(const ScalarWalkSpec& walk);

// Reversibility-preserving variant: one segment of interior colors per
// inverse pair {g, g^-1}, entry weights alpha_g, interior moves 1/2.
// Requires a symmetric walk.
LinearizationResult linearize_reversible(const ScalarWalkSpec& walk);

// E[tau_1]: p_e + E|X_1| for the prefix construction; for the reversible one
// E|X_1|^2 when p_e = 0, and the lazy-walk extension otherwise.
double expected_tau(const ScalarWalkSpec& walk, Construction c);

struct FirstReturnReport {
  double max_law_error = 0.0;        // sup_g |P[Y_tau1 = g] - p_g|
  double expected_tau_error = 0.0;   // |E[tau_1] - closed formula|
  double expected_tau_exact = 0.0;
  std::vector<std::pair<Word, double>> law;  // exact law of Y_tau1
};

// Exact first-return law and E[tau_1] by absorbing-chain linear algebra on
// the finite (position, color) graph reachable before the first renewal.
FirstReturnReport verify_first_return(const LinearizationResult& lin, const ScalarWalkSpec& walk);

// Renewal times of a trajectory started at (e, neutral): returns to the
// neutral color for the prefix construction; for the reversible one the
// modified rule (immediate when the first step is the identity move,
// otherwise first neutral-color visit at a new position).
std::vector<long> extract_renewals(const std::vector<WalkState>& trajectory, const LinearizationResult& lin);

}  // namespace plainwalk
