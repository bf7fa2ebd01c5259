#pragma once

#include <optional>
#include <string>
#include <vector>

namespace plainwalk {

// Letter of the generating alphabet S, stored as an index 0..|S|-1.
using Gen = int;

// Reduced word over S in normal form; one char per letter index, "" is the
// identity. Consecutive letters always satisfy the Next relation, so the
// string length equals the word length |g|.
using Word = std::string;

struct FactorSpec {
  enum class Kind { FreePair, Finite };
  Kind kind = Kind::FreePair;
  int order = 0;            // finite factors only, >= 2
  std::vector<int> mult;    // order x order row-major table, index 0 = identity

  static FactorSpec free_pair();
  // Validates the table: index 0 acts as identity, rows/columns are
  // permutations, associativity holds (checked exhaustively), inverses exist.
  static FactorSpec finite(int order, std::vector<int> table);
  static FactorSpec cyclic(int order);

  int product(int a, int b) const { return mult[a * order + b]; }
  int inverse_of(int a) const;
};

// The plain group F_d * G_1 * ... * G_m with its symmetric alphabet
//   S = { a_i, a_i^-1 } u (union of S_j, S_j = G_j \ {e}).
// Letter layout: free pairs first (a_i at 2i, a_i^-1 at 2i+1), then the
// nonidentity elements of each finite factor in element order.
class PlainGroup {
 public:
  PlainGroup(int free_rank, std::vector<FactorSpec> finite_factors = {});

  int free_rank() const { return d_; }
  int num_finite_factors() const { return static_cast<int>(factors_.size()); }
  const FactorSpec& finite_factor(int j) const { return factors_[j]; }
  int alphabet_size() const { return static_cast<int>(inv_.size()); }

  Gen inverse(Gen g) const { return inv_[g]; }
  bool is_free_letter(Gen g) const { return factor_[g] < 0; }
  int finite_factor_of(Gen g) const { return factor_[g]; }  // -1 for free letters
  bool is_involution(Gen g) const { return inv_[g] == g; }

  // Product of two letters of the same finite factor; nullopt means identity.
  std::optional<Gen> factor_product(Gen g, Gen h) const;

  const std::vector<Gen>& next_set(Gen g) const { return next_[g]; }
  bool in_next(Gen prev, Gen g) const { return next_ok_[static_cast<size_t>(prev) * inv_.size() + g] != 0; }

  bool is_reduced(const Word& w) const;
  void multiply_inplace(Word& a, Gen g) const;  // right-multiply by one letter
  Word multiply(const Word& a, const Word& b) const;
  // Multiply while counting cancellations (mutually inverse letters, in or
  // out of a finite factor) and in-factor merges, so that
  // |ab| = |a| + |b| - 2*cancels - merges.
  Word multiply_counted(const Word& a, const Word& b, int& cancels, int& merges) const;
  Word inverse_word(const Word& w) const;

  // Prefix of g.xi for a cylinder prefix xi (prepend / merge / cancel).
  Word boundary_prefix_action(Gen g, const Word& prefix) const;

  // Enumerates all reduced words of the given exact length.
  std::vector<Word> reduced_words(int length) const;

  std::string letter_name(Gen g) const;
  std::optional<Gen> letter_from_name(const std::string& name) const;
  Word word_from_names(const std::string& spaced) const;  // "e" or "" = identity
  std::string word_name(const Word& w) const;

  // False exactly for the amenable degenerate cases: finite groups, Z, and
  // Z/2 * Z/2. The boundary theory requires a nonamenable plain group.
  bool is_nonamenable() const;
  // F_d * Z/2 * ... * Z/2 ("free group" in the extended sense).
  bool is_extended_free() const;

  bool operator==(const PlainGroup& o) const;

 private:
  int d_ = 0;
  std::vector<FactorSpec> factors_;
  std::vector<Gen> inv_;
  std::vector<int> factor_;      // -1 free, else finite-factor index
  std::vector<int> elem_index_;  // element index within the finite factor (1..n-1)
  std::vector<int> factor_base_; // first letter index of each finite factor
  std::vector<std::vector<Gen>> next_;
  std::vector<char> next_ok_;
};

}  // namespace plainwalk
