#include "plainwalk/group.hpp"

#include <algorithm>
#include <sstream>

#include "plainwalk/util.hpp"

namespace plainwalk {

FactorSpec FactorSpec::free_pair() {
  FactorSpec f;
  f.kind = Kind::FreePair;
  return f;
}

FactorSpec FactorSpec::finite(int order, std::vector<int> table) {
  if (order < 2) throw ConfigError("finite factor must have order >= 2");
  if (static_cast<int>(table.size()) != order * order)
    throw ConfigError("multiplication table must be order x order");
  FactorSpec f;
  f.kind = Kind::Finite;
  f.order = order;
  f.mult = std::move(table);
  for (int v : f.mult)
    if (v < 0 || v >= order) throw ConfigError("multiplication table entry out of range");
  for (int a = 0; a < order; ++a) {
    if (f.product(0, a) != a || f.product(a, 0) != a)
      throw ConfigError("index 0 must act as the identity");
  }
  // rows and columns are permutations
  for (int a = 0; a < order; ++a) {
    std::vector<char> row(order, 0), col(order, 0);
    for (int b = 0; b < order; ++b) {
      row[f.product(a, b)] = 1;
      col[f.product(b, a)] = 1;
    }
    for (int b = 0; b < order; ++b)
      if (!row[b] || !col[b]) throw ConfigError("multiplication table is not a latin square");
  }
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      for (int c = 0; c < order; ++c)
        if (f.product(f.product(a, b), c) != f.product(a, f.product(b, c)))
          throw ConfigError("multiplication table is not associative");
  for (int a = 0; a < order; ++a) f.inverse_of(a);  // existence check
  return f;
}

FactorSpec FactorSpec::cyclic(int order) {
  std::vector<int> t(static_cast<size_t>(order) * order);
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b) t[a * order + b] = (a + b) % order;
  return finite(order, std::move(t));
}

int FactorSpec::inverse_of(int a) const {
  for (int b = 0; b < order; ++b)
    if (product(a, b) == 0) {
      if (product(b, a) != 0) throw ConfigError("one-sided inverse in multiplication table");
      return b;
    }
  throw ConfigError("element without inverse in multiplication table");
}

PlainGroup::PlainGroup(int free_rank, std::vector<FactorSpec> finite_factors)
    : d_(free_rank), factors_(std::move(finite_factors)) {
  if (d_ < 0) throw ConfigError("free rank must be nonnegative");
  for (const auto& f : factors_)
    if (f.kind != FactorSpec::Kind::Finite) throw ConfigError("finite_factors must contain finite factors");
  int n = 2 * d_;
  for (const auto& f : factors_) n += f.order - 1;
  if (n <= 0) throw ConfigError("group has an empty alphabet");
  if (n > 120) throw ConfigError("alphabet too large (limit 120 letters)");

  inv_.resize(n);
  factor_.assign(n, -1);
  elem_index_.assign(n, 0);
  for (int i = 0; i < d_; ++i) {
    inv_[2 * i] = 2 * i + 1;
    inv_[2 * i + 1] = 2 * i;
  }
  int base = 2 * d_;
  factor_base_.clear();
  for (size_t j = 0; j < factors_.size(); ++j) {
    const auto& f = factors_[j];
    factor_base_.push_back(base);
    for (int k = 1; k < f.order; ++k) {
      int g = base + k - 1;
      factor_[g] = static_cast<int>(j);
      elem_index_[g] = k;
      inv_[g] = base + f.inverse_of(k) - 1;
    }
    base += f.order - 1;
  }

  next_.resize(n);
  next_ok_.assign(static_cast<size_t>(n) * n, 0);
  for (Gen g = 0; g < n; ++g) {
    for (Gen h = 0; h < n; ++h) {
      bool ok = factor_[g] < 0 ? (h != inv_[g]) : (factor_[h] != factor_[g]);
      if (ok) {
        next_[g].push_back(h);
        next_ok_[static_cast<size_t>(g) * n + h] = 1;
      }
    }
  }
}

std::optional<Gen> PlainGroup::factor_product(Gen g, Gen h) const {
  int j = factor_[g];
  const auto& f = factors_[j];
  int k = f.product(elem_index_[g], elem_index_[h]);
  if (k == 0) return std::nullopt;
  return factor_base_[j] + k - 1;
}

bool PlainGroup::is_reduced(const Word& w) const {
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (!in_next(w[i], w[i + 1])) return false;
  return true;
}

void PlainGroup::multiply_inplace(Word& a, Gen g) const {
  if (!a.empty()) {
    Gen last = a.back();
    if (inv_[last] == g) {
      a.pop_back();
      return;
    }
    if (factor_[last] >= 0 && factor_[last] == factor_[g]) {
      a.back() = static_cast<char>(*factor_product(last, g));
      return;
    }
  }
  a.push_back(static_cast<char>(g));
}

Word PlainGroup::multiply(const Word& a, const Word& b) const {
  Word r = a;
  r.reserve(a.size() + b.size());
  for (char c : b) multiply_inplace(r, static_cast<Gen>(c));
  return r;
}

Word PlainGroup::multiply_counted(const Word& a, const Word& b, int& cancels, int& merges) const {
  cancels = 0;
  merges = 0;
  Word r = a;
  for (char c : b) {
    Gen g = static_cast<Gen>(c);
    if (!r.empty()) {
      Gen last = r.back();
      if (inv_[last] == g) {
        r.pop_back();
        ++cancels;
        continue;
      }
      if (factor_[last] >= 0 && factor_[last] == factor_[g]) {
        r.back() = static_cast<char>(*factor_product(last, g));
        ++merges;
        continue;
      }
    }
    r.push_back(static_cast<char>(g));
  }
  return r;
}

Word PlainGroup::inverse_word(const Word& w) const {
  Word r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(static_cast<char>(inv_[static_cast<Gen>(*it)]));
  return r;
}

Word PlainGroup::boundary_prefix_action(Gen g, const Word& prefix) const {
  if (prefix.empty()) throw ConfigError("boundary_prefix_action needs a nonempty cylinder prefix");
  Gen x0 = static_cast<Gen>(prefix[0]);
  if (x0 == inv_[g]) return prefix.substr(1);
  if (factor_[g] >= 0 && factor_[g] == factor_[x0]) {
    Word r = prefix;
    r[0] = static_cast<char>(*factor_product(g, x0));
    return r;
  }
  Word r;
  r.reserve(prefix.size() + 1);
  r.push_back(static_cast<char>(g));
  r += prefix;
  return r;
}

std::vector<Word> PlainGroup::reduced_words(int length) const {
  std::vector<Word> out;
  if (length == 0) {
    out.emplace_back();
    return out;
  }
  std::vector<Word> cur;
  for (Gen g = 0; g < alphabet_size(); ++g) cur.push_back(Word(1, static_cast<char>(g)));
  for (int l = 1; l < length; ++l) {
    std::vector<Word> nxt;
    for (const Word& w : cur)
      for (Gen h : next_[static_cast<Gen>(w.back())]) {
        Word e = w;
        e.push_back(static_cast<char>(h));
        nxt.push_back(std::move(e));
      }
    cur = std::move(nxt);
  }
  return cur;
}

std::string PlainGroup::letter_name(Gen g) const {
  std::ostringstream os;
  if (factor_[g] < 0) {
    os << 'a' << (g / 2 + 1);
    if (g % 2 == 1) os << '\'';
  } else {
    os << 'G' << (factor_[g] + 1) << '.' << elem_index_[g];
  }
  return os.str();
}

std::optional<Gen> PlainGroup::letter_from_name(const std::string& name) const {
  for (Gen g = 0; g < alphabet_size(); ++g)
    if (letter_name(g) == name) return g;
  return std::nullopt;
}

Word PlainGroup::word_from_names(const std::string& spaced) const {
  Word w;
  std::istringstream is(spaced);
  std::string tok;
  while (is >> tok) {
    if (tok == "e") continue;
    auto g = letter_from_name(tok);
    if (!g) throw ConfigError("unknown generator name: " + tok);
    w.push_back(static_cast<char>(*g));
  }
  if (!is_reduced(w)) throw ConfigError("word is not reduced: " + spaced);
  return w;
}

std::string PlainGroup::word_name(const Word& w) const {
  if (w.empty()) return "e";
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += letter_name(static_cast<Gen>(w[i]));
  }
  return s;
}

bool PlainGroup::is_nonamenable() const {
  int m = num_finite_factors();
  if (d_ == 0 && m <= 1) return false;                      // trivial or finite
  if (d_ == 1 && m == 0) return false;                      // Z
  if (d_ == 0 && m == 2 && factors_[0].order == 2 && factors_[1].order == 2)
    return false;                                           // Z/2 * Z/2
  return true;
}

bool PlainGroup::is_extended_free() const {
  for (const auto& f : factors_)
    if (f.order != 2) return false;
  return true;
}

bool PlainGroup::operator==(const PlainGroup& o) const {
  if (d_ != o.d_ || factors_.size() != o.factors_.size()) return false;
  for (size_t j = 0; j < factors_.size(); ++j)
    if (factors_[j].order != o.factors_[j].order || factors_[j].mult != o.factors_[j].mult) return false;
  return true;
}

}  // namespace plainwalk
