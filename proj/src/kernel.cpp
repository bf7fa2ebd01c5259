#include "plainwalk/kernel.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "plainwalk/util.hpp"

namespace plainwalk {

double ScalarWalkSpec::identity_mass() const {
  for (size_t i = 0; i < support.size(); ++i)
    if (support[i].empty()) return probs[i];
  return 0.0;
}

int ScalarWalkSpec::max_word_length() const {
  size_t m = 0;
  for (const auto& w : support) m = std::max(m, w.size());
  return static_cast<int>(m);
}

double ScalarWalkSpec::prob_of(const Word& w) const {
  for (size_t i = 0; i < support.size(); ++i)
    if (support[i] == w) return probs[i];
  return 0.0;
}

bool ScalarWalkSpec::is_symmetric(double tol) const {
  for (size_t i = 0; i < support.size(); ++i)
    if (std::abs(probs[i] - prob_of(group->inverse_word(support[i]))) > tol) return false;
  return true;
}

bool ScalarWalkSpec::is_nearest_neighbor() const {
  for (const auto& w : support)
    if (w.size() > 1) return false;
  return true;
}

double ScalarWalkSpec::mean_length() const {
  double s = 0;
  for (size_t i = 0; i < support.size(); ++i) s += probs[i] * static_cast<double>(support[i].size());
  return s;
}

double ScalarWalkSpec::mean_square_length() const {
  double s = 0;
  for (size_t i = 0; i < support.size(); ++i) {
    double l = static_cast<double>(support[i].size());
    s += probs[i] * l * l;
  }
  return s;
}

void ScalarWalkSpec::check() const {
  if (!group) throw ConfigError("walk has no group");
  if (support.size() != probs.size()) throw ConfigError("support/probability size mismatch");
  if (support.empty()) throw ConfigError("empty walk support");
  double s = 0;
  std::set<Word> seen;
  for (size_t i = 0; i < support.size(); ++i) {
    if (!group->is_reduced(support[i])) throw ConfigError("support word not reduced");
    if (!seen.insert(support[i]).second) throw ConfigError("duplicate support word");
    if (probs[i] < 0) throw ConfigError("negative probability");
    s += probs[i];
  }
  if (std::abs(s - 1.0) > 1e-12) throw ConfigError("probabilities do not sum to 1");
}

ColoredKernel::ColoredKernel(std::shared_ptr<const PlainGroup> g, int colors) : group(std::move(g)), r(colors) {
  if (r < 1) throw ConfigError("color count must be >= 1");
  p.assign(group->alphabet_size(), Matrix::Zero(r, r));
  p_e = Matrix::Zero(r, r);
}

Matrix ColoredKernel::color_matrix() const {
  Matrix P = p_e;
  for (const auto& m : p) P += m;
  return P;
}

bool ColoredKernel::has_identity_mass(double tol) const { return p_e.cwiseAbs().maxCoeff() > tol; }

std::vector<Gen> ColoredKernel::support_letters() const {
  std::vector<Gen> s;
  for (Gen g = 0; g < static_cast<Gen>(p.size()); ++g)
    if (p[g].cwiseAbs().maxCoeff() > 0) s.push_back(g);
  return s;
}

ColoredKernel ColoredKernel::from_scalar(const ScalarWalkSpec& w) {
  w.check();
  if (!w.is_nearest_neighbor()) throw ConfigError("scalar walk is not nearest-neighbor; linearize it first");
  ColoredKernel k(w.group, 1);
  for (size_t i = 0; i < w.support.size(); ++i) {
    if (w.support[i].empty())
      k.p_e(0, 0) += w.probs[i];
    else
      k.p[static_cast<Gen>(w.support[i][0])](0, 0) += w.probs[i];
  }
  return k;
}

bool is_irreducible(const Matrix& P) {
  int n = static_cast<int>(P.rows());
  auto reach = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        double e = transpose ? P(v, u) : P(u, v);
        if (e > 0.0 && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reach(false) && reach(true);
}

Vector stationary_pi(const Matrix& P, double tol) {
  int n = static_cast<int>(P.rows());
  if (n == 1) return Vector::Ones(1);
  if (!is_irreducible(P)) throw NumericalError("color matrix P is not irreducible");
  // (P^T - I) pi = 0 with the first row replaced by the normalization.
  Matrix A = P.transpose() - Matrix::Identity(n, n);
  A.row(0).setOnes();
  Vector b = Vector::Zero(n);
  b(0) = 1.0;
  Vector pi = A.colPivHouseholderQr().solve(b);
  auto residual = [&](const Vector& x) { return (x.transpose() * P - x.transpose()).cwiseAbs().maxCoeff(); };
  if (!pi.allFinite() || pi.minCoeff() < -1e-9 || residual(pi) > tol) {
    // power iteration fallback
    Vector x = Vector::Constant(n, 1.0 / n);
    for (int it = 0; it < 200000; ++it) {
      Vector y = P.transpose() * x;
      y /= y.sum();
      if ((y - x).cwiseAbs().maxCoeff() < tol * 0.1) {
        x = y;
        break;
      }
      x = y;
    }
    pi = x;
    if (residual(pi) > tol) throw NumericalError("stationary distribution did not converge");
  }
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return pi;
}

bool support_generates_group(const PlainGroup& g, const std::vector<Word>& support, bool* capped) {
  if (capped) *capped = false;
  std::vector<Word> gens;
  for (const auto& w : support)
    if (!w.empty()) {
      gens.push_back(w);
      gens.push_back(g.inverse_word(w));
    }
  if (gens.empty()) return false;
  size_t len_cap = 2;
  for (const auto& w : gens) len_cap = std::max(len_cap, 2 * w.size() + 2);
  len_cap = std::max<size_t>(len_cap, 8);
  const size_t size_cap = 200000;

  std::unordered_set<Word> reached;
  std::vector<Word> frontier{Word()};
  reached.insert(Word());
  std::unordered_set<char> missing;
  for (Gen s = 0; s < g.alphabet_size(); ++s) missing.insert(static_cast<char>(s));

  int rounds = std::max(g.alphabet_size(), 8);
  for (int round = 0; round < rounds && !frontier.empty() && !missing.empty(); ++round) {
    std::vector<Word> next;
    for (const auto& w : frontier) {
      for (const auto& step : gens) {
        Word prod = g.multiply(w, step);
        if (prod.size() > len_cap) continue;
        if (reached.insert(prod).second) {
          next.push_back(prod);
          if (prod.size() == 1) missing.erase(prod[0]);
        }
        if (reached.size() > size_cap) {
          if (capped) *capped = true;
          return missing.empty();
        }
      }
    }
    frontier = std::move(next);
  }
  return missing.empty();
}

ValidationReport validate(const ColoredKernel& k) {
  ValidationReport rep;
  Matrix P = k.color_matrix();
  rep.stochastic_residual = (P.rowwise().sum() - Vector::Ones(k.r)).cwiseAbs().maxCoeff();
  double neg = std::min(k.p_e.minCoeff(), 0.0);
  for (const auto& m : k.p) neg = std::min(neg, m.minCoeff());
  rep.stochastic_residual = std::max(rep.stochastic_residual, -neg);
  rep.color_chain_irreducible = is_irreducible(P);
  std::vector<Word> support;
  for (Gen g : k.support_letters()) support.push_back(Word(1, static_cast<char>(g)));
  rep.support_generates = support_generates_group(*k.group, support, &rep.generation_check_capped);
  return rep;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << "stochastic_residual=" << stochastic_residual << " irreducible=" << (color_chain_irreducible ? "yes" : "no")
     << " generates=" << (support_generates ? "yes" : "no");
  if (generation_check_capped) os << " (generation check capped)";
  return os.str();
}

ColorChainSummary color_chain(const ColoredKernel& k) {
  ColorChainSummary s;
  s.P = k.color_matrix();
  s.pi = stationary_pi(s.P);
  return s;
}

ReversibilityReport check_reversible(const ColoredKernel& k, double tol) {
  Vector pi = stationary_pi(k.color_matrix());
  double worst = 0.0;
  auto update = [&](const Matrix& a, const Matrix& b) {
    for (int u = 0; u < k.r; ++u)
      for (int v = 0; v < k.r; ++v) worst = std::max(worst, std::abs(pi(u) * a(u, v) - pi(v) * b(v, u)));
  };
  for (Gen g = 0; g < static_cast<Gen>(k.p.size()); ++g) update(k.p[g], k.p[k.group->inverse(g)]);
  update(k.p_e, k.p_e);
  return {worst <= tol, worst};
}

KernelSampler::KernelSampler(const ColoredKernel& k) : kernel(&k) {
  rows.resize(k.r);
  for (int u = 0; u < k.r; ++u) {
    double c = 0.0;
    for (int v = 0; v < k.r; ++v)
      if (k.p_e(u, v) > 0) {
        c += k.p_e(u, v);
        rows[u].push_back({-1, v, c});
      }
    for (Gen g = 0; g < static_cast<Gen>(k.p.size()); ++g)
      for (int v = 0; v < k.r; ++v)
        if (k.p[g](u, v) > 0) {
          c += k.p[g](u, v);
          rows[u].push_back({g, v, c});
        }
    if (rows[u].empty() || std::abs(c - 1.0) > 1e-9)
      throw NumericalError("kernel row does not sum to 1; cannot sample");
    rows[u].back().cum = 1.0;  // guard against roundoff at the top
  }
}

void KernelSampler::step(WalkState& s, std::mt19937_64& rng) const {
  const auto& row = rows[s.color];
  double x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  size_t lo = 0, hi = row.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (row[mid].cum < x)
      lo = mid + 1;
    else
      hi = mid;
  }
  const Move& m = row[lo];
  if (m.letter >= 0) kernel->group->multiply_inplace(s.position, m.letter);
  s.color = m.color;
}

void step(WalkState& s, const ColoredKernel& k, std::mt19937_64& rng) {
  KernelSampler sampler(k);
  sampler.step(s, rng);
}

}  // namespace plainwalk
