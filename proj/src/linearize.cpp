#include "plainwalk/linearize.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "plainwalk/util.hpp"

namespace plainwalk {

namespace {

bool length_lex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

PrefixTree PrefixTree::build(const ScalarWalkSpec& walk) {
  PrefixTree t;
  std::map<Word, double> mass;
  for (size_t i = 0; i < walk.support.size(); ++i) {
    const Word& g = walk.support[i];
    for (size_t k = 1; k < g.size(); ++k) mass[g.substr(0, k)] += walk.probs[i];
  }
  for (auto& [w, m] : mass) t.prefixes.push_back(w);
  std::sort(t.prefixes.begin(), t.prefixes.end(), length_lex_less);
  for (size_t i = 0; i < t.prefixes.size(); ++i) t.index[t.prefixes[i]] = static_cast<int>(i);
  t.mass.resize(t.prefixes.size());
  t.ratio.resize(t.prefixes.size());
  for (size_t i = 0; i < t.prefixes.size(); ++i) {
    const Word& w = t.prefixes[i];
    t.mass[i] = mass[w];
    double parent = w.size() == 1 ? 1.0 : mass[w.substr(0, w.size() - 1)];
    t.ratio[i] = t.mass[i] / parent;
  }
  return t;
}

static int suffix_count_estimate(const ScalarWalkSpec& walk) {
  std::set<Word> suffixes;
  int card_k = 0;
  for (const Word& g : walk.support) {
    if (g.empty()) continue;
    ++card_k;
    for (size_t k = 0; k < g.size(); ++k) suffixes.insert(g.substr(k));
  }
  return 1 + static_cast<int>(suffixes.size()) - card_k;
}

LinearizationResult linearize_prefix(const ScalarWalkSpec& walk) {
  walk.check();
  bool capped = false;
  if (!support_generates_group(*walk.group, walk.support, &capped))
    throw ConfigError("walk support does not generate the group");

  PrefixTree tree = PrefixTree::build(walk);
  int r = 1 + static_cast<int>(tree.prefixes.size());

  LinearizationResult res;
  res.construction = Construction::Prefix;
  res.kernel = ColoredKernel(walk.group, r);
  res.color_labels.push_back("neutral");
  for (const Word& w : tree.prefixes) res.color_labels.push_back(walk.group->word_name(w));

  auto color_of = [&](const Word& w) { return w.empty() ? 0 : tree.index.at(w) + 1; };
  auto mass_of = [&](const Word& w) { return w.empty() ? 1.0 : tree.mass[tree.index.at(w)]; };

  // prefix-to-prefix ratio transitions (blocks D(k))
  for (size_t i = 0; i < tree.prefixes.size(); ++i) {
    const Word& w = tree.prefixes[i];
    Word parent = w.substr(0, w.size() - 1);
    Gen j = static_cast<Gen>(w.back());
    res.kernel.p[j](color_of(parent), color_of(w)) += tree.ratio[i];
  }
  // terminal transitions back to the neutral color (blocks C(k) and row 1)
  for (size_t i = 0; i < walk.support.size(); ++i) {
    const Word& g = walk.support[i];
    if (g.empty()) {
      res.kernel.p_e(0, 0) += walk.probs[i];
      continue;
    }
    Word parent = g.substr(0, g.size() - 1);
    Gen j = static_cast<Gen>(g.back());
    res.kernel.p[j](color_of(parent), 0) += walk.probs[i] / mass_of(parent);
  }

  res.expected_return_time = expected_tau(walk, Construction::Prefix);
  res.suffix_count_estimate = suffix_count_estimate(walk);
  return res;
}

LinearizationResult linearize_reversible(const ScalarWalkSpec& walk) {
  walk.check();
  if (!walk.is_symmetric()) throw ConfigError("reversible construction needs a symmetric walk (p_g = p_{g^-1})");
  bool capped = false;
  if (!support_generates_group(*walk.group, walk.support, &capped))
    throw ConfigError("walk support does not generate the group");

  const PlainGroup& G = *walk.group;
  double pe = walk.identity_mass();
  double beta = 0.0;
  for (size_t i = 0; i < walk.support.size(); ++i) beta += walk.probs[i] * static_cast<double>(walk.support[i].size());
  if (beta <= 0.0) throw ConfigError("walk has no non-identity support");

  // canonical member of each inverse pair: the length-lex smaller word
  std::vector<size_t> canon;
  for (size_t i = 0; i < walk.support.size(); ++i) {
    const Word& g = walk.support[i];
    if (g.empty()) continue;
    Word ginv = G.inverse_word(g);
    if (g == ginv || length_lex_less(g, ginv)) canon.push_back(i);
  }

  // allocate interior colors per pair
  int r = 1;
  std::vector<int> first_color(canon.size(), 0);
  for (size_t c = 0; c < canon.size(); ++c) {
    int len = static_cast<int>(walk.support[canon[c]].size());
    first_color[c] = r;
    if (len >= 2) r += len - 1;
  }

  LinearizationResult res;
  res.construction = Construction::Reversible;
  res.kernel = ColoredKernel(walk.group, r);
  res.color_labels.assign(r, "");
  res.color_labels[0] = "neutral";

  res.kernel.p_e(0, 0) = pe;
  auto& p = res.kernel.p;
  for (size_t c = 0; c < canon.size(); ++c) {
    const Word& g = walk.support[canon[c]];
    double pg = walk.probs[canon[c]];
    double alpha = (1.0 - pe) * static_cast<double>(g.size()) * pg / beta;
    int k = static_cast<int>(g.size());
    bool involution = (g == G.inverse_word(g));
    if (k == 1) {
      Gen a = static_cast<Gen>(g[0]);
      p[a](0, 0) += alpha;
      if (!involution) p[G.inverse(a)](0, 0) += alpha;
      continue;
    }
    // interior colors u_1..u_{k-1}; u_j sits at position g[0:j] of the segment
    auto u = [&](int j) { return first_color[c] + j - 1; };
    for (int j = 1; j < k; ++j)
      res.color_labels[u(j)] = "u" + std::to_string(j) + "(" + G.word_name(g) + ")";
    double entry = involution ? alpha / 2.0 : alpha;
    p[static_cast<Gen>(g[0])](0, u(1)) += entry;
    p[G.inverse(static_cast<Gen>(g[k - 1]))](0, u(k - 1)) += entry;
    for (int j = 1; j < k; ++j) {
      Gen fwd = static_cast<Gen>(g[j]);  // letter g[j] leads from u(j) toward g
      if (j + 1 < k)
        p[fwd](u(j), u(j + 1)) += 0.5;
      else
        p[fwd](u(j), 0) += 0.5;
      Gen bwd = G.inverse(static_cast<Gen>(g[j - 1]));
      if (j - 1 >= 1)
        p[bwd](u(j), u(j - 1)) += 0.5;
      else
        p[bwd](u(j), 0) += 0.5;
    }
  }

  res.expected_return_time = expected_tau(walk, Construction::Reversible);
  res.suffix_count_estimate = suffix_count_estimate(walk);
  return res;
}

double expected_tau(const ScalarWalkSpec& walk, Construction c) {
  double pe = walk.identity_mass();
  if (c == Construction::Prefix) return pe + walk.mean_length();
  double beta = walk.mean_length();
  double s2 = walk.mean_square_length();
  if (beta <= 0.0) return 1.0;
  if (pe == 0.0) return s2;
  // lazy extension: A = expected time from (e,1) to a neutral-color visit at a
  // new position; first-step identity moves renew immediately.
  double q = 1.0 - pe;
  double a = (pe + q * s2 / beta) * beta / (q * q);
  double direct = q * s2 / beta;                // sum alpha_h |h|
  double back = q - q * q / beta;               // sum alpha_h (1 - 1/|h|)
  return pe + direct + back * a;
}

FirstReturnReport verify_first_return(const LinearizationResult& lin, const ScalarWalkSpec& walk) {
  const ColoredKernel& k = lin.kernel;
  const PlainGroup& G = *walk.group;
  bool reversible = lin.construction == Construction::Reversible;

  struct Key {
    Word w;
    int color;
    bool operator<(const Key& o) const { return w != o.w ? w < o.w : color < o.color; }
  };
  auto is_absorbing = [&](const Key& s) {
    if (s.color != 0) return false;
    return reversible ? !s.w.empty() : true;
  };

  // enumerate transient states reachable after the first step
  std::map<Key, int> transient;
  std::vector<Key> order;
  auto intern = [&](const Key& s) {
    auto it = transient.find(s);
    if (it != transient.end()) return it->second;
    int id = static_cast<int>(order.size());
    transient.emplace(s, id);
    order.push_back(s);
    return id;
  };

  auto moves_from = [&](const Key& s) {
    std::vector<std::pair<Key, double>> out;
    for (int v = 0; v < k.r; ++v) {
      if (k.p_e(s.color, v) > 0) out.push_back({Key{s.w, v}, k.p_e(s.color, v)});
      for (Gen g = 0; g < G.alphabet_size(); ++g)
        if (k.p[g](s.color, v) > 0) {
          Word w = s.w;
          G.multiply_inplace(w, g);
          out.push_back({Key{std::move(w), v}, k.p[g](s.color, v)});
        }
    }
    return out;
  };

  Key start{Word(), 0};
  std::map<Word, double> direct_abs;
  std::vector<std::pair<int, double>> start_transient;
  for (auto& [s, pr] : moves_from(start)) {
    if (s.color == 0 && s.w.empty() && reversible) {
      // identity move: immediate renewal by the modified stopping rule
      direct_abs[Word()] += pr;
    } else if (is_absorbing(s)) {
      direct_abs[s.w] += pr;
    } else {
      start_transient.push_back({intern(s), pr});
    }
  }
  // close the transient set
  for (size_t i = 0; i < order.size(); ++i) {
    Key s = order[i];
    for (auto& [t, pr] : moves_from(s))
      if (!is_absorbing(t)) intern(t);
  }
  int n = static_cast<int>(order.size());
  Matrix Q = Matrix::Zero(n, n);
  std::map<Word, Vector> R;  // absorbing endpoint -> column of entry probabilities
  for (int i = 0; i < n; ++i) {
    for (auto& [t, pr] : moves_from(order[i])) {
      if (is_absorbing(t)) {
        auto it = R.find(t.w);
        if (it == R.end()) it = R.emplace(t.w, Vector::Zero(n)).first;
        it->second(i) += pr;
      } else {
        Q(i, transient.at(t)) += pr;
      }
    }
  }

  FirstReturnReport rep;
  Matrix fundamental = Matrix::Identity(n, n) - Q;
  Eigen::PartialPivLU<Matrix> lu(fundamental);
  Vector tvec = n > 0 ? Vector(lu.solve(Vector::Ones(n))) : Vector();

  std::map<Word, double> law = direct_abs;
  for (auto& [w, col] : R) {
    Vector hit = lu.solve(col);
    double mass = 0.0;
    for (auto& [sid, pr] : start_transient) mass += pr * hit(sid);
    law[w] += mass;
  }
  double etau = 1.0;
  for (auto& [sid, pr] : start_transient) etau += pr * tvec(sid);

  rep.expected_tau_exact = etau;
  rep.expected_tau_error = std::abs(etau - lin.expected_return_time);
  double total = 0.0;
  for (auto& [w, pr] : law) {
    rep.law.push_back({w, pr});
    rep.max_law_error = std::max(rep.max_law_error, std::abs(pr - walk.prob_of(w)));
    total += pr;
  }
  for (size_t i = 0; i < walk.support.size(); ++i)
    if (!law.count(walk.support[i]))
      rep.max_law_error = std::max(rep.max_law_error, walk.probs[i]);
  rep.max_law_error = std::max(rep.max_law_error, std::abs(total - 1.0));
  return rep;
}

std::vector<long> extract_renewals(const std::vector<WalkState>& trajectory, const LinearizationResult& lin) {
  std::vector<long> taus;
  if (trajectory.empty()) return taus;
  if (lin.construction == Construction::Prefix) {
    for (size_t t = 1; t < trajectory.size(); ++t)
      if (trajectory[t].color == 0) taus.push_back(static_cast<long>(t));
    return taus;
  }
  size_t prev = 0;
  while (prev + 1 < trajectory.size()) {
    if (trajectory[prev + 1].position == trajectory[prev].position) {
      taus.push_back(static_cast<long>(prev + 1));
      prev = prev + 1;
      continue;
    }
    size_t t = prev + 1;
    while (t < trajectory.size() &&
           !(trajectory[t].color == 0 && trajectory[t].position != trajectory[prev].position))
      ++t;
    if (t >= trajectory.size()) break;
    taus.push_back(static_cast<long>(t));
    prev = t;
  }
  return taus;
}

}  // namespace plainwalk
