#include "plainwalk/drift_entropy.hpp"

#include <algorithm>
#include <cmath>

#include "plainwalk/util.hpp"

namespace plainwalk {

DriftReport drift_exact(const ColoredKernel& k, const TrafficSolution& t) {
  const PlainGroup& G = *k.group;
  const Vector& pi = t.pi;
  double gamma = 0.0;
  for (Gen g = 0; g < G.alphabet_size(); ++g) {
    if (k.p[g].cwiseAbs().maxCoeff() == 0.0) continue;
    // column vector over v: -mu_{g^-1} 1 + sum_{h in Next(g)} mu_h 1
    Vector disp = -t.y[G.inverse(g)];
    for (Gen h : G.next_set(g)) disp += t.y[h];
    gamma += pi.dot(k.p[g] * disp);
  }
  return {gamma, "exact", 0.0, 0};
}

NuSampler::NuSampler(const ColoredKernel& k, const HittingMatrices& h, const TrafficSolution& t, int depth,
                     std::uint64_t calibration_seed)
    : kernel_(&k), hitting_(&h) {
  const PlainGroup& G = *k.group;
  int n = G.alphabet_size();
  int r = k.r;
  first_.resize(r);
  for (int u = 0; u < r; ++u) {
    double c = 0.0;
    for (Gen g = 0; g < n; ++g)
      for (int v = 0; v < r; ++v)
        if (t.mu[g](u, v) > 0) {
          c += t.mu[g](u, v);
          first_[u].push_back({g, v, c});
        }
    if (first_[u].empty()) throw NumericalError("nu sampler: no escape directions from a color");
    first_[u].back().cum = 1.0;
  }
  chain_.assign(n, {});
  for (Gen g = 0; g < n; ++g) {
    chain_[g].resize(r);
    for (int u = 0; u < r; ++u) {
      double dg = t.delta[g](u);
      if (dg <= 0.0) continue;  // state (g,u) unreachable along the chain
      double c = 0.0;
      for (Gen hh : G.next_set(g))
        for (int v = 0; v < r; ++v)
          if (t.mu[hh](u, v) > 0) {
            c += t.mu[hh](u, v) / dg;
            chain_[g][u].push_back({hh, v, c});
          }
      if (!chain_[g][u].empty()) chain_[g][u].back().cum = 1.0;
    }
  }
  if (depth > 0) {
    depth_ = depth;
    doubling_delta_ = 0.0;
  } else {
    calibrate(200, calibration_seed);
  }
}

void NuSampler::draw_letters(int color, int depth, std::vector<Gen>& out, std::mt19937_64& rng) const {
  out.clear();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto pick = [&](const std::vector<Arrow>& row) -> const Arrow& {
    double x = unif(rng);
    size_t lo = 0, hi = row.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (row[mid].cum < x)
        lo = mid + 1;
      else
        hi = mid;
    }
    return row[lo];
  };
  const Arrow* a = &pick(first_[color]);
  out.push_back(a->letter);
  for (int i = 1; i < depth; ++i) {
    const auto& row = chain_[a->letter][a->color];
    if (row.empty()) throw NumericalError("nu sampler: chain reached a state with zero escape normalization");
    a = &pick(row);
    out.push_back(a->letter);
  }
}

Vector NuSampler::product_point(const std::vector<Gen>& letters, int depth) const {
  int r = kernel_->r;
  Vector v = Vector::Constant(r, 1.0 / r);
  for (int i = depth - 1; i >= 0; --i) {
    v = hitting_->q[letters[i]] * v;
    double s = v.sum();
    if (!(s > 0.0)) throw NumericalError("nu sampler: truncated product annihilated the base point");
    v /= s;
  }
  return v;
}

void NuSampler::calibrate(int cap, std::uint64_t seed) {
  int d = 25;
  double delta = 0.0;
  std::vector<Gen> letters;
  while (true) {
    delta = 0.0;
    for (int path = 0; path < 48; ++path) {
      for (int u = 0; u < kernel_->r; ++u) {
        std::mt19937_64 rng = make_stream(seed, static_cast<std::uint64_t>(path) * kernel_->r + u);
        draw_letters(u, 2 * d, letters, rng);
        Vector a = product_point(letters, d);
        Vector b = product_point(letters, 2 * d);
        delta = std::max(delta, (a - b).cwiseAbs().maxCoeff());
      }
    }
    if (delta < 1e-6 || 2 * d >= cap) break;
    d *= 2;
  }
  depth_ = std::min(2 * d, cap);
  doubling_delta_ = delta;
}

Vector NuSampler::sample(int color, std::mt19937_64& rng) const {
  std::vector<Gen> letters;
  draw_letters(color, depth_, letters, rng);
  return product_point(letters, depth_);
}

Vector NuSampler::sample_from(Gen letter, int color, std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Gen> letters;
  Gen g = letter;
  int u = color;
  for (int i = 0; i < depth_; ++i) {
    const auto& row = chain_[g][u];
    if (row.empty()) throw NumericalError("nu sampler: chain reached a state with zero escape normalization");
    double x = unif(rng);
    size_t lo = 0, hi = row.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (row[mid].cum < x)
        lo = mid + 1;
      else
        hi = mid;
    }
    g = row[lo].letter;
    u = row[lo].color;
    letters.push_back(g);
  }
  return product_point(letters, depth_);
}

namespace {

// Per-sample log slots shared by the three entropy terms:
//   slot 0..r-1            : log z_u
//   slot r + a*r + v       : log <q_a(v,.), z>          (a letter, v color)
//   slot base2 + p*r + u   : log <q_g(u,.), q_h z>      (p indexes Next pairs)
//
// Each term integrates against the law of the limit direction conditional on
// the first boundary step (xi_1, u_1): coefficients are grouped by that state
// and samples are drawn from the Next-restricted chain started there. (The
// color-only grouping is not invariant for linearized kernels; the exact
// first-return and dimension-identity oracles single out this version.)
struct EntropyPlan {
  int r = 0;
  int n = 0;
  int n_slots = 0;
  int base2 = 0;
  std::vector<std::pair<Gen, Gen>> pairs;  // (g, h) with h in Next(g)
  std::vector<char> slot_needed;
  // per state (xi_1 = a, u_1 = w), flattened a*r + w: list of (slot, weight)
  std::vector<std::vector<std::pair<int, double>>> coef;
};

EntropyPlan build_plan(const ColoredKernel& k, const BoundarySolution& b) {
  const PlainGroup& G = *k.group;
  const auto& mu = b.traffic.mu;
  int r = k.r;
  int n = G.alphabet_size();
  Vector pi = b.traffic.pi;

  EntropyPlan plan;
  plan.r = r;
  plan.n = n;
  for (Gen g = 0; g < n; ++g)
    for (Gen h : G.next_set(g))
      if (k.p[g].cwiseAbs().maxCoeff() > 0) plan.pairs.push_back({g, h});
  plan.base2 = r + n * r;
  plan.n_slots = plan.base2 + static_cast<int>(plan.pairs.size()) * r;
  plan.slot_needed.assign(plan.n_slots, 0);
  plan.coef.assign(static_cast<size_t>(n) * r, {});

  std::vector<std::vector<double>> acc(static_cast<size_t>(n) * r, std::vector<double>());
  auto add = [&](Gen first, int w, int slot, double weight) {
    if (weight == 0.0) return;
    auto& row = acc[static_cast<size_t>(first) * r + w];
    if (row.empty()) row.assign(plan.n_slots, 0.0);
    row[slot] += weight;
    plan.slot_needed[slot] = 1;
  };
  const double tiny = 1e-15;

  // cancel case (xi_1 = g^-1):
  //   + pi(u) p_g(u,v) mu_{g^-1}(v,w) [log z_u - log <q_{g^-1}(v,.), z>]
  for (Gen g = 0; g < n; ++g) {
    Gen gi = G.inverse(g);
    for (int u = 0; u < r; ++u)
      for (int v = 0; v < r; ++v) {
        double base = pi(u) * k.p[g](u, v);
        if (base == 0.0) continue;
        for (int w = 0; w < r; ++w) {
          double wt = base * mu[gi](v, w);
          if (wt <= tiny) continue;
          add(gi, w, u, wt);
          add(gi, w, r + gi * r + v, -wt);
        }
      }
  }
  // prepend case (xi_1 = h in Next(g)):
  //   + pi(u) p_g(u,v) mu_h(v,w) [log <q_g(u,.), q_h z> - log <q_h(v,.), z>]
  for (size_t pidx = 0; pidx < plan.pairs.size(); ++pidx) {
    auto [g, hh] = plan.pairs[pidx];
    for (int u = 0; u < r; ++u)
      for (int v = 0; v < r; ++v) {
        double base = pi(u) * k.p[g](u, v);
        if (base == 0.0) continue;
        for (int w = 0; w < r; ++w) {
          double wt = base * mu[hh](v, w);
          if (wt <= tiny) continue;
          add(hh, w, plan.base2 + static_cast<int>(pidx) * r + u, wt);
          add(hh, w, r + hh * r + v, -wt);
        }
      }
  }
  // merge case (xi_1 = h with g h in S):
  //   + pi(u) p_g(u,v) mu_h(v,w) [log <q_{gh}(u,.), z> - log <q_h(v,.), z>]
  for (Gen g = 0; g < n; ++g) {
    if (G.is_free_letter(g) || k.p[g].cwiseAbs().maxCoeff() == 0.0) continue;
    for (Gen hh = 0; hh < n; ++hh) {
      if (G.finite_factor_of(hh) != G.finite_factor_of(g) || hh == G.inverse(g)) continue;
      Gen s = *G.factor_product(g, hh);
      for (int u = 0; u < r; ++u)
        for (int v = 0; v < r; ++v) {
          double base = pi(u) * k.p[g](u, v);
          if (base == 0.0) continue;
          for (int w = 0; w < r; ++w) {
            double wt = base * mu[hh](v, w);
            if (wt <= tiny) continue;
            add(hh, w, r + s * r + u, wt);
            add(hh, w, r + hh * r + v, -wt);
          }
        }
    }
  }
  for (size_t state = 0; state < acc.size(); ++state)
    for (int slot = 0; slot < plan.n_slots; ++slot)
      if (!acc[state].empty() && acc[state][slot] != 0.0) plan.coef[state].push_back({slot, acc[state][slot]});
  return plan;
}

void eval_slots(const EntropyPlan& plan, const HittingMatrices& h, const Vector& z,
                std::vector<double>& slots, std::vector<Vector>& qz) {
  int r = plan.r;
  for (int u = 0; u < r; ++u)
    if (plan.slot_needed[u]) slots[u] = std::log(z(u));
  for (Gen a = 0; a < plan.n; ++a) {
    qz[a] = h.q[a] * z;
    for (int v = 0; v < r; ++v) {
      int slot = r + a * r + v;
      if (!plan.slot_needed[slot]) continue;
      double val = qz[a](v);
      if (!(val > 0.0)) throw NumericalError("entropy integrand hit a nonpositive inner product");
      slots[slot] = std::log(val);
    }
  }
  for (size_t pidx = 0; pidx < plan.pairs.size(); ++pidx) {
    auto [g, hh] = plan.pairs[pidx];
    bool any = false;
    for (int u = 0; u < r; ++u)
      if (plan.slot_needed[plan.base2 + static_cast<int>(pidx) * r + u]) any = true;
    if (!any) continue;
    Vector qqz = h.q[g] * qz[hh];
    for (int u = 0; u < r; ++u) {
      int slot = plan.base2 + static_cast<int>(pidx) * r + u;
      if (!plan.slot_needed[slot]) continue;
      double val = qqz(u);
      if (!(val > 0.0)) throw NumericalError("entropy integrand hit a nonpositive inner product");
      slots[slot] = std::log(val);
    }
  }
}

}  // namespace

EntropyReport entropy_explicit_mc(const ColoredKernel& k, const BoundarySolution& b, long n_samples,
                                  std::uint64_t seed, int depth, int threads) {
  if (n_samples <= 0) throw ConfigError("entropy_explicit_mc needs n_samples > 0");
  NuSampler sampler(k, b.hitting, b.traffic, depth);
  EntropyPlan plan = build_plan(k, b);
  int r = k.r;
  const long n_states = static_cast<long>(plan.coef.size());

  const long kBlocks = 16;
  long per_block = (n_samples + kBlocks - 1) / kBlocks;
  struct BlockStat {
    double sum = 0.0, sumsq = 0.0;
    long count = 0;
  };
  std::vector<BlockStat> stats(static_cast<size_t>(n_states) * kBlocks);

  parallel_blocks(n_states * kBlocks, [&](long job) {
    long state = job / kBlocks;
    long blk = job % kBlocks;
    long lo = blk * per_block;
    long hi = std::min<long>(n_samples, lo + per_block);
    if (lo >= hi || plan.coef[state].empty()) return;
    Gen letter = static_cast<Gen>(state / r);
    int w = static_cast<int>(state % r);
    std::mt19937_64 rng = make_stream(seed, static_cast<std::uint64_t>(job) + 1);
    std::vector<double> slots(plan.n_slots, 0.0);
    std::vector<Vector> qz(plan.n);
    BlockStat st;
    for (long i = lo; i < hi; ++i) {
      Vector z = sampler.sample_from(letter, w, rng);
      eval_slots(plan, b.hitting, z, slots, qz);
      double f = 0.0;
      for (auto& [slot, wt] : plan.coef[state]) f += wt * slots[slot];
      st.sum += f;
      st.sumsq += f * f;
      st.count += 1;
    }
    stats[job] = st;
  }, threads);

  double value = 0.0;
  double var = 0.0;
  for (long state = 0; state < n_states; ++state) {
    double sum = 0.0, sumsq = 0.0;
    long cnt = 0;
    for (long blk = 0; blk < kBlocks; ++blk) {
      const BlockStat& st = stats[static_cast<size_t>(state) * kBlocks + blk];
      sum += st.sum;
      sumsq += st.sumsq;
      cnt += st.count;
    }
    if (cnt == 0) continue;
    double mean = sum / cnt;
    value -= mean;
    double v = std::max(0.0, sumsq / cnt - mean * mean);
    var += v / cnt;
  }

  EntropyReport rep;
  rep.value = value;
  rep.method = "mc";
  rep.ci_half_width = 1.96 * std::sqrt(var);
  rep.n_samples = n_samples;
  rep.depth = sampler.depth();
  rep.depth_doubling_delta = sampler.depth_doubling_delta();
  rep.seed = seed;
  return rep;
}

double entropy_colorless_closed(const ColoredKernel& k, const BoundarySolution& b) {
  if (k.r != 1) throw ConfigError("colorless closed form needs r = 1");
  const PlainGroup& G = *k.group;
  auto p = [&](Gen g) { return k.p[g](0, 0); };
  auto q = [&](Gen g) { return b.hitting.q[g](0, 0); };
  auto mu = [&](Gen g) { return b.traffic.mu[g](0, 0); };
  double h = 0.0;
  for (Gen g = 0; g < G.alphabet_size(); ++g) {
    if (p(g) == 0.0) continue;
    double inner = 0.0;
    double m1 = mu(G.inverse(g));
    if (m1 > 0.0) inner += m1 * std::log(1.0 / q(G.inverse(g)));
    for (Gen hh : G.next_set(g)) {
      double m2 = mu(hh);
      if (m2 > 0.0) inner += m2 * std::log(q(g));
    }
    if (!G.is_free_letter(g)) {
      for (Gen hh = 0; hh < G.alphabet_size(); ++hh) {
        if (G.finite_factor_of(hh) != G.finite_factor_of(g) || hh == G.inverse(g)) continue;
        double m3 = mu(hh);
        if (m3 > 0.0) inner += m3 * std::log(q(*G.factor_product(g, hh)) / q(hh));
      }
    }
    h -= p(g) * inner;
  }
  return h;
}

double rn_derivative(Gen g, int u, int v, const Word& xi_prefix, const Vector& V, const ColoredKernel& k,
                     const HittingMatrices& h) {
  const PlainGroup& G = *k.group;
  if (xi_prefix.empty()) throw ConfigError("rn_derivative needs the first boundary letter");
  Gen xi1 = static_cast<Gen>(xi_prefix[0]);
  if (xi1 == g) {
    return V(v) / h.q[g].row(u).dot(V);
  }
  if (!G.is_free_letter(g) && G.finite_factor_of(g) == G.finite_factor_of(xi1)) {
    Gen hh = *G.factor_product(G.inverse(g), xi1);  // g * hh = xi1
    return h.q[hh].row(v).dot(V) / h.q[xi1].row(u).dot(V);
  }
  if (!G.in_next(G.inverse(g), xi1)) throw ConfigError("rn_derivative: case mismatch for the given letters");
  return h.q[G.inverse(g)].row(v).dot(V) / V(u);
}

std::pair<double, double> relate_renewal(double expected_tau, double tilde_gamma, double tilde_h) {
  return {expected_tau * tilde_gamma, expected_tau * tilde_h};
}

void ApplicationWalkParams::check() const {
  if (L < 1) throw ConfigError("application walk needs L >= 1");
  if (k1 < 1 || k2 < 1) throw ConfigError("application walk needs k_i >= 1");
  if (static_cast<int>(p1.size()) != L || static_cast<int>(p2.size()) != L)
    throw ConfigError("profiles must have length L");
  double s = 0.0, s1 = 0.0, s2 = 0.0;
  for (double x : p1) {
    if (x < 0) throw ConfigError("negative profile entry");
    s += x;
    s1 += x;
  }
  for (double x : p2) {
    if (x < 0) throw ConfigError("negative profile entry");
    s += x;
    s2 += x;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ConfigError("profile must sum to 1");
  if (s1 <= 0.0 || s2 <= 0.0) throw ConfigError("both factors need positive mass (support must generate)");
}

namespace {

// alternating {1,2}-patterns of lengths 0..L-1, length-major
std::vector<std::vector<int>> alternating_patterns(int L) {
  std::vector<std::vector<int>> pats{{}};
  for (int len = 1; len <= L - 1; ++len) {
    std::vector<std::vector<int>> cur;
    for (int first : {1, 2}) {
      std::vector<int> p{first};
      while (static_cast<int>(p.size()) < len) p.push_back(3 - p.back());
      cur.push_back(p);
    }
    std::sort(cur.begin(), cur.end());
    for (auto& p : cur) pats.push_back(p);
  }
  return pats;
}

}  // namespace

double application_drift_oracle(const ApplicationWalkParams& params) {
  params.check();
  int L = params.L;
  auto pats = alternating_patterns(L);
  int r = static_cast<int>(pats.size());
  auto index_of = [&](const std::vector<int>& p) {
    for (int i = 0; i < r; ++i)
      if (pats[i] == p) return i;
    throw NumericalError("pattern index not found");
  };

  auto profile = [&](int i, int n) { return i == 1 ? params.p1[n - 1] : params.p2[n - 1]; };
  Matrix P1 = Matrix::Zero(r, r), P2 = Matrix::Zero(r, r);
  for (int i : {1, 2}) {
    Matrix& Pi = (i == 1) ? P1 : P2;
    // from the neutral pattern: start a word of length n+1 with factor i
    for (int c = 0; c < r; ++c) {
      const auto& tail = pats[c];
      if (!tail.empty() && tail.front() == i) continue;
      int n = static_cast<int>(tail.size());
      if (n + 1 > L) continue;
      Pi(0, c) += profile(i, n + 1);
    }
    // consume the leading remaining step
    for (int c = 0; c < r; ++c) {
      const auto& tail = pats[c];
      if (tail.empty() || tail.front() != i) continue;
      std::vector<int> rest(tail.begin() + 1, tail.end());
      Pi(c, index_of(rest)) += 1.0;
    }
  }

  double ik1 = 1.0 / params.k1, ik2 = 1.0 / params.k2;
  Matrix Q = Matrix::Zero(2 * r, 2 * r), Qt = Matrix::Zero(2 * r, 2 * r);
  Q.topLeftCorner(r, r) = (1.0 - ik1) * P1;
  Q.topRightCorner(r, r) = ik1 * P1 + P2;
  Q.bottomLeftCorner(r, r) = P1 + ik2 * P2;
  Q.bottomRightCorner(r, r) = (1.0 - ik2) * P2;
  Qt.topRightCorner(r, r) = -ik1 * P1 + P2;
  Qt.bottomLeftCorner(r, r) = P1 - ik2 * P2;

  Vector pi = stationary_pi(Q);
  double tilde_gamma = (pi.transpose() * Qt).sum();
  double etau = 0.0;
  for (int nlen = 1; nlen <= L; ++nlen) etau += nlen * (params.p1[nlen - 1] + params.p2[nlen - 1]);
  return etau * tilde_gamma;
}

ScalarWalkSpec application_walk(const ApplicationWalkParams& params) {
  params.check();
  auto group = std::make_shared<PlainGroup>(
      0, std::vector<FactorSpec>{FactorSpec::cyclic(params.k1 + 1), FactorSpec::cyclic(params.k2 + 1)});
  ScalarWalkSpec walk;
  walk.group = group;
  auto profile = [&](int i, int n) { return i == 1 ? params.p1[n - 1] : params.p2[n - 1]; };
  for (int n = 1; n <= params.L; ++n) {
    for (const Word& w : group->reduced_words(n)) {
      int first = group->finite_factor_of(static_cast<Gen>(w[0])) + 1;
      double denom = 1.0;
      for (char c : w) denom *= (group->finite_factor_of(static_cast<Gen>(c)) == 0) ? params.k1 : params.k2;
      double pr = profile(first, n) / denom;
      if (pr > 0.0) {
        walk.support.push_back(w);
        walk.probs.push_back(pr);
      }
    }
  }
  walk.check();
  return walk;
}

}  // namespace plainwalk
