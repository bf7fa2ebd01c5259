#include "plainwalk/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "plainwalk/util.hpp"

namespace plainwalk {

namespace {

constexpr long kBlocks = 256;

struct ScalarSampler {
  const ScalarWalkSpec* walk;
  std::vector<double> cum;
  explicit ScalarSampler(const ScalarWalkSpec& w) : walk(&w) {
    cum.resize(w.probs.size());
    double c = 0.0;
    for (size_t i = 0; i < w.probs.size(); ++i) {
      c += w.probs[i];
      cum[i] = c;
    }
    cum.back() = 1.0;
  }
  const Word& draw(std::mt19937_64& rng) const {
    double x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    size_t i = std::lower_bound(cum.begin(), cum.end(), x) - cum.begin();
    return walk->support[std::min(i, cum.size() - 1)];
  }
};

struct PathStats {
  double sum_end = 0.0, sumsq_end = 0.0;
  double sum_diff = 0.0, sumsq_diff = 0.0;
  long count = 0;
};

template <class StepFn>
DriftEstimate drift_from_paths(long n_paths, long T, std::uint64_t seed, int threads, StepFn&& make_path) {
  std::vector<PathStats> stats(kBlocks);
  long per_block = (n_paths + kBlocks - 1) / kBlocks;
  parallel_blocks(kBlocks, [&](long b) {
    long lo = b * per_block, hi = std::min(n_paths, lo + per_block);
    PathStats st;
    for (long i = lo; i < hi; ++i) {
      std::mt19937_64 rng = make_stream(seed, static_cast<std::uint64_t>(i));
      auto [len_mid, len_end] = make_path(rng);
      double e = static_cast<double>(len_end) / T;
      double d = static_cast<double>(len_end - len_mid) / (T - T / 2);
      st.sum_end += e;
      st.sumsq_end += e * e;
      st.sum_diff += d;
      st.sumsq_diff += d * d;
      st.count += 1;
    }
    stats[b] = st;
  }, threads);

  PathStats all;
  for (const auto& st : stats) {
    all.sum_end += st.sum_end;
    all.sumsq_end += st.sumsq_end;
    all.sum_diff += st.sum_diff;
    all.sumsq_diff += st.sumsq_diff;
    all.count += st.count;
  }
  DriftEstimate est;
  est.n_paths = all.count;
  est.horizon = T;
  est.estimate = all.sum_end / all.count;
  est.slope_estimate = all.sum_diff / all.count;
  double v1 = std::max(0.0, all.sumsq_end / all.count - est.estimate * est.estimate);
  double v2 = std::max(0.0, all.sumsq_diff / all.count - est.slope_estimate * est.slope_estimate);
  est.ci_half_width = 1.96 * std::sqrt(v1 / all.count);
  est.slope_ci_half_width = 1.96 * std::sqrt(v2 / all.count);
  return est;
}

}  // namespace

DriftEstimate empirical_drift(const ColoredKernel& k, long n_paths, long T, std::uint64_t seed, int start_color,
                              int threads) {
  KernelSampler sampler(k);
  long mid = T / 2;
  return drift_from_paths(n_paths, T, seed, threads, [&](std::mt19937_64& rng) {
    WalkState s;
    s.color = start_color;
    long len_mid = 0;
    for (long t = 1; t <= T; ++t) {
      sampler.step(s, rng);
      if (t == mid) len_mid = static_cast<long>(s.position.size());
    }
    return std::pair<long, long>(len_mid, static_cast<long>(s.position.size()));
  });
}

DriftEstimate empirical_drift(const ScalarWalkSpec& w, long n_paths, long T, std::uint64_t seed, int threads) {
  w.check();
  ScalarSampler sampler(w);
  const PlainGroup& G = *w.group;
  long mid = T / 2;
  return drift_from_paths(n_paths, T, seed, threads, [&](std::mt19937_64& rng) {
    Word pos;
    long len_mid = 0;
    for (long t = 1; t <= T; ++t) {
      const Word& g = sampler.draw(rng);
      for (char c : g) G.multiply_inplace(pos, static_cast<Gen>(c));
      if (t == mid) len_mid = static_cast<long>(pos.size());
    }
    return std::pair<long, long>(len_mid, static_cast<long>(pos.size()));
  });
}

namespace {

template <class PathFn>
TrajectoryBatch batch_from_paths(long n_paths, long T, std::uint64_t seed, int threads, PathFn&& run_path) {
  std::vector<std::vector<double>> partial(kBlocks);
  long per_block = (n_paths + kBlocks - 1) / kBlocks;
  parallel_blocks(kBlocks, [&](long b) {
    long lo = b * per_block, hi = std::min(n_paths, lo + per_block);
    if (lo >= hi) return;
    std::vector<double>& acc = partial[b];
    acc.assign(T + 1, 0.0);
    for (long i = lo; i < hi; ++i) {
      std::mt19937_64 rng = make_stream(seed, static_cast<std::uint64_t>(i));
      run_path(rng, acc);
    }
  }, threads);
  TrajectoryBatch batch;
  batch.n_paths = n_paths;
  batch.horizon = T;
  batch.seed = seed;
  batch.mean_abs.assign(T + 1, 0.0);
  for (const auto& acc : partial)
    for (size_t t = 0; t < acc.size(); ++t) batch.mean_abs[t] += acc[t];
  for (double& v : batch.mean_abs) v /= n_paths;
  return batch;
}

}  // namespace

TrajectoryBatch trajectory_batch(const ScalarWalkSpec& w, long n_paths, long T, std::uint64_t seed, int threads) {
  w.check();
  ScalarSampler sampler(w);
  const PlainGroup& G = *w.group;
  return batch_from_paths(n_paths, T, seed, threads, [&](std::mt19937_64& rng, std::vector<double>& acc) {
    Word pos;
    for (long t = 1; t <= T; ++t) {
      const Word& g = sampler.draw(rng);
      for (char c : g) G.multiply_inplace(pos, static_cast<Gen>(c));
      acc[t] += static_cast<double>(pos.size());
    }
  });
}

TrajectoryBatch trajectory_batch(const ColoredKernel& k, long n_paths, long T, std::uint64_t seed, int start_color,
                                 int threads) {
  KernelSampler sampler(k);
  return batch_from_paths(n_paths, T, seed, threads, [&](std::mt19937_64& rng, std::vector<double>& acc) {
    WalkState s;
    s.color = start_color;
    for (long t = 1; t <= T; ++t) {
      sampler.step(s, rng);
      acc[t] += static_cast<double>(s.position.size());
    }
  });
}

double series_slope(const std::vector<double>& series, long lo, long hi) {
  if (hi <= lo) throw ConfigError("series_slope needs a nonempty window");
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (long t = lo; t <= hi && t < static_cast<long>(series.size()); ++t) {
    n += 1;
    sx += t;
    sy += series[t];
    sxx += static_cast<double>(t) * t;
    sxy += t * series[t];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw ConfigError("series_slope: degenerate window");
  return (n * sxy - sx * sy) / denom;
}

namespace {

template <class Dist>
EntropyEstimate finish_entropy(const Dist& dist, long T, long n_samples, std::uint64_t seed,
                               const std::function<double(const typename Dist::value_type&)>& prob_of) {
  EntropyEstimate est;
  est.horizon = T;
  est.n_states = dist.size();
  double H = 0.0;
  std::vector<double> cum;
  cum.reserve(dist.size());
  std::vector<double> probs;
  probs.reserve(dist.size());
  double c = 0.0;
  for (const auto& kv : dist) {
    double p = prob_of(kv);
    if (p <= 0.0) continue;
    H -= p * std::log(p);
    c += p;
    cum.push_back(c);
    probs.push_back(p);
  }
  est.exact_entropy_rate = H / T;
  std::mt19937_64 rng = make_stream(seed, 0);
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < n_samples; ++i) {
    double x = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * c;
    size_t j = std::lower_bound(cum.begin(), cum.end(), x) - cum.begin();
    j = std::min(j, probs.size() - 1);
    double val = -std::log(probs[j]) / T;
    sum += val;
    sumsq += val * val;
  }
  est.n_samples = n_samples;
  est.estimate = sum / n_samples;
  double var = std::max(0.0, sumsq / n_samples - est.estimate * est.estimate);
  est.ci_half_width = 1.96 * std::sqrt(var / n_samples);
  return est;
}

}  // namespace

EntropyEstimate empirical_entropy_logp(const ScalarWalkSpec& w, long T, long n_samples, std::uint64_t seed,
                                       std::size_t max_states) {
  w.check();
  const PlainGroup& G = *w.group;
  std::unordered_map<Word, double> dist;
  dist[Word()] = 1.0;
  for (long t = 0; t < T; ++t) {
    std::unordered_map<Word, double> next;
    next.reserve(dist.size() * 2);
    for (const auto& [pos, mass] : dist) {
      for (size_t i = 0; i < w.support.size(); ++i) {
        next[G.multiply(pos, w.support[i])] += mass * w.probs[i];
      }
    }
    if (next.size() > max_states)
      throw NumericalError("empirical_entropy_logp: reachable set exceeds max_states; use random_action_entropy");
    dist = std::move(next);
  }
  using KV = std::unordered_map<Word, double>;
  return finish_entropy<KV>(dist, T, n_samples, seed,
                            [](const KV::value_type& kv) { return kv.second; });
}

EntropyEstimate empirical_entropy_logp(const ColoredKernel& k, int start_color, long T, long n_samples,
                                       std::uint64_t seed, std::size_t max_states) {
  const PlainGroup& G = *k.group;
  if (start_color < 0 || start_color >= k.r) throw ConfigError("start color out of range");
  // mass vector over colors attached to each reachable position
  std::unordered_map<Word, Vector> dist;
  dist[Word()] = Vector::Unit(k.r, start_color);
  std::vector<Gen> letters = k.support_letters();
  bool lazy = k.has_identity_mass();
  for (long t = 0; t < T; ++t) {
    std::unordered_map<Word, Vector> next;
    next.reserve(dist.size() * 2);
    auto deposit = [&](Word&& pos, const Vector& mass) {
      auto it = next.find(pos);
      if (it == next.end())
        next.emplace(std::move(pos), mass);
      else
        it->second += mass;
    };
    for (const auto& [pos, mass] : dist) {
      Eigen::RowVectorXd row = mass.transpose();
      if (lazy) deposit(Word(pos), (row * k.p_e).transpose());
      for (Gen g : letters) {
        Word np = pos;
        G.multiply_inplace(np, g);
        deposit(std::move(np), (row * k.p[g]).transpose());
      }
    }
    if (next.size() > max_states)
      throw NumericalError("empirical_entropy_logp: reachable set exceeds max_states; use random_action_entropy");
    dist = std::move(next);
    // prune exact zeros introduced by structural sparsity
    for (auto it = dist.begin(); it != dist.end();) {
      if (it->second.maxCoeff() <= 0.0)
        it = dist.erase(it);
      else
        ++it;
    }
  }
  // flatten (position, color) pairs
  std::vector<double> flat;
  for (const auto& [pos, mass] : dist)
    for (int v = 0; v < k.r; ++v)
      if (mass(v) > 0.0) flat.push_back(mass(v));
  using KV = std::vector<double>;
  return finish_entropy<KV>(flat, T, n_samples, seed, [](const double& p) { return p; });
}

RandomActionSeries random_action_entropy(const ScalarWalkSpec& w, long n, long T, std::uint64_t seed,
                                         double h_reference) {
  w.check();
  const PlainGroup& G = *w.group;
  if (G.num_finite_factors() != 0 || G.free_rank() < 1)
    throw ConfigError("random_action_entropy needs a free-group walk (no finite factors)");
  if (n > std::numeric_limits<int>::max()) throw ConfigError("permutation size too large");
  std::mt19937_64 rng = make_stream(seed, 0);
  int d = G.free_rank();
  std::vector<std::vector<int>> perm(2 * d, std::vector<int>(n));
  for (int i = 0; i < d; ++i) {
    auto& fwd = perm[2 * i];
    std::iota(fwd.begin(), fwd.end(), 0);
    for (long j = n - 1; j > 0; --j) {
      long k = static_cast<long>(std::uniform_int_distribution<long>(0, j)(rng));
      std::swap(fwd[j], fwd[k]);
    }
    auto& bwd = perm[2 * i + 1];
    for (long j = 0; j < n; ++j) bwd[fwd[j]] = static_cast<int>(j);
  }
  // one composite permutation per support word: Lambda(w)(x)
  std::vector<std::vector<int>> word_perm(w.support.size());
  for (size_t i = 0; i < w.support.size(); ++i) {
    std::vector<int> comp(n);
    std::iota(comp.begin(), comp.end(), 0);
    const Word& word = w.support[i];
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      const auto& pg = perm[static_cast<Gen>(*it)];
      std::vector<int> nc(n);
      for (long x = 0; x < n; ++x) nc[x] = pg[comp[x]];
      comp = std::move(nc);
    }
    word_perm[i] = std::move(comp);
  }

  RandomActionSeries series;
  series.n = n;
  series.entropy.assign(T + 1, 0.0);
  series.saturated.assign(T + 1, 0);
  std::vector<double> v(n, 0.0), nv(n, 0.0);
  v[0] = 1.0;
  double logn = std::log(static_cast<double>(n));
  for (long t = 1; t <= T; ++t) {
    std::fill(nv.begin(), nv.end(), 0.0);
    for (size_t i = 0; i < w.support.size(); ++i) {
      const auto& pg = word_perm[i];
      double p = w.probs[i];
      for (long y = 0; y < n; ++y) nv[y] += p * v[pg[y]];
    }
    std::swap(v, nv);
    double H = 0.0;
    for (long y = 0; y < n; ++y)
      if (v[y] > 0.0) H -= v[y] * std::log(v[y]);
    series.entropy[t] = H;
    series.saturated[t] = (h_reference * t > logn) ? 1 : 0;
  }
  long hi = 1;
  while (hi + 1 <= T && !series.saturated[hi + 1]) ++hi;
  series.window_end = hi;
  // Fit inside the window but away from its ends: early increments sit above
  // h, and within ~3 nats of the ln n cap collisions drag the series down.
  long fit_hi = 1;
  while (fit_hi + 1 <= hi && series.entropy[fit_hi + 1] <= logn - 3.0) ++fit_hi;
  long fit_lo = std::max<long>(1, (2 * fit_hi) / 3);
  series.slope = fit_hi > fit_lo ? series_slope(series.entropy, fit_lo, fit_hi)
                                 : series.entropy[std::min<long>(1, T)];
  return series;
}

RenewalStats renewal_statistics(const LinearizationResult& lin, const ScalarWalkSpec& w, long n_gaps,
                                std::uint64_t seed) {
  const ColoredKernel& k = lin.kernel;
  const PlainGroup& G = *k.group;
  KernelSampler sampler(k);
  std::mt19937_64 rng = make_stream(seed, 0);
  bool reversible = lin.construction == Construction::Reversible;

  std::vector<long> gaps;
  gaps.reserve(n_gaps);
  std::unordered_map<Word, long> endpoint_counts;
  WalkState s;  // position relative to the last renewal
  long since = 0;
  bool first_step = true;
  long guard = 0;
  const long guard_cap = n_gaps * 10000;
  while (static_cast<long>(gaps.size()) < n_gaps && guard++ < guard_cap) {
    Word before = s.position;
    sampler.step(s, rng);
    ++since;
    bool renew;
    if (!reversible) {
      renew = (s.color == 0);
    } else if (first_step && s.position == before) {
      renew = true;  // identity move renews immediately
    } else {
      first_step = false;
      renew = (s.color == 0 && !s.position.empty());
    }
    if (renew) {
      gaps.push_back(since);
      endpoint_counts[s.position] += 1;
      s.position.clear();
      s.color = 0;
      since = 0;
      first_step = true;
    }
  }

  RenewalStats st;
  st.n_gaps = static_cast<long>(gaps.size());
  if (gaps.empty()) return st;
  double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / gaps.size();
  double var = 0.0;
  for (long g : gaps) var += (g - mean) * (g - mean);
  var /= std::max<size_t>(1, gaps.size() - 1);
  st.mean_gap = mean;
  st.gap_ci_half_width = 1.96 * std::sqrt(var / gaps.size());
  double cov = 0.0;
  for (size_t i = 0; i + 1 < gaps.size(); ++i) cov += (gaps[i] - mean) * (gaps[i + 1] - mean);
  cov /= std::max<size_t>(1, gaps.size() - 1);
  st.lag1_corr = var > 0 ? cov / var : 0.0;
  st.lag1_sigma = 1.0 / std::sqrt(static_cast<double>(gaps.size()));

  double N = static_cast<double>(gaps.size());
  for (const auto& [word, count] : endpoint_counts) {
    double p = w.prob_of(word);
    if (p <= 0.0) {
      st.law_max_z = std::numeric_limits<double>::infinity();
      continue;
    }
    double z = std::abs(count / N - p) / std::sqrt(p * (1 - p) / N);
    st.law_max_z = std::max(st.law_max_z, z);
  }
  for (size_t i = 0; i < w.support.size(); ++i)
    if (!endpoint_counts.count(w.support[i]) && w.probs[i] > 0.0) {
      double z = w.probs[i] * N / std::sqrt(w.probs[i] * (1 - w.probs[i]) * N);
      st.law_max_z = std::max(st.law_max_z, z);
    }
  return st;
}

}  // namespace plainwalk
