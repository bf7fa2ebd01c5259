#include "plainwalk/boundary.hpp"

#include <Eigen/Eigenvalues>
#include <map>
#include <sstream>

#include "plainwalk/util.hpp"

namespace plainwalk {

namespace {

// (h, h') pairs of letters with h h' = g; nonempty only inside finite factors.
std::vector<std::vector<std::pair<Gen, Gen>>> factor_pairs(const PlainGroup& G) {
  int n = G.alphabet_size();
  std::vector<std::vector<std::pair<Gen, Gen>>> pairs(n);
  for (Gen g = 0; g < n; ++g) {
    if (G.is_free_letter(g)) continue;
    for (Gen h = 0; h < n; ++h) {
      if (G.finite_factor_of(h) != G.finite_factor_of(g) || h == g) continue;
      // h' = h^-1 g within the factor; h != g keeps h' != e
      Gen hp = *G.factor_product(G.inverse(h), g);
      pairs[g].push_back({h, hp});
    }
  }
  return pairs;
}

void check_solver_preconditions(const ColoredKernel& k) {
  if (k.has_identity_mass(0.0))
    throw ConfigError("boundary solver requires zero identity mass (support in S); linearize or strip laziness");
  if (!k.group->is_nonamenable())
    throw ConfigError("group is amenable (finite, Z or Z/2 * Z/2); no boundary theory applies");
  ValidationReport rep = validate(k);
  if (!rep.ok(1e-9)) throw ConfigError("kernel failed validation: " + rep.summary());
}

}  // namespace

HittingMatrices solve_hitting(const ColoredKernel& k, double tol, long max_iter) {
  check_solver_preconditions(k);
  const PlainGroup& G = *k.group;
  int n = G.alphabet_size();
  auto pairs = factor_pairs(G);

  std::vector<Matrix> x(n, Matrix::Zero(k.r, k.r));
  auto apply = [&](const std::vector<Matrix>& in) {
    std::vector<Matrix> out(n);
    for (Gen g = 0; g < n; ++g) {
      Matrix acc = k.p[g];
      for (auto& [h, hp] : pairs[g]) acc += k.p[h] * in[hp];
      Matrix back = Matrix::Zero(k.r, k.r);
      for (Gen h : G.next_set(g)) back += k.p[G.inverse(h)] * in[h];
      acc += back * in[g];
      out[g] = acc;
    }
    return out;
  };

  HittingMatrices res;
  double change = 1.0;
  long it = 0;
  while (change > tol && it < max_iter) {
    std::vector<Matrix> nx = apply(x);
    change = 0.0;
    for (Gen g = 0; g < n; ++g) {
      double up = (nx[g] - x[g]).minCoeff();
      if (up < -1e-13) throw NumericalError("hitting iteration lost monotonicity");
      if (nx[g].maxCoeff() > 1.0 + 1e-10) throw NumericalError("hitting iterate exceeded 1");
      change = std::max(change, (nx[g] - x[g]).cwiseAbs().maxCoeff());
    }
    x = std::move(nx);
    ++it;
  }
  res.iterations = it;
  std::vector<Matrix> fx = apply(x);
  res.residual = 0.0;
  for (Gen g = 0; g < n; ++g) res.residual = std::max(res.residual, (fx[g] - x[g]).cwiseAbs().maxCoeff());
  if (change > tol) {
    std::ostringstream os;
    os << "hitting iteration hit max_iter=" << max_iter << " with residual " << res.residual;
    throw NumericalError(os.str());
  }
  res.q = std::move(x);
  return res;
}

namespace {

// Exact traffic map x -> p_g D(x)_g + sum_{hh'=g} p_h x_{h'}
//                        + sum_{h in Next(g)} p_{h^-1} x_h D(x)_h^{-1} x_g.
std::vector<Matrix> traffic_map(const ColoredKernel& k, const std::vector<std::vector<std::pair<Gen, Gen>>>& pairs,
                                const std::vector<Matrix>& x) {
  const PlainGroup& G = *k.group;
  int n = G.alphabet_size();
  std::vector<Vector> delta(n, Vector::Zero(k.r));
  for (Gen g = 0; g < n; ++g)
    for (Gen h : G.next_set(g)) delta[g] += x[h].rowwise().sum();
  std::vector<Matrix> out(n);
  for (Gen g = 0; g < n; ++g) {
    Matrix acc = k.p[g] * delta[g].asDiagonal();
    for (auto& [h, hp] : pairs[g]) acc += k.p[h] * x[hp];
    Matrix back = Matrix::Zero(k.r, k.r);
    for (Gen h : G.next_set(g)) {
      // Delta_h(v,v) = 0 only at structurally unreachable (h, v) states,
      // where the x_h column vanishes as well; 0 * Delta^{-1} is 0 there.
      Vector inv = Vector::Zero(k.r);
      for (int v = 0; v < k.r; ++v) {
        if (delta[h](v) > 0.0) {
          inv(v) = 1.0 / delta[h](v);
        } else if (x[h].col(v).cwiseAbs().maxCoeff() > 1e-14) {
          throw NumericalError("traffic map: vanishing escape mass Delta on a reachable state");
        }
      }
      back += k.p[G.inverse(h)] * x[h] * inv.asDiagonal();
    }
    acc += back * x[g];
    out[g] = acc;
  }
  return out;
}

double max_abs_diff(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return m;
}

// Path (i): iterate the traffic map with per-color renormalization.
std::vector<Matrix> iterate_traffic(const ColoredKernel& k, const std::vector<std::vector<std::pair<Gen, Gen>>>& pairs,
                                    const HittingMatrices& h, double tol, long max_iter, double* final_change) {
  const PlainGroup& G = *k.group;
  int n = G.alphabet_size();
  int r = k.r;
  std::vector<Matrix> x(n);
  for (Gen g = 0; g < n; ++g) x[g] = h.q[g] / static_cast<double>(n);
  auto renormalize = [&](std::vector<Matrix>& v) {
    Vector s = Vector::Zero(r);
    for (Gen g = 0; g < n; ++g) s += v[g].rowwise().sum();
    if (s.minCoeff() <= 1e-300) throw NumericalError("traffic iteration: zero total escape mass for a color");
    for (Gen g = 0; g < n; ++g) v[g] = s.cwiseInverse().asDiagonal() * v[g];
  };
  renormalize(x);
  double change = 1.0;
  long it = 0;
  while (change > tol && it < max_iter) {
    std::vector<Matrix> nx = traffic_map(k, pairs, x);
    renormalize(nx);
    change = max_abs_diff(nx, x);
    x = std::move(nx);
    ++it;
  }
  if (final_change) *final_change = change;
  return x;
}

}  // namespace

TrafficSolution solve_traffic(const ColoredKernel& k, const HittingMatrices& h, double tol) {
  const PlainGroup& G = *k.group;
  int n = G.alphabet_size();
  int r = k.r;
  auto pairs = factor_pairs(G);

  // Path (ii): y_g = p_g (sum_{h in Next(g)} y_h) + sum_{hh'=g} p_h y_{h'}
  //                 + (sum_{h in Next(g)} p_{h^-1} q_h) y_g,  sum_g y_g = 1.
  const int N = n * r;
  auto idx = [&](Gen g, int u) { return g * r + u; };
  Matrix A = Matrix::Zero(N, N);
  for (Gen g = 0; g < n; ++g) {
    for (Gen hh : G.next_set(g))
      for (int u = 0; u < r; ++u)
        for (int v = 0; v < r; ++v) A(idx(g, u), idx(hh, v)) += k.p[g](u, v);
    for (auto& [a, b] : pairs[g])
      for (int u = 0; u < r; ++u)
        for (int v = 0; v < r; ++v) A(idx(g, u), idx(b, v)) += k.p[a](u, v);
    Matrix M = Matrix::Zero(r, r);
    for (Gen hh : G.next_set(g)) M += k.p[G.inverse(hh)] * h.q[hh];
    for (int u = 0; u < r; ++u)
      for (int v = 0; v < r; ++v) A(idx(g, u), idx(g, v)) += M(u, v);
  }
  Matrix S = Matrix::Zero(N + r, N);
  S.topRows(N) = Matrix::Identity(N, N) - A;
  for (Gen g = 0; g < n; ++g)
    for (int u = 0; u < r; ++u) S(N + u, idx(g, u)) = 1.0;
  Vector rhs = Vector::Zero(N + r);
  for (int u = 0; u < r; ++u) rhs(N + u) = 1.0;

  Vector ysol = S.colPivHouseholderQr().solve(rhs);
  double lin_residual = (S * ysol - rhs).cwiseAbs().maxCoeff();
  bool linear_ok = ysol.allFinite() && lin_residual <= 1e-8 && ysol.minCoeff() > -1e-9;

  TrafficSolution sol;
  sol.pi = stationary_pi(k.color_matrix());

  double iter_change = 0.0;
  std::vector<Matrix> iterated = iterate_traffic(k, pairs, h, std::min(tol, 1e-13), 1000000, &iter_change);

  std::vector<Matrix> mu(n);
  if (linear_ok) {
    std::vector<Vector> y(n);
    for (Gen g = 0; g < n; ++g) {
      y[g] = ysol.segment(g * r, r).cwiseMax(0.0);
    }
    for (Gen g = 0; g < n; ++g) {
      Vector dg = Vector::Zero(r);
      for (Gen hh : G.next_set(g)) dg += y[hh];
      mu[g] = h.q[g] * dg.asDiagonal();
    }
  } else {
    sol.used_fallback = true;
    mu = iterated;
  }

  sol.cross_check_distance = max_abs_diff(mu, iterated);
  if (!sol.used_fallback && sol.cross_check_distance > 1e-6)
    throw NumericalError("traffic paths disagree beyond 1e-6; solution unreliable");

  sol.mu = std::move(mu);
  sol.y.resize(n);
  sol.delta.assign(n, Vector::Zero(r));
  for (Gen g = 0; g < n; ++g) sol.y[g] = sol.mu[g].rowwise().sum();
  for (Gen g = 0; g < n; ++g)
    for (Gen hh : G.next_set(g)) sol.delta[g] += sol.y[hh];

  std::vector<Matrix> fmu = traffic_map(k, pairs, sol.mu);
  sol.traffic_residual = max_abs_diff(fmu, sol.mu);
  sol.mu_qd_residual = 0.0;
  for (Gen g = 0; g < n; ++g)
    sol.mu_qd_residual =
        std::max(sol.mu_qd_residual, (sol.mu[g] - h.q[g] * sol.delta[g].asDiagonal()).cwiseAbs().maxCoeff());
  return sol;
}

TrafficSolution free_group_mu(const ColoredKernel& k, const HittingMatrices& h) {
  const PlainGroup& G = *k.group;
  if (!G.is_extended_free())
    throw ConfigError("free_group_mu needs a free group in the extended sense (all finite factors of order 2)");
  int n = G.alphabet_size();
  int r = k.r;
  auto pairs = factor_pairs(G);

  TrafficSolution sol;
  sol.pi = stationary_pi(k.color_matrix());
  sol.mu.resize(n);
  for (Gen g = 0; g < n; ++g) {
    Gen gi = G.inverse(g);
    Matrix M = Matrix::Identity(r, r) - h.q[gi] * h.q[g];
    Eigen::FullPivLU<Matrix> lu(M);
    if (!lu.isInvertible())
      throw NumericalError("(I - q_{g^-1} q_g) is singular, contradicting transience");
    Vector rhsv = Vector::Ones(r) - h.d(gi);
    Vector x = lu.solve(rhsv);
    sol.mu[g] = h.q[g] * x.asDiagonal();
  }
  sol.y.resize(n);
  sol.delta.assign(n, Vector::Zero(r));
  for (Gen g = 0; g < n; ++g) sol.y[g] = sol.mu[g].rowwise().sum();
  for (Gen g = 0; g < n; ++g)
    for (Gen hh : G.next_set(g)) sol.delta[g] += sol.y[hh];
  std::vector<Matrix> fmu = traffic_map(k, pairs, sol.mu);
  sol.traffic_residual = max_abs_diff(fmu, sol.mu);
  sol.mu_qd_residual = 0.0;
  for (Gen g = 0; g < n; ++g)
    sol.mu_qd_residual =
        std::max(sol.mu_qd_residual, (sol.mu[g] - h.q[g] * sol.delta[g].asDiagonal()).cwiseAbs().maxCoeff());
  return sol;
}

BoundarySolution solve_boundary(const ColoredKernel& k, double tol, long max_iter) {
  BoundarySolution b;
  b.hitting = solve_hitting(k, tol, max_iter);
  b.traffic = solve_traffic(k, b.hitting, tol);
  return b;
}

Vector harmonic_cylinder_colors(const CylinderQuery& c, const ColoredKernel& k, const HittingMatrices& h,
                                const TrafficSolution& t) {
  const PlainGroup& G = *k.group;
  if (c.color < 0 || c.color >= k.r) throw ConfigError("cylinder query color out of range");
  if (c.word.empty()) throw ConfigError("cylinder query needs a nonempty word");
  if (!G.is_reduced(c.word)) throw ConfigError("cylinder word is not reduced");
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(k.r);
  row(c.color) = 1.0;
  for (size_t i = 0; i + 1 < c.word.size(); ++i) row = row * h.q[static_cast<Gen>(c.word[i])];
  row = row * t.mu[static_cast<Gen>(c.word.back())];
  return row.transpose();
}

double harmonic_cylinder(const CylinderQuery& c, const ColoredKernel& k, const HittingMatrices& h,
                         const TrafficSolution& t) {
  return harmonic_cylinder_colors(c, k, h, t).sum();
}

double stationarity_residual(const ColoredKernel& k, const HittingMatrices& h, const TrafficSolution& t,
                             int max_len) {
  const PlainGroup& G = *k.group;
  double worst = 0.0;
  for (int len = 1; len <= max_len; ++len) {
    for (const Word& w : G.reduced_words(len)) {
      for (int u = 0; u < k.r; ++u) {
        double lhs = harmonic_cylinder({u, w}, k, h, t);
        double rhs = 0.0;
        for (Gen g = 0; g < G.alphabet_size(); ++g) {
          if (k.p[g].cwiseAbs().maxCoeff() == 0.0) continue;
          Word acted = G.boundary_prefix_action(G.inverse(g), w);
          for (int v = 0; v < k.r; ++v) {
            double pg = k.p[g](u, v);
            if (pg == 0.0) continue;
            double mass = acted.empty() ? t.delta[g](v) : harmonic_cylinder({v, acted}, k, h, t);
            rhs += pg * mass;
          }
        }
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  return worst;
}

ZConsistencyReport z_consistency_check(const ColoredKernel& k, const HittingMatrices& h) {
  ZConsistencyReport rep;
  const PlainGroup& G = *k.group;
  if (!G.is_extended_free()) {
    rep.notice = "group is not free in the extended sense";
    return rep;
  }
  int n = G.alphabet_size();
  int r = k.r;
  for (Gen g = 0; g < n; ++g) {
    Eigen::FullPivLU<Matrix> lu(k.p[g]);
    if (!lu.isInvertible()) {
      rep.notice = "p_g singular for letter " + G.letter_name(g) + "; z-relation skipped";
      return rep;
    }
  }
  rep.applicable = true;

  Matrix z = Matrix::Identity(r, r);
  for (Gen g = 0; g < n; ++g) z -= k.p[G.inverse(g)] * h.q[g];

  rep.min_real_part_qp = std::numeric_limits<double>::infinity();
  for (Gen g = 0; g < n; ++g) {
    Matrix qp = h.q[g] * k.p[g].inverse();
    Eigen::EigenSolver<Matrix> es(qp);
    rep.min_real_part_qp = std::min(rep.min_real_part_qp, es.eigenvalues().real().minCoeff());

    Gen gi = G.inverse(g);
    Matrix Pg = Matrix::Zero(2 * r, 2 * r), Qg = Matrix::Zero(2 * r, 2 * r), Z2 = Matrix::Zero(2 * r, 2 * r);
    Pg.topRightCorner(r, r) = k.p[g];
    Pg.bottomLeftCorner(r, r) = k.p[gi];
    Qg.topRightCorner(r, r) = h.q[g];
    Qg.bottomLeftCorner(r, r) = h.q[gi];
    Z2.topLeftCorner(r, r) = z;
    Z2.bottomRightCorner(r, r) = z;
    Matrix Zg = Pg.partialPivLu().solve(Z2);
    double res = ((Zg + Qg) * Qg - Matrix::Identity(2 * r, 2 * r)).cwiseAbs().maxCoeff();
    rep.max_identity_residual = std::max(rep.max_identity_residual, res);
  }
  Eigen::EigenSolver<Matrix> ez(z);
  rep.min_real_part_z = ez.eigenvalues().real().minCoeff();
  return rep;
}

namespace {

// row-major boolean matrix packed in 64-bit blocks
struct BoolMat {
  int r = 0;
  int words = 0;
  std::vector<std::uint64_t> bits;
  BoolMat() = default;
  BoolMat(int n) : r(n), words((n + 63) / 64), bits(static_cast<size_t>(n) * ((n + 63) / 64), 0) {}
  void set(int u, int v) { bits[static_cast<size_t>(u) * words + v / 64] |= (1ULL << (v % 64)); }
  bool get(int u, int v) const { return (bits[static_cast<size_t>(u) * words + v / 64] >> (v % 64)) & 1ULL; }
  BoolMat mul(const BoolMat& o) const {
    BoolMat out(r);
    for (int u = 0; u < r; ++u)
      for (int w = 0; w < r; ++w)
        if (get(u, w))
          for (int b = 0; b < words; ++b)
            out.bits[static_cast<size_t>(u) * words + b] |= o.bits[static_cast<size_t>(w) * words + b];
    return out;
  }
  bool rows_all_equal() const {
    for (int u = 1; u < r; ++u)
      for (int b = 0; b < words; ++b)
        if (bits[static_cast<size_t>(u) * words + b] != bits[b]) return false;
    return true;
  }
  std::vector<std::uint64_t> first_row() const { return {bits.begin(), bits.begin() + words}; }
  bool first_row_empty() const {
    for (int b = 0; b < words; ++b)
      if (bits[b]) return false;
    return true;
  }
};

}  // namespace

LalleyReport lalley_condition_check(const HittingMatrices& h, const PlainGroup& G, int k, int m) {
  LalleyReport rep;
  rep.k = k;
  rep.m = m;
  int n = G.alphabet_size();
  int r = static_cast<int>(h.q[0].rows());
  std::vector<BoolMat> sup(n, BoolMat(r));
  for (Gen g = 0; g < n; ++g)
    for (int u = 0; u < r; ++u)
      for (int v = 0; v < r; ++v)
        if (h.q[g](u, v) > 1e-14) sup[g].set(u, v);

  std::map<Word, std::vector<std::uint64_t>> pattern_by_suffix;
  int tested = 0;
  for (int len = m; len <= m + k; ++len) {
    // depth-first over reduced words of this length, carrying the product
    struct Frame {
      Word w;
      BoolMat prod;
    };
    std::vector<Frame> stack;
    for (Gen g = 0; g < n; ++g) stack.push_back({Word(1, static_cast<char>(g)), sup[g]});
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      if (static_cast<int>(f.w.size()) == len) {
        ++tested;
        if (!f.prod.rows_all_equal() || f.prod.first_row_empty()) {
          rep.violation = "support of product over '" + G.word_name(f.w) + "' is not of the form rows x B";
          return rep;
        }
        Word suffix = f.w.substr(f.w.size() - std::min<size_t>(k, f.w.size()));
        auto row = f.prod.first_row();
        auto [it, inserted] = pattern_by_suffix.emplace(suffix, row);
        if (!inserted && it->second != row) {
          rep.violation = "pattern for suffix '" + G.word_name(suffix) + "' differs across words";
          return rep;
        }
        continue;
      }
      for (Gen nx : G.next_set(static_cast<Gen>(f.w.back()))) {
        Frame e;
        e.w = f.w;
        e.w.push_back(static_cast<char>(nx));
        e.prod = f.prod.mul(sup[nx]);
        stack.push_back(std::move(e));
      }
    }
  }
  rep.lengths_tested = tested;
  rep.holds = true;
  return rep;
}

LalleyReport find_lalley_params(const HittingMatrices& h, const PlainGroup& G, int k_max, int m_max) {
  LalleyReport last;
  for (int sum = 2; sum <= k_max + m_max; ++sum)
    for (int k = 1; k < sum && k <= k_max; ++k) {
      int m = sum - k;
      if (m < 1 || m > m_max) continue;
      LalleyReport rep = lalley_condition_check(h, G, k, m);
      if (rep.holds) return rep;
      last = rep;
    }
  return last;
}

}  // namespace plainwalk
