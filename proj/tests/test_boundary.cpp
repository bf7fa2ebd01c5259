#include <random>

#include "doctest.h"
#include "plainwalk/boundary.hpp"
#include "plainwalk/linearize.hpp"
#include "plainwalk/util.hpp"

using namespace plainwalk;

namespace {

std::shared_ptr<PlainGroup> f2() { return std::make_shared<PlainGroup>(2); }

ScalarWalkSpec walk_on(std::shared_ptr<const PlainGroup> g,
                       const std::vector<std::pair<std::string, double>>& entries) {
  ScalarWalkSpec w;
  w.group = g;
  for (auto& [name, p] : entries) {
    w.support.push_back(g->word_from_names(name));
    w.probs.push_back(p);
  }
  w.check();
  return w;
}

ColoredKernel srw_f2_kernel() {
  return ColoredKernel::from_scalar(
      walk_on(f2(), {{"a1", 0.25}, {"a1'", 0.25}, {"a2", 0.25}, {"a2'", 0.25}}));
}

ColoredKernel z3z3_kernel() {
  auto g = std::make_shared<PlainGroup>(0, std::vector<FactorSpec>{FactorSpec::cyclic(3), FactorSpec::cyclic(3)});
  return ColoredKernel::from_scalar(
      walk_on(g, {{"G1.1", 0.25}, {"G1.2", 0.25}, {"G2.1", 0.25}, {"G2.2", 0.25}}));
}

// linearized kernel of a fixed symmetric length-<=2 walk on F2
LinearizationResult len2_linearized(Construction c = Construction::Prefix) {
  ScalarWalkSpec w = walk_on(f2(), {{"a1", 0.287}, {"a1'", 0.287}, {"a1 a2", 0.213}, {"a2' a1'", 0.213}});
  return c == Construction::Prefix ? linearize_prefix(w) : linearize_reversible(w);
}

}  // namespace

TEST_CASE("hitting probabilities: SRW on F2 gives q = 1/3") {
  // scalar oracle: minimal root of 3q^2 - 4q + 1 = 0
  BoundarySolution b = solve_boundary(srw_f2_kernel());
  for (Gen g = 0; g < 4; ++g) CHECK(std::abs(b.hitting.q[g](0, 0) - 1.0 / 3) <= 1e-10);
  CHECK(b.hitting.residual <= 1e-12);
  // traffic: mu = 1/4, Delta = 3/4
  for (Gen g = 0; g < 4; ++g) {
    CHECK(std::abs(b.traffic.mu[g](0, 0) - 0.25) <= 1e-10);
    CHECK(std::abs(b.traffic.delta[g](0) - 0.75) <= 1e-10);
  }
}

TEST_CASE("hitting probabilities: Z3*Z3 uniform gives q = 1/2, mu = 1/4") {
  // scalar oracle including the in-factor term: 2q^2 - 3q + 1 = 0
  BoundarySolution b = solve_boundary(z3z3_kernel());
  for (Gen g = 0; g < 4; ++g) {
    CHECK(std::abs(b.hitting.q[g](0, 0) - 0.5) <= 1e-10);
    CHECK(std::abs(b.traffic.mu[g](0, 0) - 0.25) <= 1e-10);
    CHECK(std::abs(b.traffic.delta[g](0) - 0.5) <= 1e-10);
  }
}

TEST_CASE("free group SRW q = 1/(2d-1) and drift oracle values") {
  for (int d : {2, 3, 4}) {
    auto g = std::make_shared<PlainGroup>(d);
    ScalarWalkSpec w;
    w.group = g;
    for (Gen l = 0; l < 2 * d; ++l) {
      w.support.push_back(Word(1, static_cast<char>(l)));
      w.probs.push_back(1.0 / (2 * d));
    }
    BoundarySolution b = solve_boundary(ColoredKernel::from_scalar(w));
    for (Gen l = 0; l < 2 * d; ++l) CHECK(std::abs(b.hitting.q[l](0, 0) - 1.0 / (2 * d - 1)) <= 1e-10);
  }
}

TEST_CASE("solver rejects bad inputs") {
  ColoredKernel lazy = srw_f2_kernel();
  lazy.p_e(0, 0) = 0.2;
  for (Gen g = 0; g < 4; ++g) lazy.p[g] *= 0.8;
  CHECK_THROWS_AS(solve_hitting(lazy), ConfigError);

  auto z = std::make_shared<PlainGroup>(1);
  ColoredKernel onZ(z, 1);
  onZ.p[0](0, 0) = 0.5;
  onZ.p[1](0, 0) = 0.5;
  CHECK_THROWS_AS(solve_hitting(onZ), ConfigError);
}

TEST_CASE("hitting iterates stay within [0,1] and d_g row sums <= 1") {
  BoundarySolution b = solve_boundary(len2_linearized().kernel);
  const ColoredKernel& k = len2_linearized().kernel;
  for (Gen g = 0; g < k.group->alphabet_size(); ++g) {
    CHECK(b.hitting.q[g].minCoeff() >= 0.0);
    CHECK(b.hitting.d(g).maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("traffic dual paths agree and mu is sandwiched") {
  for (auto c : {Construction::Prefix, Construction::Reversible}) {
    LinearizationResult lin = len2_linearized(c);
    BoundarySolution b = solve_boundary(lin.kernel);
    CHECK_FALSE(b.traffic.used_fallback);
    CHECK(b.traffic.cross_check_distance <= 1e-8);
    CHECK(b.traffic.traffic_residual <= 1e-9);
    CHECK(b.traffic.mu_qd_residual <= 1e-9);
    Matrix total = Matrix::Zero(lin.kernel.r, lin.kernel.r);
    for (Gen g = 0; g < lin.kernel.group->alphabet_size(); ++g) {
      CHECK((b.traffic.mu[g] - b.hitting.q[g]).maxCoeff() <= 1e-9);  // mu <= q
      total += b.traffic.mu[g];
    }
    CHECK((total.rowwise().sum() - Vector::Ones(lin.kernel.r)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("free-group closed form matches the traffic solution") {
  // scalar SRW
  BoundarySolution b = solve_boundary(srw_f2_kernel());
  TrafficSolution f = free_group_mu(srw_f2_kernel(), b.hitting);
  CHECK(std::abs(f.mu[0](0, 0) - 0.25) <= 1e-10);

  // colored linearized kernel
  LinearizationResult lin = len2_linearized();
  BoundarySolution bl = solve_boundary(lin.kernel);
  TrafficSolution fl = free_group_mu(lin.kernel, bl.hitting);
  double dist = 0.0;
  for (Gen g = 0; g < lin.kernel.group->alphabet_size(); ++g)
    dist = std::max(dist, (fl.mu[g] - bl.traffic.mu[g]).cwiseAbs().maxCoeff());
  CHECK(dist <= 1e-8);

  // extended free with involutions: Z/2 * Z/2 * Z/2 uniform
  auto g3 = std::make_shared<PlainGroup>(
      0, std::vector<FactorSpec>{FactorSpec::cyclic(2), FactorSpec::cyclic(2), FactorSpec::cyclic(2)});
  ScalarWalkSpec w3 = walk_on(g3, {{"G1.1", 1.0 / 3}, {"G2.1", 1.0 / 3}, {"G3.1", 1.0 / 3}});
  BoundarySolution b3 = solve_boundary(ColoredKernel::from_scalar(w3));
  // oracle: 2q^2 - 3q + 1 = 0 -> q = 1/2; mu = q/(1+q) = 1/3
  CHECK(std::abs(b3.hitting.q[0](0, 0) - 0.5) <= 1e-10);
  TrafficSolution f3 = free_group_mu(ColoredKernel::from_scalar(w3), b3.hitting);
  CHECK(std::abs(f3.mu[0](0, 0) - 1.0 / 3) <= 1e-10);
  CHECK(std::abs(b3.traffic.mu[0](0, 0) - 1.0 / 3) <= 1e-10);

  // non-free groups are rejected
  CHECK_THROWS_AS(free_group_mu(z3z3_kernel(), solve_boundary(z3z3_kernel()).hitting), ConfigError);
}

TEST_CASE("harmonic cylinder masses") {
  ColoredKernel k = srw_f2_kernel();
  BoundarySolution b = solve_boundary(k);
  // p_inf(ab) = q_a mu_b = (1/3)(1/4)
  CylinderQuery ab{0, k.group->word_from_names("a1 a2")};
  CHECK(harmonic_cylinder(ab, k, b.hitting, b.traffic) == doctest::Approx(1.0 / 12).epsilon(1e-9));
  // n = 1: mass of [g] is the row sum of mu_g
  CylinderQuery a{0, k.group->word_from_names("a1")};
  CHECK(harmonic_cylinder(a, k, b.hitting, b.traffic) == doctest::Approx(0.25).epsilon(1e-9));
  // total mass of length-n cylinders is 1
  for (int len = 1; len <= 4; ++len) {
    double total = 0.0;
    for (const Word& w : k.group->reduced_words(len)) total += harmonic_cylinder({0, w}, k, b.hitting, b.traffic);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("cylinder masses sum to 1 on colored kernels") {
  LinearizationResult lin = len2_linearized();
  BoundarySolution b = solve_boundary(lin.kernel);
  for (int u = 0; u < lin.kernel.r; ++u)
    for (int len = 1; len <= 3; ++len) {
      double total = 0.0;
      for (const Word& w : lin.kernel.group->reduced_words(len))
        total += harmonic_cylinder({u, w}, lin.kernel, b.hitting, b.traffic);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("stationarity of the solved harmonic measure") {
  ColoredKernel k = srw_f2_kernel();
  BoundarySolution b = solve_boundary(k);
  CHECK(stationarity_residual(k, b.hitting, b.traffic) <= 1e-10);

  ColoredKernel k2 = z3z3_kernel();
  BoundarySolution b2 = solve_boundary(k2);
  CHECK(stationarity_residual(k2, b2.hitting, b2.traffic) <= 1e-10);

  LinearizationResult lin = len2_linearized();
  BoundarySolution b3 = solve_boundary(lin.kernel);
  CHECK(stationarity_residual(lin.kernel, b3.hitting, b3.traffic) <= 1e-10);

  // perturbing one mu entry breaks stationarity measurably
  TrafficSolution bad = b.traffic;
  bad.mu[0](0, 0) += 0.01;
  double scale = 0.0;
  for (Gen g = 0; g < 4; ++g) scale += bad.mu[g](0, 0);
  for (Gen g = 0; g < 4; ++g) bad.mu[g] /= scale;
  for (Gen g = 0; g < 4; ++g) {
    bad.y[g] = bad.mu[g].rowwise().sum();
  }
  for (Gen g = 0; g < 4; ++g) {
    bad.delta[g].setZero();
    for (Gen h : k.group->next_set(g)) bad.delta[g] += bad.y[h];
  }
  CHECK(stationarity_residual(k, b.hitting, bad) > 1e-4);
}

TEST_CASE("z-relation on free-group instances") {
  // scalar SRW F2: z = 2/3 and the 2x2 block identity holds
  ColoredKernel k = srw_f2_kernel();
  BoundarySolution b = solve_boundary(k);
  ZConsistencyReport rep = z_consistency_check(k, b.hitting);
  REQUIRE(rep.applicable);
  CHECK(rep.max_identity_residual <= 1e-10);
  CHECK(rep.min_real_part_qp > 0);
  CHECK(rep.min_real_part_z > 0);

  // colored kernel with invertible p_g: random positive matrices
  auto g = f2();
  std::mt19937_64 rng = make_stream(31, 0);
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  ColoredKernel ck(g, 2);
  Matrix total = Matrix::Zero(2, 2);
  for (Gen l = 0; l < 4; ++l) {
    ck.p[l] = Matrix(2, 2);
    ck.p[l] << unif(rng), unif(rng) * 0.1, unif(rng) * 0.1, unif(rng);
    total += ck.p[l];
  }
  Vector rows = total.rowwise().sum();
  for (Gen l = 0; l < 4; ++l) ck.p[l] = rows.cwiseInverse().asDiagonal() * ck.p[l];
  REQUIRE(validate(ck).ok());
  BoundarySolution bc = solve_boundary(ck);
  ZConsistencyReport repc = z_consistency_check(ck, bc.hitting);
  REQUIRE(repc.applicable);
  CHECK(repc.max_identity_residual <= 1e-8);
  CHECK(repc.min_real_part_qp > 0);
  CHECK(repc.min_real_part_z > 0);

  // singular p_g: skipped with a notice
  LinearizationResult lin = len2_linearized();
  BoundarySolution bl = solve_boundary(lin.kernel);
  ZConsistencyReport repl = z_consistency_check(lin.kernel, bl.hitting);
  CHECK_FALSE(repl.applicable);
  CHECK_FALSE(repl.notice.empty());

  // non-free group: not applicable
  ZConsistencyReport repz = z_consistency_check(z3z3_kernel(), solve_boundary(z3z3_kernel()).hitting);
  CHECK_FALSE(repz.applicable);
}

TEST_CASE("lalley condition") {
  // scalar kernels with positive q: holds with k = 1
  ColoredKernel k = srw_f2_kernel();
  BoundarySolution b = solve_boundary(k);
  LalleyReport rep = lalley_condition_check(b.hitting, *k.group, 1, 1);
  CHECK(rep.holds);

  // linearized length-<=2 walk: holds for some small (k, m)
  LinearizationResult lin = len2_linearized();
  BoundarySolution bl = solve_boundary(lin.kernel);
  LalleyReport found = find_lalley_params(bl.hitting, *lin.kernel.group);
  CHECK(found.holds);
  CHECK(found.k <= 3);
  CHECK(found.m <= 4);

  // zeroing a q row breaks the condition
  HittingMatrices broken = bl.hitting;
  broken.q[0].row(0).setZero();
  LalleyReport neg = find_lalley_params(broken, *lin.kernel.group);
  CHECK_FALSE(neg.holds);
  CHECK_FALSE(neg.violation.empty());
}
