#include <random>

#include "doctest.h"
#include "plainwalk/kernel.hpp"
#include "plainwalk/util.hpp"

using namespace plainwalk;

namespace {

std::shared_ptr<PlainGroup> f2() { return std::make_shared<PlainGroup>(2); }

ScalarWalkSpec srw_f2() {
  ScalarWalkSpec w;
  w.group = f2();
  for (Gen g = 0; g < 4; ++g) {
    w.support.push_back(Word(1, static_cast<char>(g)));
    w.probs.push_back(0.25);
  }
  return w;
}

}  // namespace

TEST_CASE("scalar walk checks") {
  ScalarWalkSpec w = srw_f2();
  CHECK_NOTHROW(w.check());
  CHECK(w.is_symmetric());
  CHECK(w.is_nearest_neighbor());
  CHECK(w.identity_mass() == 0.0);
  CHECK(w.mean_length() == doctest::Approx(1.0));

  w.probs[0] = 0.5;
  CHECK_THROWS_AS(w.check(), ConfigError);
}

TEST_CASE("r=1 embedding of SRW is valid") {
  ColoredKernel k = ColoredKernel::from_scalar(srw_f2());
  CHECK(k.r == 1);
  ValidationReport rep = validate(k);
  CHECK(rep.ok());
  CHECK(rep.stochastic_residual <= 1e-15);
  CHECK(check_reversible(k).reversible);
}

TEST_CASE("validation flags broken kernels") {
  auto G = f2();
  // zero row sum
  ColoredKernel k(G, 2);
  k.p[0] = Matrix::Constant(2, 2, 0.25);
  ValidationReport rep = validate(k);
  CHECK(rep.stochastic_residual > 0.4);
  CHECK_FALSE(rep.ok());

  // support only {a, a^-1} generates a proper subgroup
  ColoredKernel k2(G, 1);
  k2.p[0](0, 0) = 0.5;
  k2.p[1](0, 0) = 0.5;
  ValidationReport rep2 = validate(k2);
  CHECK(rep2.stochastic_residual <= 1e-15);
  CHECK_FALSE(rep2.support_generates);
}

TEST_CASE("stationary distribution") {
  CHECK(stationary_pi(Matrix::Ones(1, 1))(0) == doctest::Approx(1.0));

  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  Vector pi = stationary_pi(swap);
  CHECK(pi(0) == doctest::Approx(0.5));
  CHECK(pi(1) == doctest::Approx(0.5));

  // random irreducible 3x3 vs power-iteration oracle
  std::mt19937_64 rng = make_stream(7, 0);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix P(3, 3);
    for (int u = 0; u < 3; ++u) {
      double s = 0;
      for (int v = 0; v < 3; ++v) {
        P(u, v) = unif(rng);
        s += P(u, v);
      }
      P.row(u) /= s;
    }
    Vector pi3 = stationary_pi(P);
    CHECK((pi3.transpose() * P - pi3.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    // oracle: long power iteration from a different start
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(3);
    x(0) = 1.0;
    for (int it = 0; it < 20000; ++it) x = x * P;
    CHECK((x.transpose() - pi3).cwiseAbs().maxCoeff() <= 1e-10);
  }

  Matrix reducible = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(stationary_pi(reducible), NumericalError);
}

TEST_CASE("reversibility check") {
  // symmetric scalar walk is reversible
  CHECK(check_reversible(ColoredKernel::from_scalar(srw_f2())).reversible);
  // an asymmetric one is not
  ScalarWalkSpec w = srw_f2();
  w.probs = {0.4, 0.1, 0.3, 0.2};
  ReversibilityReport rep = check_reversible(ColoredKernel::from_scalar(w));
  CHECK_FALSE(rep.reversible);
  CHECK(rep.max_violation > 0.01);
}

TEST_CASE("step marginals match the kernel row") {
  auto G = f2();
  ColoredKernel k(G, 2);
  // hand-built quasi-irreducible kernel with two colors
  k.p[0] << 0.30, 0.10, 0.05, 0.10;
  k.p[1] << 0.10, 0.05, 0.10, 0.05;
  k.p[2] << 0.20, 0.05, 0.30, 0.10;
  k.p[3] << 0.10, 0.10, 0.20, 0.10;
  REQUIRE(validate(k).ok());

  KernelSampler sampler(k);
  const long n = 1000000;
  std::mt19937_64 rng = make_stream(99, 0);
  Matrix counts = Matrix::Zero(4, 2);
  for (long i = 0; i < n; ++i) {
    WalkState s;
    s.color = 0;
    sampler.step(s, rng);
    REQUIRE(s.position.size() == 1);
    counts(static_cast<Gen>(s.position[0]), s.color) += 1.0;
  }
  for (Gen g = 0; g < 4; ++g)
    for (int v = 0; v < 2; ++v) {
      double p = k.p[g](0, v);
      double sigma = std::sqrt(p * (1 - p) / n);
      CHECK(std::abs(counts(g, v) / n - p) <= 4.5 * sigma);
    }
}

TEST_CASE("deterministic kernel row moves deterministically") {
  auto G = f2();
  ColoredKernel k(G, 2);
  k.p[0](0, 1) = 1.0;  // from color 0 always multiply by a and go to color 1
  k.p[1](1, 0) = 1.0;
  REQUIRE(validate(k).stochastic_residual <= 1e-15);
  KernelSampler sampler(k);
  std::mt19937_64 rng = make_stream(1, 2);
  WalkState s;
  sampler.step(s, rng);
  CHECK(s.color == 1);
  CHECK(s.position == Word(1, char(0)));
  sampler.step(s, rng);
  CHECK(s.color == 0);
  CHECK(s.position.empty());
}

TEST_CASE("color marginal of repeated stepping matches P") {
  auto G = f2();
  ColoredKernel k(G, 2);
  k.p[0] << 0.30, 0.10, 0.05, 0.10;
  k.p[1] << 0.10, 0.05, 0.10, 0.05;
  k.p[2] << 0.20, 0.05, 0.30, 0.10;
  k.p[3] << 0.10, 0.10, 0.20, 0.10;
  Matrix P = k.color_matrix();
  KernelSampler sampler(k);
  std::mt19937_64 rng = make_stream(5, 0);
  const long n = 400000;
  Matrix trans = Matrix::Zero(2, 2);
  Vector visits = Vector::Zero(2);
  WalkState s;
  for (long i = 0; i < n; ++i) {
    int from = s.color;
    sampler.step(s, rng);
    trans(from, s.color) += 1.0;
    visits(from) += 1.0;
  }
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) {
      double hat = trans(u, v) / visits(u);
      double sigma = std::sqrt(P(u, v) * (1 - P(u, v)) / visits(u));
      CHECK(std::abs(hat - P(u, v)) <= 4.5 * sigma);
    }
}
