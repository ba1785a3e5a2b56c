#include <doctest.h>

#include <random>

#include "qwlift/analysis.hpp"
#include "qwlift/bridge.hpp"
#include "qwlift/error.hpp"
#include "qwlift/markov.hpp"
#include "support.hpp"

using namespace qwlift;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("markov") {

TEST_CASE("distribution validation") {
  const Distribution p(vec({0.5, 0.5 + 5e-11, -5e-13}));
  CHECK(p[2] == 0.0);
  CHECK(code_of([] { Distribution(vec({1.1, -0.1})); }) == ErrorCode::NegativeProbability);
  CHECK(code_of([] { Distribution(vec({0.5, 0.6})); }) == ErrorCode::NotStochastic);
}

TEST_CASE("tv distance") {
  const Distribution p(vec({0.5, 0.5}));
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(Distribution(vec({1, 0})), Distribution(vec({0, 1}))) == doctest::Approx(1.0));
  CHECK(tv_distance(p, Distribution(vec({0.75, 0.25}))) == doctest::Approx(0.25));
  CHECK(code_of([&] { tv_distance(p, Distribution::uniform(3)); }) == ErrorCode::LengthMismatch);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const Distribution a(support::random_positive(n, rng));
    const Distribution b(support::random_positive(n, rng));
    const Distribution c(support::random_positive(n, rng));
    CHECK(tv_distance(a, b) == doctest::Approx(tv_distance(b, a)).epsilon(1e-15));
    CHECK(tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12);
    CHECK(tv_distance(a, a) <= 1e-12);
    CHECK(tv_distance(a, b) >= 0.0);
    CHECK(tv_distance(a, b) <= 1.0);
  }
}

TEST_CASE("simple walk and evolve") {
  auto c5 = std::make_shared<const Graph>(generators::cycle(5));
  const TransitionMatrix P = simple_walk(c5);
  for (Vertex j = 0; j < 5; ++j) {
    CHECK(P((j + 1) % 5, j) == 0.5);
    CHECK(P((j + 4) % 5, j) == 0.5);
  }
  const Distribution p0 = Distribution::point_mass(5, 0);
  CHECK(evolve(P, p0, 0).values() == p0.values());
  CHECK(evolve(P, p0, 1).values().isApprox(vec({0, 0.5, 0, 0, 0.5})));

  const TransitionMatrix I(Eigen::MatrixXd::Identity(3, 3));
  const Distribution q(vec({0.2, 0.3, 0.5}));
  CHECK(evolve(I, q, 17).values() == q.values());
  CHECK(code_of([&] { evolve(P, q, 1); }) == ErrorCode::DimMismatch);

  auto k2 = std::make_shared<const Graph>(generators::complete(2));
  CHECK(simple_walk(k2).entries().isApprox((Eigen::MatrixXd(2, 2) << 0, 1, 1, 0).finished()));
  auto k4 = std::make_shared<const Graph>(generators::complete(4));
  const auto K = simple_walk(k4);
  for (Vertex i = 0; i < 4; ++i)
    for (Vertex j = 0; j < 4; ++j) CHECK(K(i, j) == doctest::Approx(i == j ? 0.0 : 1.0 / 3));

  auto sink = std::make_shared<const Graph>(Graph::build(2, {{0, 1}}));
  CHECK(code_of([&] { simple_walk(sink); }) == ErrorCode::SinkVertex);
}

TEST_CASE("transition matrix locality") {
  auto g = std::make_shared<const Graph>(generators::path(3));
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3, 3);
  M(2, 0) = 1.0;
  M(0, 1) = 1.0;
  M(1, 2) = 1.0;
  CHECK(code_of([&] { TransitionMatrix(M, g); }) == ErrorCode::LocalityViolation);
  CHECK(code_of([&] { TransitionMatrix(Eigen::MatrixXd::Identity(3, 3), g); }) ==
        ErrorCode::LocalityViolation);
  CHECK_NOTHROW(TransitionMatrix(Eigen::MatrixXd::Identity(3, 3), g, true));
}

TEST_CASE("stationary distribution") {
  CHECK(stationary(TransitionMatrix(Eigen::MatrixXd::Identity(1, 1))).values()[0] == 1.0);
  auto c5 = std::make_shared<const Graph>(generators::cycle(5));
  CHECK(stationary(simple_walk(c5)).values().isApprox(VectorXd::Constant(5, 0.2), 1e-12));

  auto p3 = std::make_shared<const Graph>(generators::path(3));
  const TransitionMatrix P = simple_walk(p3);
  const VectorXd oracle = support::solve_stationary(P.entries());
  CHECK(oracle.isApprox(vec({0.25, 0.5, 0.25}), 1e-12));
  CHECK((stationary(P).values() - oracle).cwiseAbs().maxCoeff() <= 1e-11);

  CHECK(code_of([&] { stationary(TransitionMatrix(Eigen::MatrixXd::Identity(2, 2))); }) ==
        ErrorCode::NotErgodic);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    Eigen::MatrixXd M(n, n);
    for (auto& x : M.reshaped()) x = 0.01 + support::uniform01(rng);
    for (Eigen::Index j = 0; j < M.cols(); ++j) M.col(j) /= M.col(j).sum();
    const TransitionMatrix R(M);
    CHECK((stationary(R).values() - support::solve_stationary(M)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("metropolis chain") {
  auto c5 = std::make_shared<const Graph>(generators::cycle(5));
  CHECK(metropolis_chain(c5, Distribution::uniform(5)).entries().isApprox(simple_walk(c5).entries()));

  auto k2 = std::make_shared<const Graph>(generators::complete(2));
  const Distribution t(vec({2.0 / 3, 1.0 / 3}));
  const auto M = metropolis_chain(k2, t);
  // Accept 0 -> 1 with min(1, (1/3)/(2/3)) = 1/2; 1 -> 0 always.
  CHECK(M(1, 0) == doctest::Approx(0.5));
  CHECK(M(0, 1) == doctest::Approx(1.0));
  CHECK((M.entries() * t.values() - t.values()).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK(code_of([&] { metropolis_chain(k2, Distribution(vec({1.0, 0.0}))); }) ==
        ErrorCode::ZeroTargetEntry);
  auto split = std::make_shared<const Graph>(Graph::build(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}}));
  CHECK(code_of([&] { metropolis_chain(split, Distribution::uniform(4)); }) ==
        ErrorCode::Disconnected);

  std::mt19937_64 rng(5);
  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    for (int trial = 0; trial < 5; ++trial) {
      const Distribution target(support::random_positive(g->size(), rng));
      const double lam = trial * 0.2;
      const auto P = metropolis_chain(g, target, lam);
      CHECK((P.entries() * target.values() - target.values()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(P.allow_diag());
    }
  }
}

TEST_CASE("tv to stationarity is non-increasing") {
  std::mt19937_64 rng(9);
  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    const auto P = lazy(simple_walk(g));
    const Distribution pi = stationary(P);
    for (Vertex v = 0; v < g->size(); ++v) {
      Distribution p = Distribution::point_mass(g->size(), v);
      double last = tv_distance(p, pi);
      for (int t = 0; t < 40; ++t) {
        p = P.apply(p);
        const double now = tv_distance(p, pi);
        CHECK(now <= last + 1e-10);
        last = now;
      }
    }
  }
}

TEST_CASE("marginalize and lift consistency") {
  auto c5 = std::make_shared<const Graph>(generators::cycle(5));
  const Distribution u = Distribution::uniform(5);
  const LiftedChain lift = assemble_d_lift(c5, u, simple_walk(c5));
  VectorXd point = VectorXd::Zero(static_cast<Eigen::Index>(lift.lifted_size()));
  point[static_cast<Eigen::Index>(lifted_index({0, 2, 3}, 5, 2))] = 1.0;
  CHECK(marginalize(lift, point).values() == Distribution::point_mass(5, 3).values());
  const VectorXd flat = VectorXd::Constant(static_cast<Eigen::Index>(lift.lifted_size()), 1.0 / 50);
  CHECK(marginalize(lift, flat).values().isApprox(u.values()));
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Distribution p0(support::random_positive(5, rng));
    CHECK((marginalize(lift, lift.init_map(p0)).values() - p0.values()).cwiseAbs().maxCoeff() <= 1e-15);
  }
  CHECK(code_of([&] { marginalize(lift, VectorXd::Zero(7)); }) == ErrorCode::DimMismatch);

  const auto diaconis = check_lift_consistency(diaconis_lift(5));
  CHECK(diaconis.stochasticity_residual <= 1e-12);
  CHECK(diaconis.locality_violations == 0);
  REQUIRE(diaconis.commuting_residual.has_value());
  CHECK(*diaconis.commuting_residual > 0.1);

  auto k2 = std::make_shared<const Graph>(generators::complete(2));
  const auto k2_lift = assemble_d_lift(k2, Distribution::uniform(2), simple_walk(k2));
  CHECK(check_lift_consistency(k2_lift).init_marginal_residual == 0.0);
}

}
