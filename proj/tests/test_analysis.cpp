#include <doctest.h>

#include <cmath>
#include <random>

#include "qwlift/analysis.hpp"
#include "qwlift/bridge.hpp"
#include "qwlift/error.hpp"
#include "support.hpp"

using namespace qwlift;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::shared_ptr<const Graph> shared(Graph g) { return std::make_shared<const Graph>(std::move(g)); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

// Worst-case TV by brute matrix powers, independent of the kernels.
std::size_t brute_mixing(const MatrixXd& P, const VectorXd& pi, double eps, std::size_t horizon) {
  const auto n = P.rows();
  std::vector<double> curve(horizon + 1, 0.0);
  for (Eigen::Index s = 0; s < n; ++s) {
    VectorXd x = VectorXd::Unit(n, s);
    for (std::size_t t = 0; t <= horizon; ++t) {
      curve[t] = std::max(curve[t], 0.5 * (x - pi).cwiseAbs().sum());
      x = P * x;
    }
  }
  std::size_t T = horizon + 1;
  while (T > 0 && curve[T - 1] <= eps) --T;
  return T;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("settled time") {
  CHECK(settled_time({0.9, 0.1, 0.3, 0.1, 0.0}, 0.2) == 3);
  CHECK(settled_time({0.1, 0.1}, 0.2) == 0);
  CHECK_FALSE(settled_time({0.1, 0.5}, 0.2).has_value());
}

TEST_CASE("mixing time examples") {
  const auto single = shared(generators::single_vertex());
  CHECK(mixing_time(TransitionMatrix(MatrixXd::Identity(1, 1), single, true), 0.25) == 0);

  const auto c5 = shared(generators::cycle(5));
  const auto lazy5 = lazy(simple_walk(c5));
  const std::size_t t = mixing_time(lazy5, 0.25);
  CHECK(t == brute_mixing(lazy5.entries(), VectorXd::Constant(5, 0.2), 0.25, 500));
  CHECK(mixing_time(lazy5, 0.25, 1000) == t);

  const auto c4 = shared(generators::cycle(4));
  CHECK(code_of([&] { mixing_time(simple_walk(c4), 0.25); }) == ErrorCode::NotErgodic);
  CHECK(code_of([&] { mixing_time(lazy5, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { mixing_time(lazy5, 1e-12, 3); }) == ErrorCode::NotMixedWithinHorizon);

  const auto report = mixing_report(lazy5, 0.25);
  CHECK(report.horizon == 500);
  CHECK(report.tv_curve.size() == 501);
}

TEST_CASE("mixing time properties") {
  std::mt19937_64 rng(3);
  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    const auto P = lazy(simple_walk(g));
    const VectorXd pi = support::solve_stationary(P.entries());
    std::size_t prev = 0;
    // 0.25 and 0.4 are hit exactly at t = 1 on K_4 and C_5, so they are avoided.
    for (double eps : {0.35, 0.2, 0.1, 0.01}) {
      const std::size_t t = mixing_time(P, eps);
      CHECK(t >= prev);
      CHECK(t == brute_mixing(P.entries(), pi, eps, 20 * g->size() * g->size()));
      prev = t;
    }
    const auto m = metropolis_chain(g, Distribution(support::random_positive(g->size(), rng)), 0.5);
    CHECK(mixing_time(m, 0.25) == mixing_time(m, 0.25, 2 * 20 * g->size() * g->size()));
  }
}

TEST_CASE("marginal mixing of d-lifts") {
  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    const auto u = Distribution::uniform(g->size());
    const auto lift = assemble_d_lift(g, u, metropolis_chain(g, u));
    const std::size_t D = diameter(*g);
    const auto report = marginal_mixing_report(lift, u, 0.25);
    CHECK(report.horizon == 4 * D);
    REQUIRE(report.mixing_time.has_value());
    CHECK(*report.mixing_time <= D);
    CHECK(marginal_mixing_time(lift, u, 1e-9) <= D);
    CHECK(marginal_mixing_time(lift, u, 1.0) == 0);
  }
}

TEST_CASE("conductance examples") {
  const auto k2 = shared(generators::complete(2));
  const auto r = conductance(simple_walk(k2));
  CHECK(r.phi == doctest::Approx(1.0));
  CHECK(r.argmin_subset.size() == 1);

  const auto c4 = conductance(lazy(simple_walk(shared(generators::cycle(4)))));
  const auto c8 = conductance(lazy(simple_walk(shared(generators::cycle(8)))));
  CHECK(c4.phi == doctest::Approx(0.25));
  CHECK(c8.phi == doctest::Approx(0.125));

  const auto single = shared(generators::single_vertex());
  const auto one = conductance(TransitionMatrix(MatrixXd::Identity(1, 1), single, true));
  CHECK(one.degenerate);

  CHECK(code_of([] { conductance(simple_walk(shared(generators::cycle(25)))); }) ==
        ErrorCode::TooLarge);
  CHECK(code_of([] { conductance(TransitionMatrix(MatrixXd::Identity(3, 3))); }) ==
        ErrorCode::NotErgodic);
}

TEST_CASE("conductance against brute force") {
  std::mt19937_64 rng(21);
  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    const std::size_t n = g->size();
    const auto P = metropolis_chain(g, Distribution(support::random_positive(n, rng)), 0.25);
    const VectorXd pi = support::solve_stationary(P.entries());
    const auto r = conductance(P);
    // stationary() stops at a 1e-12 residual, the oracle solves exactly
    CHECK(std::abs(r.phi - support::brute_conductance(P.entries(), pi)) <= 1e-10);
    double mass = 0.0;
    for (Vertex v : r.argmin_subset) mass += pi[static_cast<Eigen::Index>(v)];
    CHECK(mass <= 0.5 + 1e-12);

    // Relabel by a random permutation.
    std::vector<Eigen::Index> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<Eigen::Index>(i);
    std::shuffle(perm.begin(), perm.end(), rng);
    MatrixXd Q(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) Q(perm[i], perm[j]) = P.entries()(i, j);
    CHECK(std::abs(conductance(TransitionMatrix(Q)).phi - r.phi) <= 1e-12);
  }
}

TEST_CASE("sinclair sandwich") {
  const auto lazy5 = lazy(simple_walk(shared(generators::cycle(5))));
  const auto s = sinclair_check(lazy5, 0.25);
  CHECK(s.holds);
  CHECK(s.conductance.lower_bound <= static_cast<double>(s.mixing_time));
  CHECK(static_cast<double>(s.mixing_time) <= s.conductance.upper_bound);

  CHECK(sinclair_check(lazy(simple_walk(shared(generators::complete(4)))), 0.25).holds);
  const auto single = shared(generators::single_vertex());
  CHECK(sinclair_check(TransitionMatrix(MatrixXd::Identity(1, 1), single, true), 0.25).holds);

  const auto b = sinclair_bounds(0.25, 0.25, 0.2);
  CHECK(b.lower == doctest::Approx(std::log(4.0)));
  CHECK(b.upper == doctest::Approx(32.0 * std::log(20.0)));

  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    CAPTURE(name);
    CHECK(sinclair_check(lazy(simple_walk(g)), 0.25).holds);
  }
}

TEST_CASE("diaconis lift") {
  const auto d = diaconis_lift(5);
  CHECK(d.lifted_size() == 10);
  CHECK(d.layers == 0);
  const MatrixXd P(d.transition);
  CHECK(P(diaconis_state(1, 1, 5), diaconis_state(1, 0, 5)) == doctest::Approx(0.8));
  CHECK(P(diaconis_state(-1, 4, 5), diaconis_state(1, 0, 5)) == doctest::Approx(0.2));
  CHECK(P(diaconis_state(-1, 3, 5), diaconis_state(-1, 4, 5)) == doctest::Approx(0.8));
  CHECK(column_sum_residual(P) <= 1e-15);
  CHECK(code_of([] { diaconis_lift(2); }) == ErrorCode::InvalidArgument);

  const auto report = check_lift_consistency(d);
  CHECK(report.locality_violations == 0);
  CHECK(report.init_marginal_residual <= 1e-15);

  // Monte-Carlo simulation of the two-sign walk from vertex 0, random initial sign.
  std::mt19937_64 rng(2024);
  const std::size_t n = 5, t = 7, samples = 1'000'000;
  std::vector<double> hist(n, 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    int sign = support::uniform01(rng) < 0.5 ? 1 : -1;
    std::size_t k = 0;
    for (std::size_t step = 0; step < t; ++step) {
      if (support::uniform01(rng) < 1.0 / static_cast<double>(n)) sign = -sign;
      k = (k + n + static_cast<std::size_t>(sign + static_cast<int>(n))) % n;
    }
    hist[k] += 1.0 / static_cast<double>(samples);
  }
  VectorXd x = d.init_map(Distribution::point_mass(n, 0));
  for (std::size_t i = 0; i < t; ++i) x = P * x;
  const auto exact = marginalize(d, x);
  double tv = 0.0;
  for (std::size_t v = 0; v < n; ++v) tv += 0.5 * std::abs(hist[v] - exact[v]);
  CHECK(tv <= 5e-3);
}

TEST_CASE("epsilon amplification") {
  CHECK(epsilon_amplification_bound(10, 0.125) == 30);
  CHECK(epsilon_amplification_bound(7, 0.2) == 21);
  CHECK(code_of([] { epsilon_amplification_bound(10, 0.25); }) == ErrorCode::InvalidArgument);
  const auto lazy5 = lazy(simple_walk(shared(generators::cycle(5))));
  const std::size_t quarter = mixing_time(lazy5, 0.25);
  for (double eps : {0.2, 0.1, 0.01, 1e-4}) {
    CHECK(mixing_time(lazy5, eps) <= epsilon_amplification_bound(quarter, eps));
  }
}

TEST_CASE("comparison rows") {
  const auto c5 = support::load("c5");
  const auto walk = coined_walk(c5, fourier_coin(2));
  const auto row = compare_methods(c5, walk, QuantumState::basis(2, 5, 0, 0), 0.25, "c5");
  CHECK(row.n == 5);
  CHECK(row.diameter == 2);
  CHECK(row.lifted_states == 50);
  CHECK(row.d_lift_mixing <= 2);
  CHECK_FALSE(row.ms_pi_q.has_value());
  REQUIRE(row.quantum_mixing.has_value());
  CHECK(*row.quantum_mixing >= 1);

  const auto k4 = support::load("k4");
  const auto k4_row = compare_methods(k4, coined_walk(k4, fourier_coin(3)),
                                      QuantumState::basis(3, 4, 0, 0), 0.25, "k4", {10'000, true});
  CHECK(k4_row.d_lift_mixing <= 1);
  CHECK(k4_row.ms_lift.has_value());
  CHECK(k4_row.simple_walk_mixing.has_value());

  const auto c4 = shared(generators::cycle(4));
  const auto c4_row = compare_methods(c4, coined_walk(c4, fourier_coin(2)),
                                      QuantumState::basis(2, 4, 0, 0), 0.25, "c4");
  CHECK_FALSE(c4_row.simple_walk_mixing.has_value());
  CHECK_FALSE(c4_row.simple_walk_note.empty());
}

}
