#include <doctest.h>

#include <random>

#include "qwlift/bridge.hpp"
#include "qwlift/kernels.hpp"
#include "qwlift/quantum_walk.hpp"
#include "support.hpp"

using namespace qwlift;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_SUITE("kernels") {

TEST_CASE("tv curve serial and omp agree bitwise") {
  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    const auto P = lazy(simple_walk(g));
    const auto n = static_cast<Eigen::Index>(g->size());
    const MatrixXd starts = MatrixXd::Identity(n, n);
    const VectorXd target = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    const auto a = kernels::serial::tv_curve(P.entries(), starts, target, 60);
    const auto b = kernels::omp::tv_curve(P.entries(), starts, target, 60);
    CHECK(a == b);
    CHECK(a == kernels::tv_curve(P.entries(), starts, target, 60));
    CHECK(a[0] == doctest::Approx(1.0 - 1.0 / static_cast<double>(n)));
  }
}

TEST_CASE("marginal tv curve serial and omp agree bitwise") {
  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    const auto u = Distribution::uniform(g->size());
    const auto lift = assemble_d_lift(g, u, metropolis_chain(g, u));
    const auto a = kernels::serial::marginal_tv_curve(lift.transition, lift.init, lift.coarse_of,
                                                      u.values(), 12);
    const auto b = kernels::omp::marginal_tv_curve(lift.transition, lift.init, lift.coarse_of,
                                                   u.values(), 12);
    CHECK(a == b);
  }
}

TEST_CASE("cesaro average serial and omp agree bitwise") {
  const auto g = support::load("petersen");
  const auto w = coined_walk(g, fourier_coin(3));
  const auto dim = static_cast<Eigen::Index>(w.dimension());
  const Eigen::MatrixXcd states = Eigen::MatrixXcd::Identity(dim, dim).leftCols(7);
  const MatrixXd a = kernels::serial::cesaro_average(w.matrix(), states, 10, 200);
  const MatrixXd b = kernels::omp::cesaro_average(w.matrix(), states, 10, 200);
  CHECK((a.array() == b.array()).all());
  CHECK((a.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("kernel matches direct powers") {
  std::mt19937_64 rng(8);
  const auto g = support::load("cube");
  const auto P = metropolis_chain(g, Distribution(support::random_positive(8, rng)), 0.3);
  const VectorXd pi = support::solve_stationary(P.entries());
  const auto curve = kernels::tv_curve(P.entries(), MatrixXd::Identity(8, 8), pi, 20);
  for (std::size_t t : {0u, 1u, 5u, 20u}) {
    double worst = 0.0;
    for (Eigen::Index s = 0; s < 8; ++s)
      worst = std::max(worst, 0.5 * (support::mat_power_apply(P.entries(), VectorXd::Unit(8, s), t) - pi)
                                        .cwiseAbs()
                                        .sum());
    CHECK(std::abs(curve[t] - worst) <= 1e-13);
  }
}

}
