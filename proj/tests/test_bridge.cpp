#include <doctest.h>

#include <random>

#include "qwlift/bridge.hpp"
#include "qwlift/error.hpp"
#include "qwlift/quantum_walk.hpp"
#include "support.hpp"

using namespace qwlift;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::shared_ptr<const Graph> shared(Graph g) { return std::make_shared<const Graph>(std::move(g)); }

Distribution pi_q_of(const std::shared_ptr<const Graph>& g, Vertex v = 0) {
  const std::size_t m = g->rotation_map()->front().size();
  return average_mixing_distribution(coined_walk(g, fourier_coin(m)),
                                     QuantumState::basis(m, g->size(), 0, v));
}

std::vector<Distribution> targets_for(const std::shared_ptr<const Graph>& g, std::mt19937_64& rng) {
  std::vector<Distribution> out{Distribution::uniform(g->size()), pi_q_of(g)};
  for (int i = 0; i < 3; ++i) out.emplace_back(support::random_positive(g->size(), rng));
  return out;
}

}  // namespace

TEST_SUITE("bridge") {

TEST_CASE("schedule distributions") {
  const auto k2 = shared(generators::complete(2));
  const auto s = schedule_distributions(*k2, 0, Distribution::uniform(2));
  REQUIRE(s.levels.size() == 2);
  CHECK(s.levels[0].values() == vec({1, 0}));
  CHECK(s.levels[1].values().isApprox(vec({0.5, 0.5})));

  const auto one = schedule_distributions(generators::single_vertex(), 0, Distribution::uniform(1));
  REQUIRE(one.levels.size() == 1);
  CHECK(one.levels[0][0] == 1.0);

  // Level-1 nodes below root 0 of C_5: hold(0) keeps {0}, 1 covers {1, 2}, 4 covers {4, 3}.
  const auto c5 = schedule_distributions(generators::cycle(5), 0, Distribution::uniform(5));
  REQUIRE(c5.levels.size() == 3);
  CHECK(c5.levels[0].values() == Distribution::point_mass(5, 0).values());
  CHECK((c5.levels[1].values() - vec({0.2, 0.4, 0, 0, 0.4})).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((c5.levels[2].values() - VectorXd::Constant(5, 0.2)).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(schedule_distributions(generators::cycle(5), 0, Distribution(vec({0.5, 0.5, 0, 0, 0}))),
                  Error);
  CHECK_THROWS_AS(schedule_distributions(Graph::build(2, {}), 0, Distribution::uniform(2)), Error);
}

TEST_CASE("schedule conservation and reachability") {
  std::mt19937_64 rng(17);
  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    for (const auto& target : targets_for(g, rng)) {
      for (Vertex r = 0; r < g->size(); ++r) {
        const auto s = schedule_distributions(*g, r, target);
        CHECK((s.levels.front().values() - Distribution::point_mass(g->size(), r).values()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((s.levels.back().values() - target.values()).cwiseAbs().maxCoeff() <= 1e-12);
        for (std::size_t t = 0; t < s.levels.size(); ++t) {
          CHECK(std::abs(s.levels[t].values().sum() - 1.0) <= 1e-12);
          if (t == 0) continue;
          for (Vertex k = 0; k < g->size(); ++k) {
            if (s.levels[t][k] == 0.0) continue;
            bool reached = s.levels[t - 1][k] > 0.0;
            for (Vertex j = 0; j < g->size(); ++j)
              reached = reached || (s.levels[t - 1][j] > 0.0 && g->has_arc(j, k));
            CHECK(reached);
          }
        }
      }
    }
  }
}

TEST_CASE("bridge step matrix") {
  const auto k2 = shared(generators::complete(2));
  const auto net = build_flow_network(Distribution(vec({1, 0})), Distribution::uniform(2), *k2);
  const auto P = bridge_step_matrix(net, max_flow(net.network), k2);
  CHECK(P.entries().isApprox((MatrixXd(2, 2) << 0.5, 0, 0.5, 1).finished()));

  const auto c5 = shared(generators::cycle(5));
  const Distribution e3 = Distribution::point_mass(5, 3);
  const auto hold_net = build_flow_network(e3, e3, *c5);
  const auto H = bridge_step_matrix(hold_net, max_flow(hold_net.network), c5);
  CHECK(H(3, 3) == 1.0);

  FlowResult half = max_flow(net.network);
  half.value = 0.5;
  try {
    bridge_step_matrix(net, half, k2);
    FAIL("expected InfeasibleSchedule");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleSchedule);
  }
}

TEST_CASE("bridges on small graphs") {
  const auto k2 = shared(generators::complete(2));
  const MatrixXd expect = (MatrixXd(2, 2) << 0.5, 0, 0.5, 1).finished();
  for (auto kind : {BridgeKind::MaxFlow, BridgeKind::TreeRoute}) {
    const auto b = make_bridge(kind, k2, 0, Distribution::uniform(2));
    REQUIRE(b.matrices.size() == 1);
    CHECK(b.matrices[0].entries().isApprox(expect));
    const auto one = make_bridge(kind, shared(generators::single_vertex()), 0, Distribution::uniform(1));
    CHECK(one.matrices.empty());
    CHECK(bridge_product_error(one, Distribution::uniform(1)) == 0.0);
  }
  const auto c5 = shared(generators::cycle(5));
  CHECK(bridge_product_error(tree_route_bridge(c5, 0, Distribution::uniform(5)),
                             Distribution::uniform(5)) <= 1e-12);
  const auto pq = pi_q_of(c5);
  CHECK(bridge_product_error(stochastic_bridge(c5, 0, pq), pq) <= 1e-10);
}

TEST_CASE("bridge product identity on fixtures") {
  std::mt19937_64 rng(99);
  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    for (const auto& target : targets_for(g, rng)) {
      for (Vertex r = 0; r < g->size(); ++r) {
        for (auto kind : {BridgeKind::MaxFlow, BridgeKind::TreeRoute}) {
          const auto b = make_bridge(kind, g, r, target);
          CHECK(b.matrices.size() == diameter(*g));
          CHECK(bridge_product_error(b, target) <= 1e-10);
          for (const auto& P : b.matrices) {
            for (Vertex j = 0; j < g->size(); ++j)
              for (Vertex i = 0; i < g->size(); ++i)
                if (P(i, j) > 0.0) CHECK((i == j || g->has_arc(j, i)));
          }
        }
      }
    }
  }
}

TEST_CASE("closing matrix") {
  std::mt19937_64 rng(5);
  for (const auto& name : support::fixture_names()) {
    const auto g = support::load(name);
    for (const auto& target : targets_for(g, rng)) {
      for (Vertex r = 0; r < g->size(); ++r) {
        const auto s = schedule_distributions(*g, r, target);
        for (auto kind : {BridgeKind::MaxFlow, BridgeKind::TreeRoute}) {
          const auto b = make_bridge(kind, g, r, target);
          const auto c = closing_matrix(*g, s, b.matrices.back(), target, kind);
          const VectorXd& pi = target.values();
          CHECK((c.K * s.levels[s.D - 1].values() - pi).cwiseAbs().maxCoeff() <= 1e-12);
          CHECK((c.K * pi - pi).cwiseAbs().maxCoeff() <= 1e-12);
          CHECK(c.K.minCoeff() >= 0.0);
          CHECK((c.K.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
          for (Vertex j = 0; j < g->size(); ++j)
            for (Vertex i = 0; i < g->size(); ++i)
              if (c.K(i, j) > 0.0) CHECK((i == j || g->has_arc(j, i)));
        }
      }
    }
  }
}

TEST_CASE("assemble d-lift") {
  const auto k2 = shared(generators::complete(2));
  const auto u2 = Distribution::uniform(2);
  const auto k2_lift = assemble_d_lift(k2, u2, simple_walk(k2));
  CHECK(k2_lift.lifted_size() == 4);
  const auto rep = verify_diameter_mixing(k2_lift, u2, 4);
  CHECK(rep.tv_curve[1] <= 1e-12);
  CHECK(rep.tv_curve[0] == doctest::Approx(0.5));

  const auto c5 = shared(generators::cycle(5));
  const auto pq = pi_q_of(c5);
  const auto lift = assemble_d_lift(c5, pq, metropolis_chain(c5, pq));
  CHECK(lift.lifted_size() == 50);
  const auto c5_rep = verify_diameter_mixing(lift, pq, 8);
  CHECK(c5_rep.tv_at_diameter <= 1e-9);
  CHECK(c5_rep.tv_curve[1] > 0.05);
  CHECK(c5_rep.passed);
  double t0 = 0.0;
  for (Vertex v = 0; v < 5; ++v) t0 = std::max(t0, tv_distance(Distribution::point_mass(5, v), pq));
  CHECK(c5_rep.tv_curve[0] == t0);

  try {
    assemble_d_lift(c5, Distribution(vec({0.3, 0.1, 0.2, 0.2, 0.2})), simple_walk(c5));
    FAIL("expected StationarityMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StationarityMismatch);
  }
  CHECK_THROWS_AS(verify_diameter_mixing(lift, pq, 1), Error);

  const auto single = shared(generators::single_vertex());
  const auto one = assemble_d_lift(single, Distribution::uniform(1),
                                   TransitionMatrix(MatrixXd::Identity(1, 1), single, true));
  CHECK(one.lifted_size() == 1);
  CHECK(verify_diameter_mixing(one, Distribution::uniform(1), 3).passed);
}

TEST_CASE("d-lift structure on fixtures") {
  for (const auto& name : support::fixture_names()) {
    CAPTURE(name);
    const auto g = support::load(name);
    const std::size_t n = g->size();
    const auto pq = pi_q_of(g);
    const auto coarse = metropolis_chain(g, pq);
    const auto lift = assemble_d_lift(g, pq, coarse, BridgeKind::MaxFlow, Execution::Parallel);
    const auto serial = assemble_d_lift(g, pq, coarse, BridgeKind::MaxFlow, Execution::Serial);
    CHECK(lift.lifted_size() == n * n * diameter(*g));
    CHECK(d_lift_locality_violations(lift) == 0);
    CHECK(MatrixXd(lift.transition - serial.transition).cwiseAbs().maxCoeff() == 0.0);
    const auto report = check_lift_consistency(lift);
    CHECK(report.stochasticity_residual <= 1e-12);
    CHECK(report.min_entry >= 0.0);
    CHECK(report.locality_violations == 0);
    CHECK(report.init_marginal_residual == 0.0);
    for (auto kind : {BridgeKind::MaxFlow, BridgeKind::TreeRoute}) {
      const auto chain = assemble_d_lift(g, pq, coarse, kind);
      const auto rep = verify_diameter_mixing(chain, pq, 4 * diameter(*g));
      CHECK(rep.passed);
    }
  }
}

}
