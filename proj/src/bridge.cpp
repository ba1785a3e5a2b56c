#include "qwlift/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qwlift/error.hpp"
#include "qwlift/kernels.hpp"

namespace qwlift {

namespace {

using Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void require_positive(const Distribution& target, std::size_t n) {
  require(target.size() == n, ErrorCode::DimMismatch,
          "target of length " + std::to_string(target.size()) + " for " + std::to_string(n) +
              " vertices");
  for (std::size_t v = 0; v < n; ++v) {
    if (!(target[v] > 0.0)) {
      fail(ErrorCode::ZeroTargetEntry, "target vanishes at vertex " + std::to_string(v));
    }
  }
}

// Columns with no incoming schedule mass are holds.
Eigen::MatrixXd normalise_columns(Eigen::MatrixXd flow) {
  for (Index j = 0; j < flow.cols(); ++j) {
    const double out = flow.col(j).sum();
    if (out > 0.0) {
      flow.col(j) /= out;
    } else {
      flow.col(j).setZero();
      flow(j, j) = 1.0;
    }
  }
  return flow;
}

// Mass moved from label j at depth t to each child label, tree-routed.
Eigen::MatrixXd tree_route_flow(const BridgeSchedule& s, std::size_t t, std::size_t n) {
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(idx(n), idx(n));
  for (std::size_t node : s.tree.level(t)) {
    const Vertex j = s.tree.nodes[node].label;
    for (std::size_t c : s.tree.children[node]) {
      F(idx(s.tree.nodes[c].label), idx(j)) += s.node_mass[c];
    }
  }
  return F;
}

}  // namespace

BridgeSchedule schedule_distributions(const Graph& g, Vertex root, const Distribution& target) {
  const std::size_t n = g.size();
  require(root < n, ErrorCode::OutOfRange, "root " + std::to_string(root));
  require_positive(target, n);
  BridgeSchedule s;
  s.root = root;
  s.D = diameter(g);
  s.tree = padded_schedule_tree(bfs_tree(g, root), s.D);

  const auto& nodes = s.tree.nodes;
  s.node_mass.assign(nodes.size(), 0.0);
  for (std::size_t i = nodes.size(); i-- > 0;) {
    if (nodes[i].is_leaf) {
      s.node_mass[i] = target[nodes[i].label];
    } else {
      for (std::size_t c : s.tree.children[i]) s.node_mass[i] += s.node_mass[c];
    }
  }
  for (std::size_t t = 0; t <= s.D; ++t) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(idx(n));
    for (std::size_t node : s.tree.level(t)) p[idx(nodes[node].label)] += s.node_mass[node];
    s.levels.emplace_back(std::move(p));
  }
  return s;
}

TransitionMatrix bridge_step_matrix(const TransportNetwork& net, const FlowResult& flows,
                                    const std::shared_ptr<const Graph>& g) {
  if (flows.value < 1.0 - kSumTolerance) {
    fail(ErrorCode::InfeasibleSchedule,
         "transport reaches only " + std::to_string(flows.value) + " of the unit mass");
  }
  const std::size_t n = net.n;
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(idx(n), idx(n));
  for (const auto& arc : net.middle) F(idx(arc.to), idx(arc.from)) += flows.flow[arc.arc];
  return TransitionMatrix(normalise_columns(std::move(F)), g, true);
}

Eigen::VectorXd StochasticBridge::apply(const Eigen::VectorXd& p) const {
  Eigen::VectorXd x = p;
  for (const auto& P : matrices) x = P.entries() * x;
  return x;
}

double bridge_product_error(const StochasticBridge& bridge, const Distribution& target) {
  const Eigen::VectorXd start = Distribution::point_mass(target.size(), bridge.root).values();
  return tv_distance(bridge.apply(start), target.values());
}

StochasticBridge stochastic_bridge(const std::shared_ptr<const Graph>& g, Vertex root,
                                   const Distribution& target) {
  require(g != nullptr, ErrorCode::InvalidArgument, "null graph");
  const BridgeSchedule s = schedule_distributions(*g, root, target);
  StochasticBridge out;
  out.root = root;
  for (std::size_t t = 0; t < s.D; ++t) {
    const TransportNetwork net = build_flow_network(s.levels[t], s.levels[t + 1], *g);
    out.matrices.push_back(bridge_step_matrix(net, max_flow(net.network), g));
  }
  return out;
}

StochasticBridge tree_route_bridge(const std::shared_ptr<const Graph>& g, Vertex root,
                                   const Distribution& target) {
  require(g != nullptr, ErrorCode::InvalidArgument, "null graph");
  const BridgeSchedule s = schedule_distributions(*g, root, target);
  StochasticBridge out;
  out.root = root;
  for (std::size_t t = 0; t < s.D; ++t) {
    out.matrices.emplace_back(normalise_columns(tree_route_flow(s, t, g->size())), g, true);
  }
  return out;
}

StochasticBridge make_bridge(BridgeKind kind, const std::shared_ptr<const Graph>& g, Vertex root,
                             const Distribution& target) {
  return kind == BridgeKind::MaxFlow ? stochastic_bridge(g, root, target)
                                     : tree_route_bridge(g, root, target);
}

namespace {

// Tree-shaped closing: a vertex with mass keeps π_j and hands π_k to each
// depth-D child k; child k splits π_k back between its parent and itself.
Eigen::MatrixXd tree_closing(const BridgeSchedule& s, const Distribution& target, std::size_t n) {
  const std::size_t D = s.D;
  const Eigen::VectorXd& p = s.levels[D - 1].values();
  Eigen::MatrixXd K = normalise_columns(tree_route_flow(s, D - 1, n));
  for (std::size_t node : s.tree.level(D)) {
    const auto& leaf = s.tree.nodes[node];
    if (leaf.is_hold) continue;
    const Vertex k = leaf.label;
    const Vertex par = s.tree.nodes[leaf.parent].label;
    const double p_par = p[idx(par)];
    const double parked = target[par];
    K.col(idx(k)).setZero();
    K(idx(par), idx(k)) = parked / p_par;
    K(idx(k), idx(k)) = (p_par - parked) / p_par;
  }
  return K;
}

double closing_residual(const Eigen::MatrixXd& K, const Eigen::VectorXd& p,
                        const Eigen::VectorXd& pi) {
  return std::max((K * p - pi).cwiseAbs().maxCoeff(), (K * pi - pi).cwiseAbs().maxCoeff());
}

}  // namespace

ClosingMatrix closing_matrix(const Graph& g, const BridgeSchedule& schedule,
                             const TransitionMatrix& last_step, const Distribution& target,
                             BridgeKind kind) {
  const std::size_t n = g.size();
  require(schedule.D >= 1, ErrorCode::InvalidArgument, "closing needs D >= 1");
  const Eigen::VectorXd& p = schedule.levels[schedule.D - 1].values();
  const Eigen::VectorXd& pi = target.values();
  ClosingMatrix out;
  if (kind == BridgeKind::TreeRoute) {
    out.K = tree_closing(schedule, target, n);
    return out;
  }

  out.K = last_step.entries();
  std::vector<Vertex> empty;
  for (Vertex v = 0; v < n; ++v) {
    if (p[idx(v)] == 0.0) empty.push_back(v);
  }
  if (!empty.empty()) {
    Eigen::VectorXd carried = Eigen::VectorXd::Zero(idx(n));
    for (Vertex j = 0; j < n; ++j) {
      if (p[idx(j)] > 0.0) carried += pi[idx(j)] * out.K.col(idx(j));
    }
    FlowNetwork net(2 * n + 2, 2 * n, 2 * n + 1);
    double supply = 0.0;
    for (Vertex k : empty) {
      net.add_arc(2 * n, k, pi[idx(k)]);
      supply += pi[idx(k)];
    }
    for (Vertex i = 0; i < n; ++i) net.add_arc(n + i, 2 * n + 1, std::max(0.0, pi[idx(i)] - carried[idx(i)]));
    struct Route {
      Vertex from, to;
      std::size_t arc;
    };
    std::vector<Route> routes;
    for (Vertex k : empty) {
      routes.push_back({k, k, net.add_arc(k, n + k, 1.0)});
      for (Vertex i : g.out_neighbors(k)) {
        if (i != k) routes.push_back({k, i, net.add_arc(k, n + i, 1.0)});
      }
    }
    const FlowResult flow = max_flow(net);
    for (Vertex k : empty) out.K.col(idx(k)).setZero();
    for (const auto& r : routes) out.K(idx(r.to), idx(r.from)) += flow.flow[r.arc];
    for (Vertex k : empty) {
      const double total = out.K.col(idx(k)).sum();
      if (total > 0.0) out.K.col(idx(k)) /= total;
    }
    if (flow.value < supply - kSumTolerance) out.fallback = true;
  }
  if (out.fallback || closing_residual(out.K, p, pi) > kSumTolerance) {
    out.K = tree_closing(schedule, target, n);
    out.fallback = true;
  }
  return out;
}

LiftedChain assemble_d_lift(const std::shared_ptr<const Graph>& g, const Distribution& target,
                            const TransitionMatrix& coarse, BridgeKind kind, Execution policy) {
  require(g != nullptr, ErrorCode::InvalidArgument, "null graph");
  const std::size_t n = g->size();
  require_positive(target, n);
  require(coarse.size() == n, ErrorCode::DimMismatch,
          "coarse chain has " + std::to_string(coarse.size()) + " states");
  for (Vertex j = 0; j < n; ++j) {
    for (Vertex i = 0; i < n; ++i) {
      if (i != j && coarse(i, j) > 0.0 && !g->has_arc(j, i)) {
        fail(ErrorCode::LocalityViolation, "coarse chain moves " + std::to_string(j) + " -> " +
                                               std::to_string(i) + " without an arc");
      }
    }
  }
  const double drift =
      (coarse.entries() * target.values() - target.values()).cwiseAbs().maxCoeff();
  if (drift > kStationarityTolerance) {
    fail(ErrorCode::StationarityMismatch,
         "coarse chain moves the target by " + std::to_string(drift));
  }

  const std::size_t D = diameter(*g);
  const std::size_t L = std::max<std::size_t>(D, 1);
  std::vector<std::vector<Eigen::Triplet<double>>> entries(n);
  for_each_index(
      n,
      [&](std::size_t v0) {
        auto& out = entries[v0];
        auto put = [&](std::size_t t_to, Vertex to, std::size_t t_from, Vertex from, double w) {
          if (w != 0.0) {
            out.emplace_back(idx(lifted_index({t_to, v0, to}, n, L)),
                             idx(lifted_index({t_from, v0, from}, n, L)), w);
          }
        };
        if (D == 0) {
          put(0, 0, 0, 0, 1.0);
          return;
        }
        const BridgeSchedule s = schedule_distributions(*g, v0, target);
        const StochasticBridge bridge = make_bridge(kind, g, v0, target);
        for (std::size_t t = 0; t + 1 < D; ++t) {
          const Eigen::MatrixXd& P = bridge.matrices[t].entries();
          for (Vertex v = 0; v < n; ++v) {
            for (Vertex w = 0; w < n; ++w) put(t + 1, w, t, v, P(idx(w), idx(v)));
          }
        }
        const Eigen::MatrixXd K =
            closing_matrix(*g, s, bridge.matrices.back(), target, kind).K;
        for (Vertex v = 0; v < n; ++v) {
          for (Vertex w = 0; w < n; ++w) put(D - 1, w, D - 1, v, K(idx(w), idx(v)));
        }
      },
      policy);

  LiftedChain chain;
  chain.base = g;
  chain.layers = L;
  const std::size_t N = n * n * L;
  std::vector<Eigen::Triplet<double>> all;
  for (auto& part : entries) all.insert(all.end(), part.begin(), part.end());
  chain.transition = SparseMatrix(idx(N), idx(N));
  chain.transition.setFromTriplets(all.begin(), all.end());
  chain.coarse_of.resize(N);
  for (std::size_t j = 0; j < N; ++j) chain.coarse_of[j] = unlift_index(j, n, L).v;
  std::vector<Eigen::Triplet<double>> init;
  for (Vertex v = 0; v < n; ++v) init.emplace_back(idx(lifted_index({0, v, v}, n, L)), idx(v), 1.0);
  chain.init = SparseMatrix(idx(N), idx(n));
  chain.init.setFromTriplets(init.begin(), init.end());
  chain.coarse = coarse;
  return chain;
}

std::size_t d_lift_locality_violations(const LiftedChain& chain) {
  const std::size_t n = chain.coarse_size();
  const std::size_t L = chain.layers;
  std::size_t bad = 0;
  for (Index j = 0; j < chain.transition.outerSize(); ++j) {
    const LiftedIndex from = unlift_index(static_cast<std::size_t>(j), n, L);
    for (SparseMatrix::InnerIterator it(chain.transition, j); it; ++it) {
      if (it.value() == 0.0) continue;
      const LiftedIndex to = unlift_index(static_cast<std::size_t>(it.row()), n, L);
      const bool layer_ok = to.t == from.t || to.t == from.t + 1;
      const bool vertex_ok = to.v == from.v || chain.base->has_arc(from.v, to.v);
      if (to.v0 != from.v0 || !layer_ok || !vertex_ok) ++bad;
    }
  }
  return bad;
}

DiameterMixingReport verify_diameter_mixing(const LiftedChain& chain, const Distribution& target,
                                            std::size_t horizon) {
  require(chain.base != nullptr, ErrorCode::InvalidArgument, "chain without base graph");
  require(target.size() == chain.coarse_size(), ErrorCode::DimMismatch, "target length");
  DiameterMixingReport report;
  report.diameter = diameter(*chain.base);
  require(horizon >= report.diameter, ErrorCode::InvalidArgument,
          "horizon " + std::to_string(horizon) + " below the diameter");
  report.horizon = horizon;
  report.tv_curve = kernels::marginal_tv_curve(chain.transition, chain.init, chain.coarse_of,
                                               target.values(), horizon);
  report.tv_at_diameter = report.tv_curve[report.diameter];
  report.max_after_diameter = *std::max_element(
      report.tv_curve.begin() + static_cast<std::ptrdiff_t>(report.diameter), report.tv_curve.end());
  report.passed = report.max_after_diameter <= kDiameterMixingTolerance;
  return report;
}

}  // namespace qwlift
