#pragma once

// Stochastic bridges from a point mass to a full-support target, and the
// d-lifted chain that runs one bridge per start vertex in a layered copy.

#include <cstddef>
#include <memory>
#include <vector>

#include "qwlift/graph.hpp"
#include "qwlift/markov.hpp"
#include "qwlift/max_flow.hpp"
#include "qwlift/parallel.hpp"

namespace qwlift {

/// p_0 = e_root, ..., p_D = target, where [p_t]_j is the target mass of the
/// leaves below the depth-t node labelled j in the padded BFS tree.
struct BridgeSchedule {
  Vertex root = 0;
  std::size_t D = 0;
  std::vector<Distribution> levels;
  PaddedTree tree;
  std::vector<double> node_mass;  // per padded-tree node
};

// Throws DimMismatch, ZeroTargetEntry, Disconnected.
BridgeSchedule schedule_distributions(const Graph& g, Vertex root, const Distribution& target);

// Column j = flow(left_j → right_·) normalised by left_j's outflow; columns
// without outflow hold (e_j). Throws InfeasibleSchedule if the value is
// below 1 − 1e-10.
TransitionMatrix bridge_step_matrix(const TransportNetwork& net, const FlowResult& flows,
                                    const std::shared_ptr<const Graph>& g);

struct StochasticBridge {
  Vertex root = 0;
  std::vector<TransitionMatrix> matrices;  // P(1) .. P(D)

  // P(D) ··· P(1) p.
  Eigen::VectorXd apply(const Eigen::VectorXd& p) const;
};

// TV(P(D)···P(1) e_root, target).
double bridge_product_error(const StochasticBridge& bridge, const Distribution& target);

enum class BridgeKind { MaxFlow, TreeRoute };

StochasticBridge stochastic_bridge(const std::shared_ptr<const Graph>& g, Vertex root,
                                   const Distribution& target);
// Forwards each padded-tree child's mass directly, no flow solve.
StochasticBridge tree_route_bridge(const std::shared_ptr<const Graph>& g, Vertex root,
                                   const Distribution& target);
StochasticBridge make_bridge(BridgeKind kind, const std::shared_ptr<const Graph>& g, Vertex root,
                             const Distribution& target);

/// Final-layer matrix K of one lifted copy, with K p_{D-1} = target and
/// K target = target. Columns carrying schedule mass are the bridge's last
/// step; the remaining columns come from a transport problem that returns
/// their target mass to what the last step leaves uncovered, with a
/// tree-shaped closed form as fallback.
struct ClosingMatrix {
  Eigen::MatrixXd K;
  bool fallback = false;
};
ClosingMatrix closing_matrix(const Graph& g, const BridgeSchedule& schedule,
                             const TransitionMatrix& last_step, const Distribution& target,
                             BridgeKind kind);

inline constexpr double kStationarityTolerance = 1e-10;

/// n²·max(D, 1) states indexed by lifted_index(). Layer t < D−1 moves
/// (t, v0, v) → (t+1, v0, v′) with bridge v0's P(t+1); layer D−1 applies the
/// closing matrix in place. `coarse` is validated (locality plus diagonal,
/// target-stationary within 1e-10) and stored as the chain's coarse model.
/// Throws StationarityMismatch, LocalityViolation, DimMismatch and bridge errors.
LiftedChain assemble_d_lift(const std::shared_ptr<const Graph>& g, const Distribution& target,
                            const TransitionMatrix& coarse, BridgeKind kind = BridgeKind::MaxFlow,
                            Execution policy = Execution::Parallel);

// Nonzero entries of a d-lift that leave the copy or skip layers, or move
// between vertices that are neither equal nor adjacent.
std::size_t d_lift_locality_violations(const LiftedChain& chain);

inline constexpr double kDiameterMixingTolerance = 1e-9;

struct DiameterMixingReport {
  std::size_t diameter = 0;
  std::size_t horizon = 0;
  std::vector<double> tv_curve;  // max over basis starts, t = 0..horizon
  double tv_at_diameter = 0.0;
  double max_after_diameter = 0.0;
  bool passed = false;
};

// Throws InvalidArgument if horizon < D.
DiameterMixingReport verify_diameter_mixing(const LiftedChain& chain, const Distribution& target,
                                            std::size_t horizon);

}  // namespace qwlift
