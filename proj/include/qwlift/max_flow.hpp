#pragma once

// Real-capacity max-flow (Dinic) and the two-layer transport networks that
// turn consecutive bridge schedule levels into a transition matrix.

#include <cstddef>
#include <vector>

#include "qwlift/graph.hpp"
#include "qwlift/markov.hpp"

namespace qwlift {

inline constexpr double kAugmentThreshold = 1e-14;

struct FlowArc {
  std::size_t from;
  std::size_t to;
  double capacity;
};

/// General flow network. Node ids are plain indices 0..nodes-1.
class FlowNetwork {
 public:
  FlowNetwork(std::size_t nodes, std::size_t source, std::size_t sink);

  // Returns the arc id. Throws OutOfRange or InvalidArgument (negative capacity).
  std::size_t add_arc(std::size_t from, std::size_t to, double capacity);

  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t source() const noexcept { return source_; }
  std::size_t sink() const noexcept { return sink_; }
  const std::vector<FlowArc>& arcs() const noexcept { return arcs_; }

 private:
  std::size_t nodes_;
  std::size_t source_;
  std::size_t sink_;
  std::vector<FlowArc> arcs_;
};

/// Bridge-shaped network on 2n + 2 nodes: left copy j, right copy n + k,
/// source 2n, sink 2n + 1. Source arcs come first (id j), then sink arcs
/// (id n + k), then the middle arcs in (j, k) lexicographic order.
struct TransportNetwork {
  std::size_t n = 0;
  FlowNetwork network{2, 0, 1};
  // Middle arcs: (j, k, arc id), j = k for holds.
  struct Middle {
    Vertex from;
    Vertex to;
    std::size_t arc;
  };
  std::vector<Middle> middle;

  std::size_t left(Vertex j) const noexcept { return j; }
  std::size_t right(Vertex k) const noexcept { return n + k; }
};

// y = p_t, z = p_next, unit middle capacities on every arc of g and every
// self-hold. Throws DimMismatch on length mismatch or mass difference > 1e-10.
TransportNetwork build_flow_network(const Distribution& p_t, const Distribution& p_next,
                                    const Graph& g);

struct FlowResult {
  double value = 0.0;
  std::vector<double> flow;  // per arc id
};

// Dinic's algorithm; residual capacities below kAugmentThreshold count as
// saturated. Never throws on an infeasible network, the value is just < 1.
FlowResult max_flow(const FlowNetwork& net);

// Largest |inflow − outflow| over nodes other than source and sink.
double conservation_residual(const FlowNetwork& net, const FlowResult& result);

}  // namespace qwlift
