#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace qwlift {

using Vertex = std::size_t;

struct Arc {
  Vertex from;
  Vertex to;
  auto operator<=>(const Arc&) const = default;
};

// rotation[u][j] is the j-th out-neighbour of u (the coin label of arc (u, rotation[u][j])).
using RotationMap = std::vector<std::vector<Vertex>>;

struct GraphOptions {
  bool require_symmetric = false;
  bool allow_self_loops = false;
};

/// Directed graph on vertices 0..n-1 with an optional rotation map.
///
/// Immutable after construction. Out-neighbour lists are sorted ascending,
/// which fixes the tie-breaking order used by every traversal in the library.
class Graph {
 public:
  /// Validates and builds. Throws OutOfRange, DuplicateArc, SelfLoop,
  /// Asymmetric (require_symmetric set but some reverse arc missing) or
  /// RotationMismatch.
  static Graph build(std::size_t n, std::vector<Arc> arcs,
                     std::optional<RotationMap> rotation = std::nullopt,
                     GraphOptions options = {});

  std::size_t size() const noexcept { return n_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  bool has_arc(Vertex u, Vertex v) const noexcept { return adjacency_[u * n_ + v] != 0; }
  std::span<const Vertex> out_neighbors(Vertex u) const noexcept { return out_[u]; }
  std::size_t out_degree(Vertex u) const noexcept { return out_[u].size(); }

  bool symmetric() const noexcept { return symmetric_; }
  bool self_loops_allowed() const noexcept { return self_loops_allowed_; }
  // Common out-degree if every vertex has the same one.
  std::optional<std::size_t> regular_degree() const noexcept { return regular_degree_; }
  const std::optional<RotationMap>& rotation_map() const noexcept { return rotation_; }

 private:
  Graph() = default;

  std::size_t n_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<Vertex>> out_;
  std::vector<char> adjacency_;
  bool symmetric_ = false;
  bool self_loops_allowed_ = false;
  std::optional<std::size_t> regular_degree_;
  std::optional<RotationMap> rotation_;
};

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

// BFS distances from root; kUnreachable for vertices not reachable.
std::vector<std::size_t> bfs_distances(const Graph& g, Vertex root);

// Greatest BFS distance over ordered pairs. Throws Disconnected.
std::size_t diameter(const Graph& g);

struct SpanningTree {
  static constexpr Vertex kNoParent = std::numeric_limits<Vertex>::max();

  Vertex root = 0;
  std::vector<Vertex> parent;
  std::vector<std::size_t> depth;

  std::size_t size() const noexcept { return parent.size(); }
  std::size_t max_depth() const noexcept;
  // Tree children of v in ascending order.
  std::vector<Vertex> children(Vertex v) const;
};

/// BFS tree with depth(v) = dist(root, v); each vertex's parent is the
/// lowest-index in-neighbour one level closer to the root. Throws Disconnected.
SpanningTree bfs_tree(const Graph& g, Vertex root);

/// A BFS tree padded so that every original vertex ends in exactly one leaf at
/// depth D. Each vertex v appears once on every level from depth(v) to D: its
/// original node, then a chain of same-label "hold" nodes. The first hold node
/// of an internal vertex is appended as an extra child next to its tree
/// children, so the mass that belongs to v itself parks while the rest fans out.
struct PaddedTree {
  struct Node {
    Vertex label;
    std::size_t depth;
    std::size_t parent;  // node index; root's parent is kNoNode
    bool is_leaf;
    bool is_hold;
  };
  static constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

  std::vector<Node> nodes;  // ordered by depth, root first
  std::vector<std::vector<std::size_t>> children;
  std::size_t depth = 0;  // D

  std::vector<std::size_t> level(std::size_t t) const;
};

// Throws DepthTooSmall if D is below the tree's depth.
PaddedTree padded_schedule_tree(const SpanningTree& tree, std::size_t D);

/// (t, v0, v) coordinates of a d-lifted state: layer, start vertex, current vertex.
struct LiftedIndex {
  std::size_t t;
  Vertex v0;
  Vertex v;
  bool operator==(const LiftedIndex&) const = default;
};

// flat = t + D * (v + n * v0). Both throw OutOfRange.
std::size_t lifted_index(LiftedIndex index, std::size_t n, std::size_t D);
LiftedIndex unlift_index(std::size_t flat, std::size_t n, std::size_t D);

namespace generators {

// Cycle C_n with rotation f_u(0) = u-1 ("L"), f_u(1) = u+1 ("R").
Graph cycle(std::size_t n);
// Complete graph K_n with rotation f_u(j) = u + j + 1 mod n.
Graph complete(std::size_t n);
// Path 0-1-...-(n-1), no rotation map.
Graph path(std::size_t n);
// Star with centre 0, no rotation map.
Graph star(std::size_t leaves);
// Hypercube Q_d with rotation f_u(j) = u xor 2^j.
Graph hypercube(std::size_t d);
// Petersen graph: outer 5-cycle 0..4, inner pentagram 5..9, spokes i ~ i+5.
// Rotation: direction 0 is the spoke, 1 and 2 traverse the two 5-cycles.
Graph petersen();
// One vertex with a self-loop.
Graph single_vertex();

}  // namespace generators

}  // namespace qwlift
