#include "qwlift/graph.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <string>

#include "qwlift/error.hpp"

namespace qwlift {

namespace {

std::string arc_str(const Arc& a) {
  return "(" + std::to_string(a.from) + ", " + std::to_string(a.to) + ")";
}

}  // namespace

Graph Graph::build(std::size_t n, std::vector<Arc> arcs, std::optional<RotationMap> rotation,
                   GraphOptions options) {
  require(n > 0, ErrorCode::InvalidArgument, "graph needs at least one vertex");
  Graph g;
  g.n_ = n;
  g.self_loops_allowed_ = options.allow_self_loops;
  g.adjacency_.assign(n * n, 0);
  g.out_.resize(n);

  for (const Arc& a : arcs) {
    require(a.from < n && a.to < n, ErrorCode::OutOfRange,
            "arc " + arc_str(a) + " has an endpoint outside 0.." + std::to_string(n - 1));
    require(a.from != a.to || options.allow_self_loops, ErrorCode::SelfLoop,
            "self-loop " + arc_str(a) + " without self_loops_allowed");
    char& cell = g.adjacency_[a.from * n + a.to];
    require(cell == 0, ErrorCode::DuplicateArc, "arc " + arc_str(a) + " listed twice");
    cell = 1;
  }
  std::sort(arcs.begin(), arcs.end());
  for (const Arc& a : arcs) g.out_[a.from].push_back(a.to);
  g.arcs_ = std::move(arcs);

  g.symmetric_ = std::all_of(g.arcs_.begin(), g.arcs_.end(),
                             [&](const Arc& a) { return g.has_arc(a.to, a.from); });
  if (options.require_symmetric && !g.symmetric_) {
    auto bad = std::find_if(g.arcs_.begin(), g.arcs_.end(),
                            [&](const Arc& a) { return !g.has_arc(a.to, a.from); });
    fail(ErrorCode::Asymmetric, "arc " + arc_str(*bad) + " has no reverse arc");
  }

  const std::size_t d0 = g.out_[0].size();
  if (std::all_of(g.out_.begin(), g.out_.end(), [&](const auto& l) { return l.size() == d0; })) {
    g.regular_degree_ = d0;
  }

  if (rotation) {
    require(rotation->size() == n, ErrorCode::RotationMismatch,
            "rotation map lists " + std::to_string(rotation->size()) + " vertices, graph has " +
                std::to_string(n));
    require(g.regular_degree_.has_value(), ErrorCode::RotationMismatch,
            "rotation map given for a graph that is not regular");
    const std::size_t m = *g.regular_degree_;
    for (Vertex u = 0; u < n; ++u) {
      const auto& f = (*rotation)[u];
      require(f.size() == m, ErrorCode::RotationMismatch,
              "vertex " + std::to_string(u) + " has " + std::to_string(f.size()) +
                  " rotation entries, expected " + std::to_string(m));
      std::vector<Vertex> sorted = f;
      std::sort(sorted.begin(), sorted.end());
      require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
              ErrorCode::RotationMismatch,
              "vertex " + std::to_string(u) + " repeats a neighbour in its rotation");
      for (Vertex v : f) {
        require(v < n && g.has_arc(u, v), ErrorCode::RotationMismatch,
                "rotation entry " + std::to_string(v) + " of vertex " + std::to_string(u) +
                    " is not an out-neighbour");
      }
    }
    g.rotation_ = std::move(rotation);
  }
  return g;
}

std::vector<std::size_t> bfs_distances(const Graph& g, Vertex root) {
  require(root < g.size(), ErrorCode::OutOfRange, "root " + std::to_string(root));
  std::vector<std::size_t> dist(g.size(), kUnreachable);
  std::queue<Vertex> frontier;
  dist[root] = 0;
  frontier.push(root);
  while (!frontier.empty()) {
    const Vertex u = frontier.front();
    frontier.pop();
    for (Vertex v : g.out_neighbors(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

std::size_t diameter(const Graph& g) {
  std::size_t best = 0;
  for (Vertex u = 0; u < g.size(); ++u) {
    const auto dist = bfs_distances(g, u);
    for (Vertex v = 0; v < g.size(); ++v) {
      require(dist[v] != kUnreachable, ErrorCode::Disconnected,
              "vertex " + std::to_string(v) + " unreachable from " + std::to_string(u));
      best = std::max(best, dist[v]);
    }
  }
  return best;
}

std::size_t SpanningTree::max_depth() const noexcept {
  return depth.empty() ? 0 : *std::max_element(depth.begin(), depth.end());
}

std::vector<Vertex> SpanningTree::children(Vertex v) const {
  std::vector<Vertex> out;
  for (Vertex c = 0; c < parent.size(); ++c) {
    if (parent[c] == v) out.push_back(c);
  }
  return out;
}

SpanningTree bfs_tree(const Graph& g, Vertex root) {
  const auto dist = bfs_distances(g, root);
  SpanningTree tree;
  tree.root = root;
  tree.depth = dist;
  tree.parent.assign(g.size(), SpanningTree::kNoParent);
  for (Vertex v = 0; v < g.size(); ++v) {
    require(dist[v] != kUnreachable, ErrorCode::Disconnected,
            "vertex " + std::to_string(v) + " unreachable from root " + std::to_string(root));
  }
  // Arcs are sorted by source, so the first hit is the lowest-index parent.
  for (const Arc& a : g.arcs()) {
    if (dist[a.to] == dist[a.from] + 1 && tree.parent[a.to] == SpanningTree::kNoParent &&
        a.to != root) {
      tree.parent[a.to] = a.from;
    }
  }
  return tree;
}

std::vector<std::size_t> PaddedTree::level(std::size_t t) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].depth == t) out.push_back(i);
  }
  return out;
}

PaddedTree padded_schedule_tree(const SpanningTree& tree, std::size_t D) {
  require(D >= tree.max_depth(), ErrorCode::DepthTooSmall,
          "padding depth " + std::to_string(D) + " below tree depth " +
              std::to_string(tree.max_depth()));
  std::vector<std::vector<Vertex>> tree_children(tree.size());
  for (Vertex v = 0; v < tree.size(); ++v) {
    if (tree.parent[v] != SpanningTree::kNoParent) tree_children[tree.parent[v]].push_back(v);
  }

  PaddedTree out;
  out.depth = D;
  auto add = [&](Vertex label, std::size_t depth, std::size_t parent, bool hold) {
    out.nodes.push_back({label, depth, parent, depth == D, hold});
    out.children.emplace_back();
    if (parent != PaddedTree::kNoNode) out.children[parent].push_back(out.nodes.size() - 1);
  };
  add(tree.root, 0, PaddedTree::kNoNode, false);

  std::size_t begin = 0;
  for (std::size_t t = 0; t < D; ++t) {
    const std::size_t end = out.nodes.size();
    for (std::size_t i = begin; i < end; ++i) {
      const PaddedTree::Node node = out.nodes[i];
      add(node.label, t + 1, i, true);
      if (!node.is_hold) {
        for (Vertex c : tree_children[node.label]) add(c, t + 1, i, false);
      }
    }
    begin = end;
  }
  return out;
}

std::size_t lifted_index(LiftedIndex index, std::size_t n, std::size_t D) {
  require(index.t < D && index.v0 < n && index.v < n, ErrorCode::OutOfRange,
          "lifted coordinates (" + std::to_string(index.t) + ", " + std::to_string(index.v0) +
              ", " + std::to_string(index.v) + ") outside n=" + std::to_string(n) +
              ", D=" + std::to_string(D));
  return index.t + D * (index.v + n * index.v0);
}

LiftedIndex unlift_index(std::size_t flat, std::size_t n, std::size_t D) {
  require(flat < n * n * D, ErrorCode::OutOfRange,
          "lifted index " + std::to_string(flat) + " outside 0.." + std::to_string(n * n * D));
  return {flat % D, flat / (D * n), (flat / D) % n};
}

namespace generators {

namespace {

Graph from_rotation(std::size_t n, RotationMap rotation, bool self_loops = false) {
  std::vector<Arc> arcs;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v : rotation[u]) arcs.push_back({u, v});
  }
  return Graph::build(n, std::move(arcs), std::move(rotation),
                      {.require_symmetric = true, .allow_self_loops = self_loops});
}

}  // namespace

Graph cycle(std::size_t n) {
  require(n >= 3, ErrorCode::InvalidArgument, "cycle needs n >= 3");
  RotationMap rot(n);
  for (Vertex u = 0; u < n; ++u) rot[u] = {(u + n - 1) % n, (u + 1) % n};
  return from_rotation(n, std::move(rot));
}

Graph complete(std::size_t n) {
  require(n >= 2, ErrorCode::InvalidArgument, "complete graph needs n >= 2");
  RotationMap rot(n);
  for (Vertex u = 0; u < n; ++u) {
    for (std::size_t j = 0; j + 1 < n; ++j) rot[u].push_back((u + j + 1) % n);
  }
  return from_rotation(n, std::move(rot));
}

Graph path(std::size_t n) {
  require(n >= 2, ErrorCode::InvalidArgument, "path needs n >= 2");
  std::vector<Arc> arcs;
  for (Vertex u = 0; u + 1 < n; ++u) {
    arcs.push_back({u, u + 1});
    arcs.push_back({u + 1, u});
  }
  return Graph::build(n, std::move(arcs), std::nullopt, {.require_symmetric = true});
}

Graph star(std::size_t leaves) {
  require(leaves >= 1, ErrorCode::InvalidArgument, "star needs a leaf");
  std::vector<Arc> arcs;
  for (Vertex v = 1; v <= leaves; ++v) {
    arcs.push_back({0, v});
    arcs.push_back({v, 0});
  }
  return Graph::build(leaves + 1, std::move(arcs), std::nullopt, {.require_symmetric = true});
}

Graph hypercube(std::size_t d) {
  require(d >= 1 && d < 20, ErrorCode::InvalidArgument, "hypercube dimension out of range");
  const std::size_t n = std::size_t{1} << d;
  RotationMap rot(n);
  for (Vertex u = 0; u < n; ++u) {
    for (std::size_t j = 0; j < d; ++j) rot[u].push_back(u ^ (std::size_t{1} << j));
  }
  return from_rotation(n, std::move(rot));
}

Graph petersen() {
  constexpr std::array<Vertex, 5> pentagram{5, 7, 9, 6, 8};
  std::array<Vertex, 10> next{}, prev{};
  for (std::size_t i = 0; i < 5; ++i) {
    next[i] = (i + 1) % 5;
    prev[i] = (i + 4) % 5;
    next[pentagram[i]] = pentagram[(i + 1) % 5];
    prev[pentagram[i]] = pentagram[(i + 4) % 5];
  }
  RotationMap rot(10);
  for (Vertex u = 0; u < 10; ++u) rot[u] = {u < 5 ? u + 5 : u - 5, next[u], prev[u]};
  return from_rotation(10, std::move(rot));
}

Graph single_vertex() { return from_rotation(1, RotationMap{{0}}, true); }

}  // namespace generators

}  // namespace qwlift
