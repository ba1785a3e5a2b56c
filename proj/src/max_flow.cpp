#include "qwlift/max_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "qwlift/error.hpp"

namespace qwlift {

FlowNetwork::FlowNetwork(std::size_t nodes, std::size_t source, std::size_t sink)
    : nodes_(nodes), source_(source), sink_(sink) {
  require(source < nodes && sink < nodes && source != sink, ErrorCode::OutOfRange,
          "bad source/sink for a network of " + std::to_string(nodes) + " nodes");
}

std::size_t FlowNetwork::add_arc(std::size_t from, std::size_t to, double capacity) {
  if (from >= nodes_ || to >= nodes_) {
    fail(ErrorCode::OutOfRange, "arc " + std::to_string(from) + " -> " + std::to_string(to));
  }
  if (!(capacity >= 0.0)) fail(ErrorCode::InvalidArgument, "negative capacity");
  arcs_.push_back({from, to, capacity});
  return arcs_.size() - 1;
}

TransportNetwork build_flow_network(const Distribution& p_t, const Distribution& p_next,
                                    const Graph& g) {
  const std::size_t n = g.size();
  require(p_t.size() == n && p_next.size() == n, ErrorCode::DimMismatch,
          "schedule levels must have length n = " + std::to_string(n));
  const double gap = std::abs(p_t.values().sum() - p_next.values().sum());
  require(gap <= kSumTolerance, ErrorCode::DimMismatch,
          "supply and demand differ by " + std::to_string(gap));

  TransportNetwork out;
  out.n = n;
  out.network = FlowNetwork(2 * n + 2, 2 * n, 2 * n + 1);
  for (Vertex j = 0; j < n; ++j) out.network.add_arc(2 * n, j, p_t[j]);
  for (Vertex k = 0; k < n; ++k) out.network.add_arc(n + k, 2 * n + 1, p_next[k]);
  for (Vertex j = 0; j < n; ++j) {
    // Neighbours are sorted, so the hold slots in at its index position.
    bool hold_done = false;
    auto add_middle = [&](Vertex k) {
      out.middle.push_back({j, k, out.network.add_arc(j, n + k, 1.0)});
    };
    for (Vertex k : g.out_neighbors(j)) {
      if (!hold_done && k >= j) {
        add_middle(j);
        hold_done = true;
        if (k == j) continue;
      }
      add_middle(k);
    }
    if (!hold_done) add_middle(j);
  }
  return out;
}

namespace {

struct Residual {
  std::size_t to;
  std::size_t rev;  // index of the paired edge in adj[to]
  double cap;
  std::size_t arc;  // original arc id, or npos for reverse edges
};

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

class Dinic {
 public:
  explicit Dinic(const FlowNetwork& net) : adj_(net.nodes()), level_(net.nodes()), it_(net.nodes()) {
    for (std::size_t a = 0; a < net.arcs().size(); ++a) {
      const auto& arc = net.arcs()[a];
      adj_[arc.from].push_back({arc.to, adj_[arc.to].size() + (arc.from == arc.to), arc.capacity, a});
      adj_[arc.to].push_back({arc.from, adj_[arc.from].size() - 1, 0.0, npos});
    }
  }

  double run(std::size_t s, std::size_t t) {
    double total = 0.0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (true) {
        const double pushed = dfs(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= kAugmentThreshold) break;
        total += pushed;
      }
    }
    return total;
  }

  std::vector<double> arc_flows(const FlowNetwork& net) const {
    std::vector<double> flow(net.arcs().size(), 0.0);
    for (const auto& edges : adj_) {
      for (const auto& e : edges) {
        if (e.arc != npos) flow[e.arc] = std::max(0.0, net.arcs()[e.arc].capacity - e.cap);
      }
    }
    return flow;
  }

 private:
  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (const auto& e : adj_[u]) {
        if (e.cap > kAugmentThreshold && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(std::size_t u, std::size_t t, double limit) {
    if (u == t) return limit;
    for (std::size_t& i = it_[u]; i < adj_[u].size(); ++i) {
      Residual& e = adj_[u][i];
      if (e.cap <= kAugmentThreshold || level_[e.to] != level_[u] + 1) continue;
      const double pushed = dfs(e.to, t, std::min(limit, e.cap));
      if (pushed > kAugmentThreshold) {
        e.cap -= pushed;
        adj_[e.to][e.rev].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Residual>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

}  // namespace

FlowResult max_flow(const FlowNetwork& net) {
  Dinic solver(net);
  FlowResult out;
  out.value = solver.run(net.source(), net.sink());
  out.flow = solver.arc_flows(net);
  return out;
}

double conservation_residual(const FlowNetwork& net, const FlowResult& result) {
  std::vector<double> balance(net.nodes(), 0.0);
  for (std::size_t a = 0; a < net.arcs().size(); ++a) {
    balance[net.arcs()[a].from] -= result.flow[a];
    balance[net.arcs()[a].to] += result.flow[a];
  }
  double worst = 0.0;
  for (std::size_t v = 0; v < net.nodes(); ++v) {
    if (v != net.source() && v != net.sink()) worst = std::max(worst, std::abs(balance[v]));
  }
  return worst;
}

}  // namespace qwlift
