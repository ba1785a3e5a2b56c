#pragma once

// Fixtures and brute-force oracles shared by the unit tests. Nothing here
// calls the library routine it is used to check.

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "qwlift/graph.hpp"
#include "qwlift/io.hpp"
#include "qwlift/markov.hpp"

namespace support {

inline std::string fixture(const std::string& name) {
  return std::string(QWLIFT_FIXTURE_DIR) + "/" + name + ".graph";
}

inline std::shared_ptr<const qwlift::Graph> load(const std::string& name) {
  return std::make_shared<const qwlift::Graph>(qwlift::io::parse_graph_file(fixture(name)));
}

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"k2", "k4", "c5", "c7", "cube", "petersen"};
  return names;
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Strictly positive random distribution, entries bounded away from zero.
inline Eigen::VectorXd random_positive(std::size_t n, std::mt19937_64& rng) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(n));
  for (auto& x : p) x = 0.05 + uniform01(rng);
  return p / p.sum();
}

// Floyd-Warshall distances; -1 for unreachable.
inline std::vector<std::vector<long>> all_pairs(const qwlift::Graph& g) {
  const std::size_t n = g.size();
  const long inf = 1L << 40;
  std::vector<std::vector<long>> d(n, std::vector<long>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& a : g.arcs()) d[a.from][a.to] = std::min(d[a.from][a.to], 1L);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto& row : d)
    for (auto& x : row)
      if (x >= inf) x = -1;
  return d;
}

// Stationary vector from the linear system (P - I)π = 0, Σπ = 1.
inline Eigen::VectorXd solve_stationary(const Eigen::MatrixXd& P) {
  const Eigen::Index n = P.rows();
  Eigen::MatrixXd A(n + 1, n);
  A.topRows(n) = P - Eigen::MatrixXd::Identity(n, n);
  A.row(n).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b[n] = 1.0;
  return A.colPivHouseholderQr().solve(b);
}

// Minimum s-t cut by enumerating every source side over the internal nodes.
struct CapArc {
  std::size_t from, to;
  double cap;
};
inline double brute_min_cut(std::size_t nodes, std::size_t s, std::size_t t,
                            const std::vector<CapArc>& arcs) {
  std::vector<std::size_t> internal;
  for (std::size_t v = 0; v < nodes; ++v)
    if (v != s && v != t) internal.push_back(v);
  double best = 1e300;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << internal.size()); ++mask) {
    std::vector<char> side(nodes, 0);
    side[s] = 1;
    for (std::size_t i = 0; i < internal.size(); ++i)
      if ((mask >> i) & 1) side[internal[i]] = 1;
    double cut = 0.0;
    for (const auto& a : arcs)
      if (side[a.from] && !side[a.to]) cut += a.cap;
    best = std::min(best, cut);
  }
  return best;
}

// Conductance by direct evaluation of every subset.
inline double brute_conductance(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi) {
  const std::size_t n = static_cast<std::size_t>(P.rows());
  double best = 1e300;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    double mass = 0.0, flow = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!((mask >> i) & 1)) continue;
      mass += pi[static_cast<Eigen::Index>(i)];
      for (std::size_t j = 0; j < n; ++j)
        if (!((mask >> j) & 1))
          flow += P(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) *
                  pi[static_cast<Eigen::Index>(i)];
    }
    if (mass <= 0.5 + 1e-15) best = std::min(best, flow / mass);
  }
  return best;
}

inline Eigen::VectorXd mat_power_apply(const Eigen::MatrixXd& P, Eigen::VectorXd x, std::size_t t) {
  for (std::size_t i = 0; i < t; ++i) x = P * x;
  return x;
}

}  // namespace support
