#include "qwlift/analysis.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "qwlift/bridge.hpp"
#include "qwlift/error.hpp"
#include "qwlift/kernels.hpp"

namespace qwlift {

namespace {

using Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void require_epsilon(double epsilon) {
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
}

std::size_t unwrap(const MixingReport& r) {
  if (!r.mixing_time) {
    double best = r.tv_curve.back();
    for (double v : r.tv_curve) best = std::min(best, v);
    fail(ErrorCode::NotMixedWithinHorizon,
         "TV " + std::to_string(r.tv_curve.back()) + " > " + std::to_string(r.epsilon) +
             " at t = " + std::to_string(r.horizon) + " (best " + std::to_string(best) + ")");
  }
  return *r.mixing_time;
}

}  // namespace

std::optional<std::size_t> settled_time(const std::vector<double>& curve, double epsilon) {
  if (curve.empty() || curve.back() > epsilon) return std::nullopt;
  std::size_t T = curve.size() - 1;
  while (T > 0 && curve[T - 1] <= epsilon) --T;
  return T;
}

MixingReport mixing_report(const TransitionMatrix& P, double epsilon,
                           std::optional<std::size_t> horizon) {
  require_epsilon(epsilon);
  const std::size_t n = P.size();
  require(is_primitive(P.entries()), ErrorCode::NotErgodic,
          "chain is periodic or reducible; mixing time is undefined");
  MixingReport r;
  r.epsilon = epsilon;
  r.horizon = horizon.value_or(20 * n * n);
  require(r.horizon >= 1, ErrorCode::InvalidArgument, "horizon must be at least 1");
  const Distribution pi = stationary(P);
  r.tv_curve = kernels::tv_curve(P.entries(), Eigen::MatrixXd::Identity(idx(n), idx(n)),
                                 pi.values(), r.horizon);
  r.mixing_time = settled_time(r.tv_curve, epsilon);
  return r;
}

std::size_t mixing_time(const TransitionMatrix& P, double epsilon,
                        std::optional<std::size_t> horizon) {
  return unwrap(mixing_report(P, epsilon, horizon));
}

MixingReport marginal_mixing_report(const LiftedChain& chain, const Distribution& target,
                                    double epsilon, std::optional<std::size_t> horizon) {
  require_epsilon(epsilon);
  require(chain.base != nullptr, ErrorCode::InvalidArgument, "chain without base graph");
  require(target.size() == chain.coarse_size(), ErrorCode::DimMismatch, "target length");
  const std::size_t n = chain.coarse_size();
  MixingReport r;
  r.epsilon = epsilon;
  r.horizon = horizon.value_or(chain.layers > 0 ? 4 * std::max<std::size_t>(chain.layers, 1)
                                                : 20 * n * n);
  r.tv_curve = kernels::marginal_tv_curve(chain.transition, chain.init, chain.coarse_of,
                                          target.values(), r.horizon);
  r.mixing_time = settled_time(r.tv_curve, epsilon);
  return r;
}

std::size_t marginal_mixing_time(const LiftedChain& chain, const Distribution& target,
                                 double epsilon, std::optional<std::size_t> horizon) {
  return unwrap(marginal_mixing_report(chain, target, epsilon, horizon));
}

SinclairBounds sinclair_bounds(double phi, double epsilon, double min_pi) {
  const double log_eps = std::log(1.0 / epsilon);
  return {(1.0 - 2.0 * phi) / (2.0 * phi) * log_eps,
          2.0 / (phi * phi) * (log_eps + std::log(1.0 / min_pi))};
}

ConductanceReport conductance(const TransitionMatrix& P, double epsilon) {
  const std::size_t n = P.size();
  if (n > kMaxConductanceVertices) {
    fail(ErrorCode::TooLarge, std::to_string(n) + " states; exhaustive conductance stops at " +
                                  std::to_string(kMaxConductanceVertices));
  }
  require_epsilon(epsilon);
  const Distribution pi = stationary(P);
  const Eigen::MatrixXd& M = P.entries();
  ConductanceReport report;
  report.epsilon = epsilon;

  // Gray-code walk over subsets, updating π(X) and the flow out of X per flip.
  std::vector<char> in(n, 0);
  double mass = 0.0;
  double flow = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_code = 0;
  std::uint64_t code = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const std::size_t v = static_cast<std::size_t>(std::countr_zero(step));
    const double pv = pi[v];
    double out_of_v = 0.0;  // Σ_{j∉X, j≠v} π_v P(j, v)
    double into_v = 0.0;    // Σ_{i∈X, i≠v} π_i P(v, i)
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v) continue;
      if (in[u]) {
        into_v += pi[u] * M(idx(v), idx(u));
      } else {
        out_of_v += pv * M(idx(u), idx(v));
      }
    }
    if (in[v]) {
      flow += into_v - out_of_v;
      mass -= pv;
    } else {
      flow += out_of_v - into_v;
      mass += pv;
    }
    in[v] = !in[v];
    code ^= std::uint64_t{1} << v;
    if (mass <= 0.5 + 1e-15 && mass > 0.0) {
      const double ratio = flow / mass;
      if (ratio < best) {
        best = ratio;
        best_code = code;
      }
    }
  }

  if (best_code == 0) {
    report.degenerate = true;
    return report;
  }
  // Recompute the winner directly so the reported value carries no drift.
  double x_mass = 0.0;
  double x_flow = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!((best_code >> i) & 1)) continue;
    report.argmin_subset.push_back(i);
    x_mass += pi[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (!((best_code >> j) & 1)) x_flow += M(idx(j), idx(i)) * pi[i];
    }
  }
  report.phi = x_flow / x_mass;
  const auto bounds = sinclair_bounds(report.phi, epsilon, pi.min_entry());
  report.lower_bound = bounds.lower;
  report.upper_bound = bounds.upper;
  return report;
}

SinclairReport sinclair_check(const TransitionMatrix& P, double epsilon,
                              std::optional<std::size_t> horizon) {
  SinclairReport r;
  r.conductance = conductance(P, epsilon);
  r.mixing_time = mixing_time(P, epsilon, horizon);
  const double M = static_cast<double>(r.mixing_time);
  r.holds = r.conductance.degenerate ||
            (r.conductance.lower_bound <= M && M <= r.conductance.upper_bound);
  return r;
}

std::size_t diaconis_state(int sign, std::size_t k, std::size_t n) {
  return sign > 0 ? k : n + k;
}

LiftedChain diaconis_lift(std::size_t n) {
  require(n >= 3, ErrorCode::InvalidArgument, "Diaconis lift needs n >= 3");
  auto g = std::make_shared<const Graph>(generators::cycle(n));
  const double keep = 1.0 - 1.0 / static_cast<double>(n);
  const double flip = 1.0 / static_cast<double>(n);
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t up = (k + 1) % n;
    const std::size_t down = (k + n - 1) % n;
    entries.emplace_back(idx(diaconis_state(+1, up, n)), idx(diaconis_state(+1, k, n)), keep);
    entries.emplace_back(idx(diaconis_state(-1, down, n)), idx(diaconis_state(+1, k, n)), flip);
    entries.emplace_back(idx(diaconis_state(-1, down, n)), idx(diaconis_state(-1, k, n)), keep);
    entries.emplace_back(idx(diaconis_state(+1, up, n)), idx(diaconis_state(-1, k, n)), flip);
  }
  LiftedChain chain;
  chain.base = g;
  chain.transition = SparseMatrix(idx(2 * n), idx(2 * n));
  chain.transition.setFromTriplets(entries.begin(), entries.end());
  chain.coarse_of.resize(2 * n);
  for (std::size_t k = 0; k < n; ++k) chain.coarse_of[k] = chain.coarse_of[n + k] = k;
  std::vector<Eigen::Triplet<double>> init;
  for (std::size_t k = 0; k < n; ++k) {
    init.emplace_back(idx(diaconis_state(+1, k, n)), idx(k), 0.5);
    init.emplace_back(idx(diaconis_state(-1, k, n)), idx(k), 0.5);
  }
  chain.init = SparseMatrix(idx(2 * n), idx(n));
  chain.init.setFromTriplets(init.begin(), init.end());
  chain.coarse = simple_walk(g);
  return chain;
}

std::size_t epsilon_amplification_bound(std::size_t m_quarter, double epsilon) {
  require(epsilon > 0.0 && epsilon < 0.25, ErrorCode::InvalidArgument,
          "amplification bound needs 0 < epsilon < 1/4");
  return static_cast<std::size_t>(std::ceil(std::log2(1.0 / epsilon))) * m_quarter;
}

ComparisonRow compare_methods(const std::shared_ptr<const Graph>& g, const WalkOperator& walk,
                              const QuantumState& psi0, double epsilon, std::string name,
                              CompareOptions options) {
  require(g != nullptr, ErrorCode::InvalidArgument, "null graph");
  require(walk.vertices() == g->size(), ErrorCode::DimMismatch, "walk and graph sizes differ");
  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };

  ComparisonRow row;
  row.name = std::move(name);
  row.n = g->size();
  row.diameter = diameter(*g);

  try {
    row.simple_walk_mixing = mixing_time(simple_walk(g), epsilon);
  } catch (const Error& e) {
    row.simple_walk_note = to_string(e.code());
  }

  auto start = Clock::now();
  const Distribution pi_q = average_mixing_distribution(walk, psi0);
  if (options.timings) row.ms_pi_q = ms_since(start);
  try {
    row.quantum_mixing = quantum_mixing_time(walk, psi0, epsilon, options.quantum_horizon);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotMixedWithinHorizon) throw;
    row.quantum_note = to_string(e.code());
  }

  start = Clock::now();
  const LiftedChain lift = assemble_d_lift(g, pi_q, metropolis_chain(g, pi_q));
  if (options.timings) row.ms_lift = ms_since(start);
  row.lifted_states = lift.lifted_size();
  row.d_lift_mixing = marginal_mixing_time(lift, pi_q, epsilon);
  return row;
}

}  // namespace qwlift
