#pragma once

// Mixing times, conductance with Sinclair's sandwich, the cycle exhibits and
// the cross-method comparison.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qwlift/graph.hpp"
#include "qwlift/markov.hpp"
#include "qwlift/quantum_walk.hpp"

namespace qwlift {

struct MixingReport {
  double epsilon = 0.0;
  std::optional<std::size_t> mixing_time;  // empty: not settled within the horizon
  std::vector<double> tv_curve;            // max over basis starts, t = 0..horizon
  std::size_t horizon = 0;
};

// Least T with curve[t] <= eps for all t in [T, curve.size()).
std::optional<std::size_t> settled_time(const std::vector<double>& curve, double epsilon);

// Worst case over basis starts against stationary(P). Default horizon 20 n².
// Throws NotErgodic (P not primitive) or InvalidArgument.
MixingReport mixing_report(const TransitionMatrix& P, double epsilon,
                           std::optional<std::size_t> horizon = std::nullopt);
// As above but throws NotMixedWithinHorizon instead of returning no time.
std::size_t mixing_time(const TransitionMatrix& P, double epsilon,
                        std::optional<std::size_t> horizon = std::nullopt);

// Marginal TV of the init_map images of the basis starts. Default horizon
// 4·D(G) for d-lifts, 20 n² otherwise.
MixingReport marginal_mixing_report(const LiftedChain& chain, const Distribution& target,
                                    double epsilon,
                                    std::optional<std::size_t> horizon = std::nullopt);
std::size_t marginal_mixing_time(const LiftedChain& chain, const Distribution& target,
                                 double epsilon,
                                 std::optional<std::size_t> horizon = std::nullopt);

inline constexpr std::size_t kMaxConductanceVertices = 24;

struct ConductanceReport {
  double phi = 0.0;
  std::vector<Vertex> argmin_subset;
  // Sinclair bounds at epsilon (natural logarithms).
  double epsilon = 0.25;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  // No nonempty X has π(X) <= ½ (one-state chains); bounds are vacuous.
  bool degenerate = false;
};

struct SinclairBounds {
  double lower;
  double upper;
};
SinclairBounds sinclair_bounds(double phi, double epsilon, double min_pi);

// Exhaustive over subsets. Throws TooLarge (n > 24) or NotErgodic (reducible).
ConductanceReport conductance(const TransitionMatrix& P, double epsilon = 0.25);

struct SinclairReport {
  ConductanceReport conductance;
  std::size_t mixing_time = 0;
  bool holds = false;
};
SinclairReport sinclair_check(const TransitionMatrix& P, double epsilon,
                              std::optional<std::size_t> horizon = std::nullopt);

/// Two-sign lift of the cycle walk on 2n states, (+1, k) at index k and
/// (−1, k) at n + k. The sign is kept with probability 1 − 1/n and the walker
/// moves along the (new) sign. Stores the simple walk on C_n as coarse model.
/// Throws InvalidArgument for n < 3.
LiftedChain diaconis_lift(std::size_t n);
std::size_t diaconis_state(int sign, std::size_t k, std::size_t n);

// ⌈log₂(1/ε)⌉ · M_quarter. Throws InvalidArgument unless 0 < ε < ¼.
std::size_t epsilon_amplification_bound(std::size_t m_quarter, double epsilon);

struct CompareOptions {
  std::size_t quantum_horizon = 10'000;
  bool timings = false;
};

struct ComparisonRow {
  std::string name;
  std::size_t n = 0;
  std::size_t diameter = 0;
  std::size_t lifted_states = 0;
  // Empty when the simple walk is periodic; the reason is kept alongside.
  std::optional<std::size_t> simple_walk_mixing;
  std::string simple_walk_note;
  std::optional<std::size_t> quantum_mixing;
  std::string quantum_note;
  std::size_t d_lift_mixing = 0;
  // Milliseconds; only filled when CompareOptions::timings is set.
  std::optional<double> ms_pi_q;
  std::optional<double> ms_lift;
};

ComparisonRow compare_methods(const std::shared_ptr<const Graph>& g, const WalkOperator& walk,
                              const QuantumState& psi0, double epsilon, std::string name = {},
                              CompareOptions options = {});

}  // namespace qwlift
