#pragma once

// Classical Markov chains in the column-stochastic convention:
//   entry (i, j) = Pr[X(t+1) = i | X(t) = j],  p(t+1) = P p(t).
// Most libraries use the transposed (row) convention; nothing here does.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "qwlift/graph.hpp"

namespace qwlift {

inline constexpr double kNegativeTolerance = 1e-12;
inline constexpr double kSumTolerance = 1e-10;

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Probability vector. Entries in [-1e-12, 0) are clamped to zero on
/// construction; anything more negative, or a sum off by more than the
/// tolerance, throws.
class Distribution {
 public:
  explicit Distribution(Eigen::VectorXd values, double sum_tolerance = kSumTolerance);

  static Distribution point_mass(std::size_t n, std::size_t v);
  static Distribution uniform(std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double min_entry() const { return values_.minCoeff(); }

 private:
  Eigen::VectorXd values_;
};

/// Column-stochastic matrix, optionally tied to a graph's locality:
/// entry (i, j) > 0 requires arc (j, i) or, when allow_diag is set, i == j.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Eigen::MatrixXd entries,
                            std::shared_ptr<const Graph> locality = nullptr,
                            bool allow_diag = false);

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const std::shared_ptr<const Graph>& locality() const noexcept { return locality_; }
  bool allow_diag() const noexcept { return allow_diag_; }

  Distribution apply(const Distribution& p) const;

 private:
  Eigen::MatrixXd entries_;
  std::shared_ptr<const Graph> locality_;
  bool allow_diag_;
};

// Largest |column sum - 1|.
double column_sum_residual(const Eigen::MatrixXd& m);
double column_sum_residual(const SparseMatrix& m);

// ½ Σ|p_i - q_i|. Throws LengthMismatch.
double tv_distance(const Distribution& p, const Distribution& q);
double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// P^t p0. Throws DimMismatch.
Distribution evolve(const TransitionMatrix& P, const Distribution& p0, std::size_t t);

// Strong connectivity of the support pattern.
bool is_irreducible(const Eigen::MatrixXd& P);
// Some power of the support pattern is entrywise positive (Wielandt bound).
bool is_primitive(const Eigen::MatrixXd& P);

struct StationaryOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 1'000'000;
};

/// Stationary distribution by power iteration from the uniform vector on the
/// lazy chain (I + P)/2, which has the same fixed point and converges for
/// periodic chains too. Throws NotErgodic when P is reducible and
/// NoConvergence when ‖Pπ − π‖_∞ stays above the tolerance.
Distribution stationary(const TransitionMatrix& P, StationaryOptions options = {});

// Entry (i, j) = 1/outdeg(j) iff (j, i) is an arc. Throws SinkVertex.
TransitionMatrix simple_walk(const std::shared_ptr<const Graph>& g);

// laziness·I + (1 − laziness)·P, keeping P's locality with the diagonal allowed.
TransitionMatrix lazy(const TransitionMatrix& P, double laziness = 0.5);

/// Metropolis–Hastings chain with uniform neighbour proposals whose stationary
/// distribution is `target`; rejected mass and laziness stay on the diagonal.
/// Throws ZeroTargetEntry, Disconnected, Asymmetric, InvalidArgument.
TransitionMatrix metropolis_chain(const std::shared_ptr<const Graph>& g,
                                  const Distribution& target, double laziness = 0.0);

/// A lifted chain: column-stochastic dynamics on an extended state space,
/// the coarse-graining map (state -> base vertex) and the initialisation map
/// (columns are the lifted images of the base point masses).
///
/// For d-lifts `layers` is D(G) and states are laid out by lifted_index();
/// other lifts leave it at zero.
struct LiftedChain {
  std::shared_ptr<const Graph> base;
  std::size_t layers = 0;
  SparseMatrix transition;
  std::vector<Vertex> coarse_of;
  SparseMatrix init;
  std::optional<TransitionMatrix> coarse;

  std::size_t coarse_size() const noexcept { return base ? base->size() : 0; }
  std::size_t lifted_size() const noexcept { return coarse_of.size(); }

  // Image of a base distribution under the initialisation map.
  Eigen::VectorXd init_map(const Distribution& p0) const;
  // Dense n × N matrix C with C(c(j), j) = 1.
  Eigen::MatrixXd coarse_graining() const;
};

// Sums lifted mass by coarse vertex. Throws DimMismatch.
Distribution marginalize(const LiftedChain& chain, const Eigen::VectorXd& lifted);
Distribution marginalize(const LiftedChain& chain, const Distribution& lifted);

struct LiftConsistencyReport {
  double stochasticity_residual = 0.0;
  double min_entry = 0.0;
  std::size_t locality_violations = 0;
  double init_marginal_residual = 0.0;
  // ‖P·C − C·P_lift‖_max, present when the chain stores a coarse chain.
  std::optional<double> commuting_residual;
};

/// Reports how far the chain is from the lift axioms; never throws on a
/// violated property. Locality counts nonzero entries whose endpoints map to
/// base vertices that are neither equal nor joined by an arc.
LiftConsistencyReport check_lift_consistency(const LiftedChain& chain);

}  // namespace qwlift
