#pragma once

// Discrete-time quantum walks on coin ⊗ vertex space. Basis state |k, v⟩
// (coin k, vertex v) has index k·n + v everywhere, so C ⊗ I is block-structured.

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "qwlift/graph.hpp"
#include "qwlift/markov.hpp"

namespace qwlift {

using Complex = std::complex<double>;

inline constexpr double kUnitarityTolerance = 1e-12;
inline constexpr double kStateNormTolerance = 1e-10;

// ‖A†A − I‖_max.
double unitarity_residual(const Eigen::MatrixXcd& A);

class CoinOperator {
 public:
  // Throws DimMismatch (non-square) or UnitarityViolation.
  explicit CoinOperator(Eigen::MatrixXcd matrix);

  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }

 private:
  Eigen::MatrixXcd matrix_;
};

// Entry (j, k) = ω^{jk}/√m with ω = e^{2πi/m}; H_2 is the Hadamard coin.
CoinOperator fourier_coin(std::size_t m);

/// Permutation of the coin ⊗ vertex basis, S|k, u⟩ = |k, f_u(k)⟩.
class ShiftOperator {
 public:
  // Throws RotationMismatch (no rotation map) or NotPermutation when some
  // coin direction u ↦ f_u(k) is not a bijection of the vertex set.
  static ShiftOperator from_rotation(const Graph& g);
  static ShiftOperator identity(std::size_t coin_dim, std::size_t vertices);

  std::size_t coin_dim() const noexcept { return m_; }
  std::size_t vertices() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return image_.size(); }
  // Index of S|i⟩.
  std::size_t image(std::size_t i) const { return image_[i]; }
  Eigen::MatrixXcd matrix() const;

 private:
  ShiftOperator(std::size_t m, std::size_t n, std::vector<std::size_t> image)
      : m_(m), n_(n), image_(std::move(image)) {}

  std::size_t m_;
  std::size_t n_;
  std::vector<std::size_t> image_;
};

class QuantumState {
 public:
  // Throws NormViolation unless ‖ψ‖₂ = 1 within 1e-10.
  explicit QuantumState(Eigen::VectorXcd amplitudes);
  static QuantumState basis(std::size_t coin_dim, std::size_t vertices, std::size_t coin,
                            Vertex v);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }

 private:
  Eigen::VectorXcd amplitudes_;
};

/// Unitary walk operator on m·n dimensions with the graph it is local to
/// (null for graph-free operators built from an explicit shift).
class WalkOperator {
 public:
  std::size_t coin_dim() const noexcept { return m_; }
  std::size_t vertices() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return m_ * n_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return U_; }
  const std::shared_ptr<const Graph>& graph() const noexcept { return graph_; }

  static std::size_t index(std::size_t coin, Vertex v, std::size_t vertices) noexcept {
    return coin * vertices + v;
  }

 private:
  friend WalkOperator walk_unitary(const ShiftOperator&, const CoinOperator&,
                                   std::shared_ptr<const Graph>);
  friend WalkOperator general_walk(std::shared_ptr<const Graph>, Eigen::MatrixXcd);

  WalkOperator(std::size_t m, std::size_t n, Eigen::MatrixXcd U, std::shared_ptr<const Graph> g)
      : m_(m), n_(n), U_(std::move(U)), graph_(std::move(g)) {}

  std::size_t m_;
  std::size_t n_;
  Eigen::MatrixXcd U_;
  std::shared_ptr<const Graph> graph_;
};

// U = S·(C ⊗ I). Throws DimMismatch, UnitarityViolation, LocalityViolation
// (the latter only when a graph is given).
WalkOperator walk_unitary(const ShiftOperator& S, const CoinOperator& C,
                          std::shared_ptr<const Graph> g = nullptr);

// Shorthand for walk_unitary(ShiftOperator::from_rotation(*g), C, g).
WalkOperator coined_walk(std::shared_ptr<const Graph> g, const CoinOperator& C);

/// Any unitary whose amplitude ⟨k′,v′|U|k,v⟩ vanishes unless v′ ∈ N(v) ∪ {v}.
/// Throws DimMismatch, UnitarityViolation, LocalityViolation (naming the
/// offending (k,v) → (k′,v′)).
WalkOperator general_walk(std::shared_ptr<const Graph> g, Eigen::MatrixXcd U);

// Q(v) = Σ_k |⟨k,v|ψ⟩|². Throws DimMismatch.
Distribution vertex_distribution(const WalkOperator& w, const QuantumState& psi);

// (1/T) Σ_{t<T} Q_t(·|ψ0), by repeated application of U.
Distribution cesaro_average(const WalkOperator& w, const QuantumState& psi0, std::size_t T);

/// Distinct eigenphases of U with the orthonormal basis of each eigenspace.
/// Projectors are formed on demand as F_r = B_r B_r†.
struct SpectralDecomposition {
  std::vector<double> phases;           // in (−π, π], ascending
  std::vector<Eigen::MatrixXcd> bases;  // dimension × rank_r, orthonormal columns
  // Some gap between neighbouring phases lies in (tol, 10·tol].
  bool cluster_ambiguity = false;

  std::size_t size() const noexcept { return phases.size(); }
  Eigen::MatrixXcd projector(std::size_t r) const { return bases[r] * bases[r].adjoint(); }

  struct Residuals {
    double idempotent = 0.0;      // max_r ‖F_r² − F_r‖_max
    double self_adjoint = 0.0;    // max_r ‖F_r − F_r†‖_max
    double completeness = 0.0;    // ‖Σ F_r − I‖_max
    double reconstruction = 0.0;  // ‖Σ e^{iθ_r} F_r − U‖_max
    double orthogonality = 0.0;   // max_{r≠s} ‖F_r F_s‖_max
  };
  Residuals residuals(const Eigen::MatrixXcd& U) const;
};

inline constexpr double kDefaultPhaseTolerance = 1e-8;

/// Schur-based eigendecomposition of U. Eigenvalues whose phases lie within
/// phase_tol of a neighbour (circularly, single linkage on sorted phases) are
/// merged into one eigenspace; with cluster = false every Schur vector stays
/// its own rank-1 projector. Throws EigenFailure.
SpectralDecomposition spectral_projectors(const WalkOperator& w,
                                          double phase_tol = kDefaultPhaseTolerance,
                                          bool cluster = true);

/// Limiting Cesàro distribution π^q, [π^q]_v = Σ_r Σ_k |⟨ψ0|F_r|k,v⟩|².
Distribution average_mixing_distribution(const SpectralDecomposition& spectrum,
                                         std::size_t vertices, const QuantumState& psi0);
Distribution average_mixing_distribution(const WalkOperator& w, const QuantumState& psi0);

// curve[i] = TV(Q̄_{i+1}, target) for i = 0..horizon−1.
std::vector<double> cesaro_tv_curve(const WalkOperator& w, const QuantumState& psi0,
                                    const Distribution& target, std::size_t horizon);

/// Least T ≥ 1 with TV(Q̄_t, π^q) ≤ ε for every t in [T, horizon].
/// Throws NotMixedWithinHorizon (with the best TV seen) or InvalidArgument.
std::size_t quantum_mixing_time(const WalkOperator& w, const QuantumState& psi0, double epsilon,
                                std::size_t horizon);

}  // namespace qwlift
