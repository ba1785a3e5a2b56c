#include "qwlift/quantum_walk.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qwlift/error.hpp"
#include "qwlift/kernels.hpp"

namespace qwlift {

namespace {

using Eigen::Index;

constexpr double kAmplitudeZero = 1e-12;

Index idx(std::size_t i) { return static_cast<Index>(i); }

// Maps std::arg's [−π, π] onto (−π, π].
double wrap_phase(double theta) {
  return theta <= -std::numbers::pi ? theta + 2.0 * std::numbers::pi : theta;
}

std::string basis_label(std::size_t i, std::size_t n) {
  return "|" + std::to_string(i / n) + ", " + std::to_string(i % n) + ">";
}

}  // namespace

double unitarity_residual(const Eigen::MatrixXcd& A) {
  const Eigen::MatrixXcd gram = A.adjoint() * A;
  return (gram - Eigen::MatrixXcd::Identity(A.rows(), A.cols())).cwiseAbs().maxCoeff();
}

CoinOperator::CoinOperator(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
  require(matrix_.rows() > 0 && matrix_.rows() == matrix_.cols(), ErrorCode::DimMismatch,
          "coin must be square and non-empty");
  const double residual = unitarity_residual(matrix_);
  if (residual > kUnitarityTolerance) {
    fail(ErrorCode::UnitarityViolation, "coin has ‖C†C − I‖_max = " + std::to_string(residual));
  }
}

CoinOperator fourier_coin(std::size_t m) {
  require(m >= 1, ErrorCode::InvalidArgument, "coin dimension must be at least 1");
  Eigen::MatrixXcd H(idx(m), idx(m));
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      // Reduce the exponent first so large powers do not lose the phase.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % m) /
                           static_cast<double>(m);
      H(idx(j), idx(k)) = std::polar(scale, angle);
    }
  }
  return CoinOperator(std::move(H));
}

ShiftOperator ShiftOperator::from_rotation(const Graph& g) {
  require(g.rotation_map().has_value(), ErrorCode::RotationMismatch,
          "shift operator needs a rotation map");
  const RotationMap& rot = *g.rotation_map();
  const std::size_t n = g.size();
  const std::size_t m = rot.front().size();
  std::vector<std::size_t> image(m * n);
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<char> hit(n, 0);
    for (Vertex u = 0; u < n; ++u) {
      const Vertex v = rot[u][k];
      if (hit[v]) {
        fail(ErrorCode::NotPermutation, "coin direction " + std::to_string(k) +
                                            " sends two vertices to " + std::to_string(v));
      }
      hit[v] = 1;
      image[k * n + u] = k * n + v;
    }
  }
  return ShiftOperator(m, n, std::move(image));
}

ShiftOperator ShiftOperator::identity(std::size_t coin_dim, std::size_t vertices) {
  require(coin_dim > 0 && vertices > 0, ErrorCode::InvalidArgument, "empty shift");
  std::vector<std::size_t> image(coin_dim * vertices);
  std::iota(image.begin(), image.end(), std::size_t{0});
  return ShiftOperator(coin_dim, vertices, std::move(image));
}

Eigen::MatrixXcd ShiftOperator::matrix() const {
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(idx(dimension()), idx(dimension()));
  for (std::size_t i = 0; i < dimension(); ++i) S(idx(image_[i]), idx(i)) = 1.0;
  return S;
}

QuantumState::QuantumState(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
  const double norm = amplitudes_.norm();
  if (!(std::abs(norm - 1.0) <= kStateNormTolerance)) {
    fail(ErrorCode::NormViolation, "state has norm " + std::to_string(norm));
  }
}

QuantumState QuantumState::basis(std::size_t coin_dim, std::size_t vertices, std::size_t coin,
                                 Vertex v) {
  require(coin < coin_dim && v < vertices, ErrorCode::OutOfRange,
          "basis state |" + std::to_string(coin) + ", " + std::to_string(v) + "> outside " +
              std::to_string(coin_dim) + " x " + std::to_string(vertices));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(idx(coin_dim * vertices));
  psi[idx(WalkOperator::index(coin, v, vertices))] = 1.0;
  return QuantumState(std::move(psi));
}

namespace {

void check_locality(const Graph& g, const Eigen::MatrixXcd& U, std::size_t n) {
  for (Index col = 0; col < U.cols(); ++col) {
    const Vertex v = static_cast<std::size_t>(col) % n;
    for (Index row = 0; row < U.rows(); ++row) {
      if (std::abs(U(row, col)) <= kAmplitudeZero) continue;
      const Vertex w = static_cast<std::size_t>(row) % n;
      if (w != v && !g.has_arc(v, w)) {
        fail(ErrorCode::LocalityViolation,
             "amplitude " + basis_label(static_cast<std::size_t>(col), n) + " -> " +
                 basis_label(static_cast<std::size_t>(row), n) + " between non-adjacent vertices");
      }
    }
  }
}

void check_unitary(const Eigen::MatrixXcd& U) {
  const double residual = unitarity_residual(U);
  if (residual > kUnitarityTolerance) {
    fail(ErrorCode::UnitarityViolation,
         "walk operator has ‖U†U − I‖_max = " + std::to_string(residual));
  }
}

}  // namespace

WalkOperator walk_unitary(const ShiftOperator& S, const CoinOperator& C,
                          std::shared_ptr<const Graph> g) {
  const std::size_t m = C.size();
  const std::size_t n = S.vertices();
  require(S.coin_dim() == m, ErrorCode::DimMismatch,
          "shift has " + std::to_string(S.coin_dim()) + " coin directions, coin has " +
              std::to_string(m));
  if (g) require(g->size() == n, ErrorCode::DimMismatch, "graph size differs from shift");
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(idx(m * n), idx(m * n));
  for (std::size_t kin = 0; kin < m; ++kin) {
    for (Vertex v = 0; v < n; ++v) {
      const Index col = idx(kin * n + v);
      for (std::size_t kout = 0; kout < m; ++kout) {
        U(idx(S.image(kout * n + v)), col) = C.matrix()(idx(kout), idx(kin));
      }
    }
  }
  check_unitary(U);
  if (g) check_locality(*g, U, n);
  return WalkOperator(m, n, std::move(U), std::move(g));
}

WalkOperator coined_walk(std::shared_ptr<const Graph> g, const CoinOperator& C) {
  require(g != nullptr, ErrorCode::InvalidArgument, "null graph");
  return walk_unitary(ShiftOperator::from_rotation(*g), C, g);
}

WalkOperator general_walk(std::shared_ptr<const Graph> g, Eigen::MatrixXcd U) {
  require(g != nullptr, ErrorCode::InvalidArgument, "null graph");
  const std::size_t n = g->size();
  require(U.rows() == U.cols() && U.rows() > 0 && static_cast<std::size_t>(U.rows()) % n == 0,
          ErrorCode::DimMismatch,
          "operator dimension " + std::to_string(U.rows()) + " is not a multiple of n = " +
              std::to_string(n));
  check_unitary(U);
  check_locality(*g, U, n);
  const std::size_t m = static_cast<std::size_t>(U.rows()) / n;
  return WalkOperator(m, n, std::move(U), std::move(g));
}

Distribution vertex_distribution(const WalkOperator& w, const QuantumState& psi) {
  require(psi.dimension() == w.dimension(), ErrorCode::DimMismatch,
          "state dimension " + std::to_string(psi.dimension()) + ", walk dimension " +
              std::to_string(w.dimension()));
  const Index n = idx(w.vertices());
  const Eigen::VectorXd mass = psi.amplitudes().cwiseAbs2();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < w.coin_dim(); ++k) q += mass.segment(idx(k) * n, n);
  return Distribution(std::move(q), 1e-9);
}

Distribution cesaro_average(const WalkOperator& w, const QuantumState& psi0, std::size_t T) {
  require(psi0.dimension() == w.dimension(), ErrorCode::DimMismatch, "state dimension");
  const Eigen::MatrixXd avg =
      kernels::serial::cesaro_average(w.matrix(), psi0.amplitudes(), w.vertices(), T);
  return Distribution(avg.col(0), 1e-9);
}

SpectralDecomposition::Residuals SpectralDecomposition::residuals(const Eigen::MatrixXcd& U) const {
  Residuals out;
  const Index dim = U.rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd recon = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<Eigen::MatrixXcd> F;
  F.reserve(size());
  for (std::size_t r = 0; r < size(); ++r) F.push_back(projector(r));
  for (std::size_t r = 0; r < size(); ++r) {
    out.idempotent = std::max(out.idempotent, (F[r] * F[r] - F[r]).cwiseAbs().maxCoeff());
    out.self_adjoint = std::max(out.self_adjoint, (F[r] - F[r].adjoint()).cwiseAbs().maxCoeff());
    sum += F[r];
    recon += std::polar(1.0, phases[r]) * F[r];
    for (std::size_t s = r + 1; s < size(); ++s) {
      out.orthogonality = std::max(out.orthogonality, (F[r] * F[s]).cwiseAbs().maxCoeff());
    }
  }
  out.completeness = (sum - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  out.reconstruction = (recon - U).cwiseAbs().maxCoeff();
  return out;
}

SpectralDecomposition spectral_projectors(const WalkOperator& w, double phase_tol, bool cluster) {
  require(phase_tol >= 0.0, ErrorCode::InvalidArgument, "phase tolerance must be non-negative");
  const Eigen::MatrixXcd& U = w.matrix();
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(U, true);
  if (schur.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "Schur decomposition failed");
  const Eigen::MatrixXcd& T = schur.matrixT();
  const Eigen::MatrixXcd& Q = schur.matrixU();
  const Index dim = U.rows();

  // U is normal, so its Schur form is diagonal and Q holds orthonormal eigenvectors.
  double off_diagonal = 0.0;
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < j; ++i) off_diagonal = std::max(off_diagonal, std::abs(T(i, j)));
  }
  if (off_diagonal > 1e-8) {
    fail(ErrorCode::EigenFailure,
         "Schur form is not diagonal (off-diagonal " + std::to_string(off_diagonal) + ")");
  }

  std::vector<double> phase(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) phase[static_cast<std::size_t>(i)] = wrap_phase(std::arg(T(i, i)));
  std::vector<std::size_t> order(phase.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return phase[a] < phase[b]; });

  SpectralDecomposition out;
  std::vector<std::vector<std::size_t>> groups;
  groups.push_back({order.front()});
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double gap = phase[order[i]] - phase[order[i - 1]];
    if (cluster && gap > phase_tol && gap <= 10.0 * phase_tol) out.cluster_ambiguity = true;
    if (cluster && gap <= phase_tol) {
      groups.back().push_back(order[i]);
    } else {
      groups.push_back({order[i]});
    }
  }
  if (cluster && groups.size() > 1) {
    const double wrap_gap =
        phase[order.front()] + 2.0 * std::numbers::pi - phase[order.back()];
    if (wrap_gap > phase_tol && wrap_gap <= 10.0 * phase_tol) out.cluster_ambiguity = true;
    if (wrap_gap <= phase_tol) {
      groups.front().insert(groups.front().end(), groups.back().begin(), groups.back().end());
      groups.pop_back();
    }
  }

  struct Cluster {
    double phase;
    Eigen::MatrixXcd basis;
  };
  std::vector<Cluster> clusters;
  for (const auto& members : groups) {
    Complex mean = 0.0;
    Eigen::MatrixXcd vectors(dim, idx(members.size()));
    for (std::size_t c = 0; c < members.size(); ++c) {
      mean += T(idx(members[c]), idx(members[c]));
      vectors.col(idx(c)) = Q.col(idx(members[c]));
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(vectors);
    Eigen::MatrixXcd basis =
        qr.householderQ() * Eigen::MatrixXcd::Identity(dim, idx(members.size()));
    clusters.push_back({wrap_phase(std::arg(mean)), std::move(basis)});
  }
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const Cluster& a, const Cluster& b) { return a.phase < b.phase; });
  for (auto& c : clusters) {
    out.phases.push_back(c.phase);
    out.bases.push_back(std::move(c.basis));
  }
  return out;
}

Distribution average_mixing_distribution(const SpectralDecomposition& spectrum,
                                         std::size_t vertices, const QuantumState& psi0) {
  require(!spectrum.bases.empty() &&
              static_cast<std::size_t>(spectrum.bases.front().rows()) == psi0.dimension(),
          ErrorCode::DimMismatch, "state dimension does not match the spectrum");
  require(vertices > 0 && psi0.dimension() % vertices == 0, ErrorCode::DimMismatch,
          "state dimension is not a multiple of the vertex count");
  const Index n = idx(vertices);
  const Index m = idx(psi0.dimension() / vertices);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(idx(psi0.dimension()));
  for (const auto& B : spectrum.bases) {
    // ⟨ψ0|F_r|k,v⟩ is the conjugate of (F_r ψ0)_{k,v} since F_r is self-adjoint.
    const Eigen::VectorXcd projected = B * (B.adjoint() * psi0.amplitudes());
    mass += projected.cwiseAbs2();
  }
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(n);
  for (Index k = 0; k < m; ++k) pi += mass.segment(k * n, n);
  return Distribution(std::move(pi), 1e-9);
}

Distribution average_mixing_distribution(const WalkOperator& w, const QuantumState& psi0) {
  require(psi0.dimension() == w.dimension(), ErrorCode::DimMismatch, "state dimension");
  return average_mixing_distribution(spectral_projectors(w), w.vertices(), psi0);
}

std::vector<double> cesaro_tv_curve(const WalkOperator& w, const QuantumState& psi0,
                                    const Distribution& target, std::size_t horizon) {
  require(psi0.dimension() == w.dimension(), ErrorCode::DimMismatch, "state dimension");
  require(target.size() == w.vertices(), ErrorCode::DimMismatch, "target length");
  const Index n = idx(w.vertices());
  const Index m = idx(w.coin_dim());
  Eigen::VectorXcd psi = psi0.amplitudes();
  Eigen::VectorXcd next(psi.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  std::vector<double> curve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const Eigen::VectorXd mass = psi.cwiseAbs2();
    for (Index k = 0; k < m; ++k) acc += mass.segment(k * n, n);
    curve[t - 1] = 0.5 * (acc / static_cast<double>(t) - target.values()).cwiseAbs().sum();
    next.noalias() = w.matrix() * psi;
    psi.swap(next);
  }
  return curve;
}

std::size_t quantum_mixing_time(const WalkOperator& w, const QuantumState& psi0, double epsilon,
                                std::size_t horizon) {
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
  require(horizon >= 1, ErrorCode::InvalidArgument, "horizon must be at least 1");
  const Distribution target = average_mixing_distribution(w, psi0);
  const auto curve = cesaro_tv_curve(w, psi0, target, horizon);
  if (curve.back() > epsilon) {
    fail(ErrorCode::NotMixedWithinHorizon,
         "TV " + std::to_string(curve.back()) + " > " + std::to_string(epsilon) + " at t = " +
             std::to_string(horizon) + " (best " +
             std::to_string(*std::min_element(curve.begin(), curve.end())) + ")");
  }
  std::size_t T = horizon;
  while (T > 1 && curve[T - 2] <= epsilon) --T;
  return T;
}

}  // namespace qwlift
