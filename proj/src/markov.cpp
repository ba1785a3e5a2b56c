#include "qwlift/markov.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "qwlift/error.hpp"

namespace qwlift {

namespace {

using Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

bool reaches_all(const Eigen::MatrixXd& P, bool forward) {
  const Index n = P.rows();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<Index> frontier;
  seen[0] = 1;
  frontier.push(0);
  Index count = 1;
  while (!frontier.empty()) {
    const Index u = frontier.front();
    frontier.pop();
    for (Index v = 0; v < n; ++v) {
      const double w = forward ? P(v, u) : P(u, v);
      if (w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        frontier.push(v);
      }
    }
  }
  return count == n;
}

}  // namespace

Distribution::Distribution(Eigen::VectorXd values, double sum_tolerance)
    : values_(std::move(values)) {
  require(values_.size() > 0, ErrorCode::InvalidArgument, "empty distribution");
  for (Index i = 0; i < values_.size(); ++i) {
    double& x = values_[i];
    if (!std::isfinite(x)) fail(ErrorCode::NegativeProbability, "non-finite entry");
    if (x < 0.0) {
      if (x < -kNegativeTolerance) {
        fail(ErrorCode::NegativeProbability,
             "entry " + std::to_string(i) + " = " + std::to_string(x));
      }
      x = 0.0;
    }
  }
  const double total = values_.sum();
  if (std::abs(total - 1.0) > sum_tolerance) {
    fail(ErrorCode::NotStochastic, "distribution sums to " + std::to_string(total));
  }
}

Distribution Distribution::point_mass(std::size_t n, std::size_t v) {
  require(v < n, ErrorCode::OutOfRange, "point mass at " + std::to_string(v));
  Eigen::VectorXd p = Eigen::VectorXd::Zero(idx(n));
  p[idx(v)] = 1.0;
  return Distribution(std::move(p));
}

Distribution Distribution::uniform(std::size_t n) {
  require(n > 0, ErrorCode::InvalidArgument, "empty distribution");
  return Distribution(Eigen::VectorXd::Constant(idx(n), 1.0 / static_cast<double>(n)));
}

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd entries, std::shared_ptr<const Graph> locality,
                                   bool allow_diag)
    : entries_(std::move(entries)), locality_(std::move(locality)), allow_diag_(allow_diag) {
  require(entries_.rows() > 0 && entries_.rows() == entries_.cols(), ErrorCode::DimMismatch,
          "transition matrix must be square and non-empty");
  if (locality_) {
    require(locality_->size() == size(), ErrorCode::DimMismatch,
            "locality graph has " + std::to_string(locality_->size()) + " vertices, matrix " +
                std::to_string(size()));
  }
  const Index n = entries_.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      double& x = entries_(i, j);
      if (!std::isfinite(x) || x < -kNegativeTolerance) {
        fail(ErrorCode::NegativeProbability,
             "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") = " + std::to_string(x));
      }
      if (x < 0.0) x = 0.0;
      if (x > 0.0 && locality_) {
        const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
        const bool ok = locality_->has_arc(uj, ui) || (i == j && allow_diag_);
        if (!ok) {
          fail(ErrorCode::LocalityViolation, "entry (" + std::to_string(i) + ", " +
                                                 std::to_string(j) + ") has no arc " +
                                                 std::to_string(j) + " -> " + std::to_string(i));
        }
      }
    }
  }
  const double residual = column_sum_residual(entries_);
  if (residual > kSumTolerance) {
    fail(ErrorCode::NotStochastic, "column sums off by " + std::to_string(residual));
  }
}

Distribution TransitionMatrix::apply(const Distribution& p) const {
  require(p.size() == size(), ErrorCode::DimMismatch,
          "distribution of length " + std::to_string(p.size()) + " for a " +
              std::to_string(size()) + "-state chain");
  return Distribution(entries_ * p.values(), 1e-9);
}

double column_sum_residual(const Eigen::MatrixXd& m) {
  return (m.colwise().sum().array() - 1.0).abs().maxCoeff();
}

double column_sum_residual(const SparseMatrix& m) {
  double worst = 0.0;
  for (Index j = 0; j < m.outerSize(); ++j) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) s += it.value();
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  require(p.size() == q.size(), ErrorCode::LengthMismatch,
          "lengths " + std::to_string(p.size()) + " and " + std::to_string(q.size()));
  return 0.5 * (p - q).cwiseAbs().sum();
}

double tv_distance(const Distribution& p, const Distribution& q) {
  return tv_distance(p.values(), q.values());
}

Distribution evolve(const TransitionMatrix& P, const Distribution& p0, std::size_t t) {
  require(p0.size() == P.size(), ErrorCode::DimMismatch,
          "distribution of length " + std::to_string(p0.size()) + " for a " +
              std::to_string(P.size()) + "-state chain");
  Eigen::VectorXd p = p0.values();
  for (std::size_t s = 0; s < t; ++s) p = P.entries() * p;
  return Distribution(std::move(p), 1e-9);
}

bool is_irreducible(const Eigen::MatrixXd& P) {
  return P.rows() == P.cols() && P.rows() > 0 && reaches_all(P, true) && reaches_all(P, false);
}

bool is_primitive(const Eigen::MatrixXd& P) {
  if (!is_irreducible(P)) return false;
  const Index n = P.rows();
  // Primitive iff A^k > 0 for k = (n-1)^2 + 1; any power beyond that stays positive.
  const double wielandt = static_cast<double>((n - 1) * (n - 1) + 1);
  Eigen::MatrixXd pattern = (P.array() > 0.0).cast<double>().matrix();
  double power = 1.0;
  while (power < wielandt) {
    pattern = ((pattern * pattern).array() > 0.0).cast<double>().matrix();
    power *= 2.0;
  }
  return (pattern.array() > 0.0).all();
}

Distribution stationary(const TransitionMatrix& P, StationaryOptions options) {
  const Eigen::MatrixXd& M = P.entries();
  require(is_irreducible(M), ErrorCode::NotErgodic, "chain is reducible");
  const Index n = M.rows();
  const Eigen::MatrixXd L = 0.5 * (M + Eigen::MatrixXd::Identity(n, n));
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (std::size_t it = 0; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd image = M * pi;
    const double residual = (image - pi).cwiseAbs().maxCoeff();
    if (residual <= options.tolerance) return Distribution(pi / pi.sum());
    pi = L * pi;
    pi /= pi.sum();
  }
  fail(ErrorCode::NoConvergence,
       "power iteration did not reach " + std::to_string(options.tolerance) + " in " +
           std::to_string(options.max_iterations) + " iterations");
}

TransitionMatrix simple_walk(const std::shared_ptr<const Graph>& g) {
  require(g != nullptr, ErrorCode::InvalidArgument, "null graph");
  const std::size_t n = g->size();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(idx(n), idx(n));
  for (Vertex j = 0; j < n; ++j) {
    const auto nbrs = g->out_neighbors(j);
    require(!nbrs.empty(), ErrorCode::SinkVertex, "vertex " + std::to_string(j) + " has no out-arcs");
    const double w = 1.0 / static_cast<double>(nbrs.size());
    for (Vertex i : nbrs) P(idx(i), idx(j)) = w;
  }
  return TransitionMatrix(std::move(P), g, false);
}

TransitionMatrix lazy(const TransitionMatrix& P, double laziness) {
  require(laziness >= 0.0 && laziness <= 1.0, ErrorCode::InvalidArgument,
          "laziness must lie in [0, 1]");
  const Index n = static_cast<Index>(P.size());
  Eigen::MatrixXd M = laziness * Eigen::MatrixXd::Identity(n, n) + (1.0 - laziness) * P.entries();
  return TransitionMatrix(std::move(M), P.locality(), true);
}

TransitionMatrix metropolis_chain(const std::shared_ptr<const Graph>& g, const Distribution& target,
                                  double laziness) {
  require(g != nullptr, ErrorCode::InvalidArgument, "null graph");
  require(laziness >= 0.0 && laziness < 1.0, ErrorCode::InvalidArgument,
          "laziness must lie in [0, 1)");
  require(target.size() == g->size(), ErrorCode::DimMismatch, "target length mismatch");
  require(g->symmetric(), ErrorCode::Asymmetric, "Metropolis chain needs a symmetric graph");
  diameter(*g);  // throws Disconnected
  const std::size_t n = g->size();
  for (Vertex v = 0; v < n; ++v) {
    require(target[v] > 0.0, ErrorCode::ZeroTargetEntry,
            "target has zero mass at vertex " + std::to_string(v));
  }
  std::vector<double> degree(n);
  for (Vertex v = 0; v < n; ++v) {
    const auto nbrs = g->out_neighbors(v);
    degree[v] = static_cast<double>(
        std::count_if(nbrs.begin(), nbrs.end(), [v](Vertex u) { return u != v; }));
  }
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(idx(n), idx(n));
  for (Vertex j = 0; j < n; ++j) {
    double moved = 0.0;
    for (Vertex i : g->out_neighbors(j)) {
      if (i == j) continue;
      const double accept = std::min(1.0, (target[i] * degree[j]) / (target[j] * degree[i]));
      const double w = (1.0 - laziness) * accept / degree[j];
      P(idx(i), idx(j)) = w;
      moved += w;
    }
    P(idx(j), idx(j)) = 1.0 - moved;
  }
  return TransitionMatrix(std::move(P), g, true);
}

Eigen::VectorXd LiftedChain::init_map(const Distribution& p0) const {
  require(p0.size() == coarse_size(), ErrorCode::DimMismatch,
          "initial distribution of length " + std::to_string(p0.size()) +
              " for a lift of a " + std::to_string(coarse_size()) + "-vertex graph");
  return init * p0.values();
}

Eigen::MatrixXd LiftedChain::coarse_graining() const {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(idx(coarse_size()), idx(lifted_size()));
  for (std::size_t j = 0; j < coarse_of.size(); ++j) C(idx(coarse_of[j]), idx(j)) = 1.0;
  return C;
}

Distribution marginalize(const LiftedChain& chain, const Eigen::VectorXd& lifted) {
  require(static_cast<std::size_t>(lifted.size()) == chain.lifted_size(), ErrorCode::DimMismatch,
          "lifted vector of length " + std::to_string(lifted.size()) + ", chain has " +
              std::to_string(chain.lifted_size()) + " states");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(idx(chain.coarse_size()));
  for (std::size_t j = 0; j < chain.coarse_of.size(); ++j) p[idx(chain.coarse_of[j])] += lifted[idx(j)];
  return Distribution(std::move(p), 1e-9);
}

Distribution marginalize(const LiftedChain& chain, const Distribution& lifted) {
  return marginalize(chain, lifted.values());
}

LiftConsistencyReport check_lift_consistency(const LiftedChain& chain) {
  LiftConsistencyReport report;
  const SparseMatrix& P = chain.transition;
  const std::size_t n = chain.coarse_size();
  report.stochasticity_residual = column_sum_residual(P);
  report.min_entry = 0.0;
  for (Index j = 0; j < P.outerSize(); ++j) {
    const Vertex cj = chain.coarse_of[static_cast<std::size_t>(j)];
    for (SparseMatrix::InnerIterator it(P, j); it; ++it) {
      report.min_entry = std::min(report.min_entry, it.value());
      if (it.value() == 0.0) continue;
      const Vertex ci = chain.coarse_of[static_cast<std::size_t>(it.row())];
      if (ci != cj && !chain.base->has_arc(cj, ci)) ++report.locality_violations;
    }
  }

  for (Vertex v = 0; v < n; ++v) {
    Eigen::VectorXd image = chain.init.col(idx(v));
    Eigen::VectorXd marginal = Eigen::VectorXd::Zero(idx(n));
    for (std::size_t j = 0; j < chain.coarse_of.size(); ++j) marginal[idx(chain.coarse_of[j])] += image[idx(j)];
    marginal[idx(v)] -= 1.0;
    report.init_marginal_residual =
        std::max(report.init_marginal_residual, marginal.cwiseAbs().maxCoeff());
  }

  if (chain.coarse) {
    const Eigen::MatrixXd& Pc = chain.coarse->entries();
    double worst = 0.0;
    Eigen::VectorXd column(idx(n));
    for (Index j = 0; j < P.outerSize(); ++j) {
      column = Pc.col(idx(chain.coarse_of[static_cast<std::size_t>(j)]));
      for (SparseMatrix::InnerIterator it(P, j); it; ++it) {
        column[idx(chain.coarse_of[static_cast<std::size_t>(it.row())])] -= it.value();
      }
      worst = std::max(worst, column.cwiseAbs().maxCoeff());
    }
    report.commuting_residual = worst;
  }
  return report;
}

}  // namespace qwlift
