#include <algorithm>
#include <string>

#include "qwlift/error.hpp"
#include "qwlift/kernels.hpp"

namespace qwlift::kernels {

namespace detail {

std::vector<double> tv_trace(const Eigen::MatrixXd& P, Eigen::VectorXd x,
                             const Eigen::VectorXd& target, std::size_t horizon) {
  std::vector<double> trace(horizon + 1);
  Eigen::VectorXd next(x.size());
  for (std::size_t t = 0;; ++t) {
    trace[t] = 0.5 * (x - target).cwiseAbs().sum();
    if (t == horizon) break;
    next.noalias() = P * x;
    x.swap(next);
  }
  return trace;
}

std::vector<double> marginal_tv_trace(const SparseMatrix& P, Eigen::VectorXd x,
                                      std::span<const Vertex> coarse_of,
                                      const Eigen::VectorXd& target, std::size_t horizon) {
  std::vector<double> trace(horizon + 1);
  Eigen::VectorXd next(x.size());
  Eigen::VectorXd marginal(target.size());
  for (std::size_t t = 0;; ++t) {
    marginal.setZero();
    for (Eigen::Index j = 0; j < x.size(); ++j) marginal[static_cast<Eigen::Index>(coarse_of[static_cast<std::size_t>(j)])] += x[j];
    trace[t] = 0.5 * (marginal - target).cwiseAbs().sum();
    if (t == horizon) break;
    next.noalias() = P * x;
    x.swap(next);
  }
  return trace;
}

Eigen::VectorXd cesaro_column(const Eigen::MatrixXcd& U, Eigen::VectorXcd psi,
                              std::size_t vertices, std::size_t T) {
  const auto n = static_cast<Eigen::Index>(vertices);
  const Eigen::Index m = psi.size() / n;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(psi.size());
  Eigen::VectorXcd next(psi.size());
  for (std::size_t t = 0; t < T; ++t) {
    acc += psi.cwiseAbs2();
    if (t + 1 == T) break;
    next.noalias() = U * psi;
    psi.swap(next);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < m; ++k) out += acc.segment(k * n, n);
  return out / static_cast<double>(T);
}

std::vector<double> max_over(const std::vector<std::vector<double>>& traces, std::size_t length) {
  std::vector<double> out(length, 0.0);
  for (const auto& trace : traces) {
    for (std::size_t t = 0; t < length; ++t) out[t] = std::max(out[t], trace[t]);
  }
  return out;
}

}  // namespace detail

namespace serial {

std::vector<double> tv_curve(const Eigen::MatrixXd& P, const Eigen::MatrixXd& starts,
                             const Eigen::VectorXd& target, std::size_t horizon) {
  require(P.rows() == P.cols() && starts.rows() == P.rows() && target.size() == P.rows(),
          ErrorCode::DimMismatch, "tv_curve dimensions");
  std::vector<std::vector<double>> traces;
  for (Eigen::Index c = 0; c < starts.cols(); ++c) {
    traces.push_back(detail::tv_trace(P, starts.col(c), target, horizon));
  }
  return detail::max_over(traces, horizon + 1);
}

std::vector<double> marginal_tv_curve(const SparseMatrix& P, const SparseMatrix& starts,
                                      std::span<const Vertex> coarse_of,
                                      const Eigen::VectorXd& target, std::size_t horizon) {
  require(P.rows() == P.cols() && starts.rows() == P.rows() &&
              coarse_of.size() == static_cast<std::size_t>(P.rows()),
          ErrorCode::DimMismatch, "marginal_tv_curve dimensions");
  std::vector<std::vector<double>> traces;
  for (Eigen::Index c = 0; c < starts.cols(); ++c) {
    traces.push_back(detail::marginal_tv_trace(P, Eigen::VectorXd(starts.col(c)), coarse_of,
                                               target, horizon));
  }
  return detail::max_over(traces, horizon + 1);
}

Eigen::MatrixXd cesaro_average(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& states,
                               std::size_t vertices, std::size_t T) {
  require(T >= 1, ErrorCode::InvalidArgument, "Cesaro average needs T >= 1");
  require(U.rows() == U.cols() && states.rows() == U.rows() && vertices > 0 &&
              U.rows() % static_cast<Eigen::Index>(vertices) == 0,
          ErrorCode::DimMismatch, "cesaro_average dimensions");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(vertices), states.cols());
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    out.col(c) = detail::cesaro_column(U, states.col(c), vertices, T);
  }
  return out;
}

}  // namespace serial

}  // namespace qwlift::kernels
