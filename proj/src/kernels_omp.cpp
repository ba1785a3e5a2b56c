#include "qwlift/error.hpp"
#include "qwlift/kernels.hpp"
#include "qwlift/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qwlift::kernels {

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool openmp_enabled() noexcept {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

namespace omp {

std::vector<double> tv_curve(const Eigen::MatrixXd& P, const Eigen::MatrixXd& starts,
                             const Eigen::VectorXd& target, std::size_t horizon) {
  require(P.rows() == P.cols() && starts.rows() == P.rows() && target.size() == P.rows(),
          ErrorCode::DimMismatch, "tv_curve dimensions");
  std::vector<std::vector<double>> traces(static_cast<std::size_t>(starts.cols()));
  for_each_index(starts.cols(), [&](Eigen::Index c) {
    traces[static_cast<std::size_t>(c)] = detail::tv_trace(P, starts.col(c), target, horizon);
  });
  return detail::max_over(traces, horizon + 1);
}

std::vector<double> marginal_tv_curve(const SparseMatrix& P, const SparseMatrix& starts,
                                      std::span<const Vertex> coarse_of,
                                      const Eigen::VectorXd& target, std::size_t horizon) {
  require(P.rows() == P.cols() && starts.rows() == P.rows() &&
              coarse_of.size() == static_cast<std::size_t>(P.rows()),
          ErrorCode::DimMismatch, "marginal_tv_curve dimensions");
  std::vector<std::vector<double>> traces(static_cast<std::size_t>(starts.cols()));
  for_each_index(starts.cols(), [&](Eigen::Index c) {
    traces[static_cast<std::size_t>(c)] = detail::marginal_tv_trace(
        P, Eigen::VectorXd(starts.col(c)), coarse_of, target, horizon);
  });
  return detail::max_over(traces, horizon + 1);
}

Eigen::MatrixXd cesaro_average(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& states,
                               std::size_t vertices, std::size_t T) {
  require(T >= 1, ErrorCode::InvalidArgument, "Cesaro average needs T >= 1");
  require(U.rows() == U.cols() && states.rows() == U.rows() && vertices > 0 &&
              U.rows() % static_cast<Eigen::Index>(vertices) == 0,
          ErrorCode::DimMismatch, "cesaro_average dimensions");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(vertices), states.cols());
  for_each_index(states.cols(), [&](Eigen::Index c) {
    out.col(c) = detail::cesaro_column(U, states.col(c), vertices, T);
  });
  return out;
}

}  // namespace omp

std::vector<double> tv_curve(const Eigen::MatrixXd& P, const Eigen::MatrixXd& starts,
                             const Eigen::VectorXd& target, std::size_t horizon) {
  if (openmp_enabled() && starts.cols() > 1) return omp::tv_curve(P, starts, target, horizon);
  return serial::tv_curve(P, starts, target, horizon);
}

std::vector<double> marginal_tv_curve(const SparseMatrix& P, const SparseMatrix& starts,
                                      std::span<const Vertex> coarse_of,
                                      const Eigen::VectorXd& target, std::size_t horizon) {
  if (openmp_enabled() && starts.cols() > 1) {
    return omp::marginal_tv_curve(P, starts, coarse_of, target, horizon);
  }
  return serial::marginal_tv_curve(P, starts, coarse_of, target, horizon);
}

Eigen::MatrixXd cesaro_average(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& states,
                               std::size_t vertices, std::size_t T) {
  if (openmp_enabled() && states.cols() > 1) return omp::cesaro_average(U, states, vertices, T);
  return serial::cesaro_average(U, states, vertices, T);
}

}  // namespace qwlift::kernels
