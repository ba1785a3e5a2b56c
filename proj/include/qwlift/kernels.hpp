#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp that splits the work
// over independent start vectors; each start is processed with exactly the
// same arithmetic in both, so results are bitwise identical. The unqualified
// entry points dispatch to the OpenMP version when it was compiled in.

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qwlift/graph.hpp"
#include "qwlift/markov.hpp"

namespace qwlift::kernels {

// Number of OpenMP threads available (1 without OpenMP).
int thread_count();
bool openmp_enabled() noexcept;

namespace serial {

// curve[t] = max_c TV(P^t starts.col(c), target), t = 0..horizon.
std::vector<double> tv_curve(const Eigen::MatrixXd& P, const Eigen::MatrixXd& starts,
                             const Eigen::VectorXd& target, std::size_t horizon);

// curve[t] = max_c TV(marginal(P^t starts.col(c)), target) for a lifted chain.
std::vector<double> marginal_tv_curve(const SparseMatrix& P, const SparseMatrix& starts,
                                      std::span<const Vertex> coarse_of,
                                      const Eigen::VectorXd& target, std::size_t horizon);

// Column c: (1/T) Σ_{t<T} vertex distribution of U^t states.col(c); vertex v
// collects amplitudes k·n + v for every coin k.
Eigen::MatrixXd cesaro_average(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& states,
                               std::size_t vertices, std::size_t T);

}  // namespace serial

namespace omp {

std::vector<double> tv_curve(const Eigen::MatrixXd& P, const Eigen::MatrixXd& starts,
                             const Eigen::VectorXd& target, std::size_t horizon);

std::vector<double> marginal_tv_curve(const SparseMatrix& P, const SparseMatrix& starts,
                                      std::span<const Vertex> coarse_of,
                                      const Eigen::VectorXd& target, std::size_t horizon);

Eigen::MatrixXd cesaro_average(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& states,
                               std::size_t vertices, std::size_t T);

}  // namespace omp

std::vector<double> tv_curve(const Eigen::MatrixXd& P, const Eigen::MatrixXd& starts,
                             const Eigen::VectorXd& target, std::size_t horizon);

std::vector<double> marginal_tv_curve(const SparseMatrix& P, const SparseMatrix& starts,
                                      std::span<const Vertex> coarse_of,
                                      const Eigen::VectorXd& target, std::size_t horizon);

Eigen::MatrixXd cesaro_average(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& states,
                               std::size_t vertices, std::size_t T);

namespace detail {

// Per-start building blocks shared by both variants.
std::vector<double> tv_trace(const Eigen::MatrixXd& P, Eigen::VectorXd x,
                             const Eigen::VectorXd& target, std::size_t horizon);
std::vector<double> marginal_tv_trace(const SparseMatrix& P, Eigen::VectorXd x,
                                      std::span<const Vertex> coarse_of,
                                      const Eigen::VectorXd& target, std::size_t horizon);
Eigen::VectorXd cesaro_column(const Eigen::MatrixXcd& U, Eigen::VectorXcd psi,
                              std::size_t vertices, std::size_t T);
// Elementwise max over traces.
std::vector<double> max_over(const std::vector<std::vector<double>>& traces, std::size_t length);

}  // namespace detail

}  // namespace qwlift::kernels
