#pragma once

#include <cstddef>
#include <exception>

namespace qwlift {

enum class Execution { Serial, Parallel };

// Runs body(i) for i in [0, count), across OpenMP threads when `policy` is
// Parallel. The first exception thrown by any iteration is rethrown on the
// calling thread once the loop finishes.
template <class Index, class Body>
void for_each_index(Index count, Body&& body, Execution policy = Execution::Parallel) {
  std::exception_ptr error;
  if (policy == Execution::Serial) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (Index i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(qwlift_for_each_error)
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace qwlift
