#pragma once

// Index maps over sample points, serial or OpenMP. Results are stored by
// index, so the output does not depend on scheduling. The first exception
// (lowest index) is rethrown after the loop.

#include <cstddef>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qklab::parallel {

enum class Exec { Serial, Parallel };

/// Overrides the OpenMP team size; n <= 0 leaves the runtime default.
inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class F>
auto map_indices(std::size_t count, F&& f, Exec exec = Exec::Parallel) {
  using R = std::decay_t<decltype(f(std::size_t{0}))>;
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  const auto body = [&](std::size_t i) {
    try {
      slots[i].emplace(f(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
  } else {
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace qklab::parallel
