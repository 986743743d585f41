#pragma once
#include <cstddef>

#ifdef KDVLIM_HAVE_OPENMP
#include <omp.h>
#endif

namespace kdvlim {

// Global switch between the OpenMP kernels and the serial reference path.
// Serial mode is the comparison baseline for the benchmark target and the
// determinism check in the tests.
void set_serial(bool on);
bool serial_mode();
int max_threads();

template <class F>
void parallel_for(std::size_t n, F&& f) {
#ifdef KDVLIM_HAVE_OPENMP
  if (!serial_mode()) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      f(static_cast<std::size_t>(i));
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace kdvlim
