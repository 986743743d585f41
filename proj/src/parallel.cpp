#include "kdvlim/parallel.hpp"

#include <atomic>

namespace kdvlim {

namespace {
std::atomic<bool> g_serial{false};
}

void set_serial(bool on) { g_serial.store(on); }
bool serial_mode() { return g_serial.load(); }

int max_threads() {
#ifdef KDVLIM_HAVE_OPENMP
  return serial_mode() ? 1 : omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace kdvlim
