#include <cstdlib>
#include <cstring>

#include "vwss/kernels.hpp"

namespace vwss::kernels {

#ifdef VWSS_HAVE_AVX2
bool avx2_supported() { return __builtin_cpu_supports("avx2") != 0; }
#endif

namespace {

const KernelTable& pick_table() {
  const char* force = std::getenv("VWSS_FORCE_SCALAR");
  if (force != nullptr && std::strcmp(force, "0") != 0) return scalar_table();
#ifdef VWSS_HAVE_AVX2
  if (avx2_supported()) return avx2_table();
#endif
  return scalar_table();
}

}  // namespace

const KernelTable& active_table() {
  static const KernelTable& table = pick_table();
  return table;
}

}  // namespace vwss::kernels
