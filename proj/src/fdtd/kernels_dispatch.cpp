#include <cstdlib>
#include <string_view>

#include "emenc/fdtd/kernels.hpp"

namespace emenc::kernels {

const Table* avx2_table_if_built();
const Table* neon_table_if_built();

const Table* avx2() {
#if defined(__x86_64__)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? avx2_table_if_built() : nullptr;
#else
  return nullptr;
#endif
}

const Table* neon() { return neon_table_if_built(); }

const Table& best() {
  static const Table* chosen = [] {
    const char* env = std::getenv("EMENC_KERNELS");
    const std::string_view want = env ? env : "";
    if (want == "scalar") return &scalar();
    if (want == "avx2" && avx2()) return avx2();
    if (want == "neon" && neon()) return neon();
    if (avx2()) return avx2();
    if (neon()) return neon();
    return &scalar();
  }();
  return *chosen;
}

}  // namespace emenc::kernels
