#include <cstdlib>
#include <cstring>

#include "haltsim/simd/kernels.hpp"

namespace haltsim::simd {
namespace {

constexpr KernelTable kScalar{scalar::cmul, scalar::norm2, scalar::weighted_norm2, scalar::inner};
constexpr KernelTable kAvx2{avx2::cmul, avx2::norm2, avx2::weighted_norm2, avx2::inner};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend select() {
  if (const char* env = std::getenv("HALTSIM_SIMD"); env && std::strcmp(env, "scalar") == 0) return Backend::scalar;
  return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

}  // namespace

bool backend_available(Backend b) {
  if (b == Backend::scalar) return true;
  return avx2::compiled() && cpu_has_avx2();
}

const KernelTable& kernels_for(Backend b) {
  return b == Backend::avx2 && backend_available(Backend::avx2) ? kAvx2 : kScalar;
}

Backend active_backend() {
  static const Backend b = select();
  return b;
}

const KernelTable& kernels() { return kernels_for(active_backend()); }

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

}  // namespace haltsim::simd
