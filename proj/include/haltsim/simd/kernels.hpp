#pragma once

#include <complex>
#include <cstddef>

namespace haltsim::simd {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

/// Inner-loop kernels of the split-operator stepper.
struct KernelTable {
  /// a[i] *= b[i]
  void (*cmul)(cplx* a, const cplx* b, std::size_t n);
  /// sum |a[i]|^2
  double (*norm2)(const cplx* a, std::size_t n);
  /// sum w[i] |a[i]|^2
  double (*weighted_norm2)(const cplx* a, const double* w, std::size_t n);
  /// sum conj(a[i]) b[i]
  cplx (*inner)(const cplx* a, const cplx* b, std::size_t n);
};

namespace scalar {
void cmul(cplx* a, const cplx* b, std::size_t n);
double norm2(const cplx* a, std::size_t n);
double weighted_norm2(const cplx* a, const double* w, std::size_t n);
cplx inner(const cplx* a, const cplx* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
/// False when this build carries no AVX2 code (non-x86 target).
bool compiled();
void cmul(cplx* a, const cplx* b, std::size_t n);
double norm2(const cplx* a, std::size_t n);
double weighted_norm2(const cplx* a, const double* w, std::size_t n);
cplx inner(const cplx* a, const cplx* b, std::size_t n);
}  // namespace avx2

/// Compiled in and supported by the running CPU.
bool backend_available(Backend b);

const KernelTable& kernels_for(Backend b);

/// Best available backend, unless HALTSIM_SIMD=scalar forces the reference path.
Backend active_backend();

const KernelTable& kernels();

const char* backend_name(Backend b);

}  // namespace haltsim::simd
