#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Data-parallel inner loops. Every kernel has a scalar reference version;
// the AVX2/FMA version is picked at runtime when the CPU supports it.

namespace wwlab::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Arguments of the per-cell flux kernel of the strip quadratic form.
// a = (v_hi - v_lo) / dz, gbar_m = (g_lo_m + g_hi_m) / 2,
// flux = zeta * a - sum_m b_m gbar_m, hflux_m = -a b_m.
struct StripCellArgs {
  std::size_t count = 0;
  int dim = 1;
  double inv_dz = 1.0;
  const double* v_lo = nullptr;
  const double* v_hi = nullptr;
  const double* g_lo[2] = {nullptr, nullptr};
  const double* g_hi[2] = {nullptr, nullptr};
  const double* zeta = nullptr;
  const double* b[2] = {nullptr, nullptr};
  double* flux = nullptr;
  double* hflux[2] = {nullptr, nullptr};
};

// Batched symmetric tridiagonal solve, one system per Fourier mode, factored
// beforehand (Thomas). Layout is level-major: x[level * modes + mode].
// inv_den and cp are level-major per mode; off[level] couples level and level+1.
struct TridiagArgs {
  std::size_t levels = 0;
  std::size_t modes = 0;
  cplx* x = nullptr;
  const double* inv_den = nullptr;
  const double* cp = nullptr;
  const double* off = nullptr;
};

struct KernelTable {
  Isa isa;
  // out[i] = a[i] * b[i]
  void (*cmul)(cplx* out, const cplx* a, const cplx* b, std::size_t n);
  // io[i] *= m[i]
  void (*cscale_real)(cplx* io, const double* m, std::size_t n);
  // acc[i] += alpha * x[i] * w[i]
  void (*caxpy_weighted)(cplx* acc, cplx alpha, const cplx* x, const double* w, std::size_t n);
  // sum_i w[i] * conj(x[i]) * y[i]
  cplx (*cdotc_weighted)(const cplx* x, const cplx* y, const double* w, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a x
  void (*axpy)(double* y, double a, const double* x, std::size_t n);
  // y = x + b y
  void (*xpby)(double* y, const double* x, double b, std::size_t n);
  void (*strip_cell_flux)(const StripCellArgs& args);
  void (*tridiag_solve)(const TridiagArgs& args);
};

const KernelTable& scalar_kernels();
// nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels();

// Kernels used by the library. Defaults to the best supported ISA unless the
// environment variable WWLAB_SIMD=scalar is set.
const KernelTable& active();
Isa active_isa();
// Overrides the active table; throws std::invalid_argument if unsupported.
void set_active_isa(Isa isa);

}  // namespace wwlab::simd
