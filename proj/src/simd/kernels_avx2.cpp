// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace wwlab::simd::detail {

namespace {

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

// Two complex numbers per register: [re0 im0 re1 im1].
inline __m256d cmul2(__m256d a, __m256d b) {
  const __m256d ar = _mm256_movedup_pd(a);
  const __m256d ai = _mm256_permute_pd(a, 0xF);
  const __m256d bs = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bs));
}

// [w0 w0 w1 w1] from two consecutive doubles.
inline __m256d dup_pairs(const double* w) {
  const __m256d v = _mm256_castpd128_pd256(_mm_loadu_pd(w));
  return _mm256_permute4x64_pd(v, 0x50);
}

void cmul(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d r = cmul2(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i)));
    _mm256_storeu_pd(dp(out + i), r);
  }
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

void cscale_real(cplx* io, const double* m, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(dp(io + i));
    _mm256_storeu_pd(dp(io + i), _mm256_mul_pd(v, dup_pairs(m + i)));
  }
  for (; i < n; ++i) io[i] = cplx(io[i].real() * m[i], io[i].imag() * m[i]);
}

void caxpy_weighted(cplx* acc, cplx alpha, const cplx* x, const double* w, std::size_t n) {
  const __m256d al = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_mul_pd(_mm256_loadu_pd(dp(x + i)), dup_pairs(w + i));
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(dp(acc + i)), cmul2(al, xv));
    _mm256_storeu_pd(dp(acc + i), r);
  }
  const double ar = alpha.real(), ai = alpha.imag();
  for (; i < n; ++i) {
    const double xr = x[i].real() * w[i], xi = x[i].imag() * w[i];
    acc[i] = cplx(acc[i].real() + (ar * xr - ai * xi), acc[i].imag() + (ar * xi + ai * xr));
  }
}

cplx cdotc_weighted(const cplx* x, const cplx* y, const double* w, std::size_t n) {
  // conj(x) y = (xr yr + xi yi) + i (xr yi - xi yr)
  __m256d s_same = _mm256_setzero_pd();  // lanes: xr*yr, xi*yi
  __m256d s_swap = _mm256_setzero_pd();  // lanes: xr*yi, xi*yr
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_mul_pd(_mm256_loadu_pd(dp(x + i)), dup_pairs(w + i));
    const __m256d yv = _mm256_loadu_pd(dp(y + i));
    s_same = _mm256_fmadd_pd(xv, yv, s_same);
    s_swap = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), s_swap);
  }
  alignas(32) double a[4], b[4];
  _mm256_store_pd(a, s_same);
  _mm256_store_pd(b, s_swap);
  double sr = (a[0] + a[2]) + (a[1] + a[3]);
  double si = (b[0] + b[2]) - (b[1] + b[3]);
  for (; i < n; ++i) {
    const double xr = x[i].real() * w[i], xi = x[i].imag() * w[i];
    sr += xr * y[i].real() + xi * y[i].imag();
    si += xr * y[i].imag() - xi * y[i].real();
  }
  return {sr, si};
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  alignas(32) double a[4];
  _mm256_store_pd(a, _mm256_add_pd(s0, s1));
  double s = (a[0] + a[1]) + (a[2] + a[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpby(double* y, const double* x, double b, std::size_t n) {
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(bv, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = x[i] + b * y[i];
}

void strip_cell_flux(const StripCellArgs& s) {
  const __m256d idz = _mm256_set1_pd(s.inv_dz);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t p = 0;
  if (s.dim == 1) {
    for (; p + 4 <= s.count; p += 4) {
      const __m256d a = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(s.v_hi + p), _mm256_loadu_pd(s.v_lo + p)), idz);
      const __m256d b0 = _mm256_loadu_pd(s.b[0] + p);
      const __m256d g0 = _mm256_mul_pd(half, _mm256_add_pd(_mm256_loadu_pd(s.g_lo[0] + p), _mm256_loadu_pd(s.g_hi[0] + p)));
      const __m256d f = _mm256_fnmadd_pd(b0, g0, _mm256_mul_pd(_mm256_loadu_pd(s.zeta + p), a));
      _mm256_storeu_pd(s.flux + p, f);
      _mm256_storeu_pd(s.hflux[0] + p, _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(a, b0)));
    }
  } else {
    for (; p + 4 <= s.count; p += 4) {
      const __m256d a = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(s.v_hi + p), _mm256_loadu_pd(s.v_lo + p)), idz);
      __m256d f = _mm256_mul_pd(_mm256_loadu_pd(s.zeta + p), a);
      for (int m = 0; m < 2; ++m) {
        const __m256d bm = _mm256_loadu_pd(s.b[m] + p);
        const __m256d gm =
            _mm256_mul_pd(half, _mm256_add_pd(_mm256_loadu_pd(s.g_lo[m] + p), _mm256_loadu_pd(s.g_hi[m] + p)));
        f = _mm256_fnmadd_pd(bm, gm, f);
        _mm256_storeu_pd(s.hflux[m] + p, _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(a, bm)));
      }
      _mm256_storeu_pd(s.flux + p, f);
    }
  }
  for (; p < s.count; ++p) {
    const double a = (s.v_hi[p] - s.v_lo[p]) * s.inv_dz;
    double f = s.zeta[p] * a;
    for (int m = 0; m < s.dim; ++m) {
      f -= s.b[m][p] * (0.5 * (s.g_lo[m][p] + s.g_hi[m][p]));
      s.hflux[m][p] = -a * s.b[m][p];
    }
    s.flux[p] = f;
  }
}

void tridiag_solve(const TridiagArgs& t) {
  const std::size_t nm = t.modes;
  cplx* x = t.x;
  cscale_real(x, t.inv_den, nm);
  for (std::size_t i = 1; i < t.levels; ++i) {
    const __m256d off = _mm256_set1_pd(t.off[i - 1]);
    double* xi = dp(x + i * nm);
    const double* xp = dp(x + (i - 1) * nm);
    const double* id = t.inv_den + i * nm;
    std::size_t k = 0;
    for (; k + 2 <= nm; k += 2) {
      const __m256d r = _mm256_fnmadd_pd(off, _mm256_loadu_pd(xp + 2 * k), _mm256_loadu_pd(xi + 2 * k));
      _mm256_storeu_pd(xi + 2 * k, _mm256_mul_pd(r, dup_pairs(id + k)));
    }
    for (; k < nm; ++k) {
      xi[2 * k] = (xi[2 * k] - t.off[i - 1] * xp[2 * k]) * id[k];
      xi[2 * k + 1] = (xi[2 * k + 1] - t.off[i - 1] * xp[2 * k + 1]) * id[k];
    }
  }
  for (std::size_t i = t.levels - 1; i-- > 0;) {
    double* xi = dp(x + i * nm);
    const double* xn = dp(x + (i + 1) * nm);
    const double* cp = t.cp + i * nm;
    std::size_t k = 0;
    for (; k + 2 <= nm; k += 2) {
      const __m256d r = _mm256_fnmadd_pd(dup_pairs(cp + k), _mm256_loadu_pd(xn + 2 * k), _mm256_loadu_pd(xi + 2 * k));
      _mm256_storeu_pd(xi + 2 * k, r);
    }
    for (; k < nm; ++k) {
      xi[2 * k] -= cp[k] * xn[2 * k];
      xi[2 * k + 1] -= cp[k] * xn[2 * k + 1];
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::avx2, cmul,  cscale_real,  caxpy_weighted, cdotc_weighted,
                                 dot,       axpy,  xpby,         strip_cell_flux, tridiag_solve};
  return table;
}

}  // namespace wwlab::simd::detail
