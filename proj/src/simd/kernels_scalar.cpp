#include "kernels_impl.hpp"

namespace wwlab::simd::detail {

namespace {

void cmul(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

void cscale_real(cplx* io, const double* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) io[i] = cplx(io[i].real() * m[i], io[i].imag() * m[i]);
}

void caxpy_weighted(cplx* acc, cplx alpha, const cplx* x, const double* w, std::size_t n) {
  const double ar = alpha.real(), ai = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real() * w[i], xi = x[i].imag() * w[i];
    acc[i] = cplx(acc[i].real() + (ar * xr - ai * xi), acc[i].imag() + (ar * xi + ai * xr));
  }
}

cplx cdotc_weighted(const cplx* x, const cplx* y, const double* w, std::size_t n) {
  double sr = 0.0, si = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real() * w[i], xi = x[i].imag() * w[i];
    sr += xr * y[i].real() + xi * y[i].imag();
    si += xr * y[i].imag() - xi * y[i].real();
  }
  return {sr, si};
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(double* y, const double* x, double b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void strip_cell_flux(const StripCellArgs& s) {
  for (std::size_t p = 0; p < s.count; ++p) {
    const double a = (s.v_hi[p] - s.v_lo[p]) * s.inv_dz;
    double f = s.zeta[p] * a;
    for (int m = 0; m < s.dim; ++m) {
      const double gbar = 0.5 * (s.g_lo[m][p] + s.g_hi[m][p]);
      f -= s.b[m][p] * gbar;
      s.hflux[m][p] = -a * s.b[m][p];
    }
    s.flux[p] = f;
  }
}

void tridiag_solve(const TridiagArgs& t) {
  const std::size_t nm = t.modes;
  cplx* x = t.x;
  for (std::size_t k = 0; k < nm; ++k) x[k] *= t.inv_den[k];
  for (std::size_t i = 1; i < t.levels; ++i) {
    const double off = t.off[i - 1];
    cplx* xi = x + i * nm;
    const cplx* xp = x + (i - 1) * nm;
    const double* id = t.inv_den + i * nm;
    for (std::size_t k = 0; k < nm; ++k) xi[k] = (xi[k] - off * xp[k]) * id[k];
  }
  for (std::size_t i = t.levels - 1; i-- > 0;) {
    cplx* xi = x + i * nm;
    const cplx* xn = x + (i + 1) * nm;
    const double* cp = t.cp + i * nm;
    for (std::size_t k = 0; k < nm; ++k) xi[k] -= cp[k] * xn[k];
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, cmul,  cscale_real,  caxpy_weighted, cdotc_weighted,
                                 dot,         axpy,  xpby,         strip_cell_flux, tridiag_solve};
  return table;
}

}  // namespace wwlab::simd::detail
