#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "wwlab/dirichlet_neumann.hpp"
#include "wwlab/simd/kernels.hpp"

using namespace wwlab;
using simd::cplx;

namespace {

const simd::KernelTable* avx2_or_skip() { return simd::avx2_kernels(); }

std::vector<double> reals(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<cplx> complexes(std::size_t n, unsigned seed) {
  const auto re = reals(n, seed), im = reals(n, seed + 1000);
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {re[i], im[i]};
  return v;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0, s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(a[i]));
  }
  return m / std::max(s, 1e-300);
}

double max_rel(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0, s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(a[i]));
  }
  return m / std::max(s, 1e-300);
}

// Odd lengths exercise the scalar tails of the vector loops.
const std::size_t kSizes[] = {1, 3, 4, 7, 64, 131};

}  // namespace

TEST(Simd, ScalarTableIsScalar) { EXPECT_EQ(simd::scalar_kernels().isa, simd::Isa::scalar); }

TEST(Simd, ComplexKernelsMatchScalar) {
  const auto* v = avx2_or_skip();
  if (!v) GTEST_SKIP() << "AVX2 not available";
  const auto& s = simd::scalar_kernels();
  for (std::size_t n : kSizes) {
    const auto a = complexes(n, 1), b = complexes(n, 2);
    const auto w = reals(n, 3);
    std::vector<cplx> o1(n), o2(n);
    s.cmul(o1.data(), a.data(), b.data(), n);
    v->cmul(o2.data(), a.data(), b.data(), n);
    EXPECT_LE(max_rel(o1, o2), 1e-15) << n;

    o1 = a;
    o2 = a;
    s.cscale_real(o1.data(), w.data(), n);
    v->cscale_real(o2.data(), w.data(), n);
    EXPECT_LE(max_rel(o1, o2), 1e-15) << n;

    o1 = b;
    o2 = b;
    s.caxpy_weighted(o1.data(), cplx(0.3, -0.7), a.data(), w.data(), n);
    v->caxpy_weighted(o2.data(), cplx(0.3, -0.7), a.data(), w.data(), n);
    EXPECT_LE(max_rel(o1, o2), 1e-14) << n;

    const cplx d1 = s.cdotc_weighted(a.data(), b.data(), w.data(), n);
    const cplx d2 = v->cdotc_weighted(a.data(), b.data(), w.data(), n);
    EXPECT_LE(std::abs(d1 - d2), 1e-13 * (1.0 + std::abs(d1))) << n;
  }
}

TEST(Simd, RealKernelsMatchScalar) {
  const auto* v = avx2_or_skip();
  if (!v) GTEST_SKIP() << "AVX2 not available";
  const auto& s = simd::scalar_kernels();
  for (std::size_t n : kSizes) {
    const auto x = reals(n, 4), y = reals(n, 5);
    EXPECT_NEAR(s.dot(x.data(), y.data(), n), v->dot(x.data(), y.data(), n), 1e-13 * n);
    std::vector<double> y1 = y, y2 = y;
    s.axpy(y1.data(), 0.25, x.data(), n);
    v->axpy(y2.data(), 0.25, x.data(), n);
    EXPECT_LE(max_rel(y1, y2), 1e-15);
    y1 = y;
    y2 = y;
    s.xpby(y1.data(), x.data(), -1.5, n);
    v->xpby(y2.data(), x.data(), -1.5, n);
    EXPECT_LE(max_rel(y1, y2), 1e-15);
  }
}

TEST(Simd, StripCellFluxMatchesScalar) {
  const auto* v = avx2_or_skip();
  if (!v) GTEST_SKIP() << "AVX2 not available";
  for (int dim : {1, 2}) {
    for (std::size_t n : kSizes) {
      const auto vlo = reals(n, 10), vhi = reals(n, 11), zeta = reals(n, 12);
      const auto g0l = reals(n, 13), g0h = reals(n, 14), g1l = reals(n, 15), g1h = reals(n, 16);
      const auto b0 = reals(n, 17), b1 = reals(n, 18);
      std::vector<double> f1(n), f2(n), h01(n), h02(n), h11(n), h12(n);
      auto args = [&](std::vector<double>& f, std::vector<double>& h0, std::vector<double>& h1) {
        simd::StripCellArgs a;
        a.count = n;
        a.dim = dim;
        a.inv_dz = 16.0;
        a.v_lo = vlo.data();
        a.v_hi = vhi.data();
        a.g_lo[0] = g0l.data();
        a.g_hi[0] = g0h.data();
        a.g_lo[1] = g1l.data();
        a.g_hi[1] = g1h.data();
        a.zeta = zeta.data();
        a.b[0] = b0.data();
        a.b[1] = b1.data();
        a.flux = f.data();
        a.hflux[0] = h0.data();
        a.hflux[1] = dim == 2 ? h1.data() : nullptr;
        return a;
      };
      simd::scalar_kernels().strip_cell_flux(args(f1, h01, h11));
      v->strip_cell_flux(args(f2, h02, h12));
      EXPECT_LE(max_rel(f1, f2), 1e-14);
      EXPECT_LE(max_rel(h01, h02), 1e-14);
      if (dim == 2) {
        EXPECT_LE(max_rel(h11, h12), 1e-14);
      }
    }
  }
}

TEST(Simd, TridiagonalSolveMatchesScalar) {
  const auto* v = avx2_or_skip();
  if (!v) GTEST_SKIP() << "AVX2 not available";
  const std::size_t levels = 9, modes = 13;
  // Diagonally dominant factors: any positive inv_den, small cp/off.
  auto inv_den = reals(levels * modes, 30), cp = reals(levels * modes, 31), off = reals(levels, 32);
  for (auto& x : inv_den) x = 1.0 + std::abs(x);
  for (auto& x : cp) x *= 0.3;
  const auto rhs = complexes(levels * modes, 33);
  std::vector<cplx> x1 = rhs, x2 = rhs;
  simd::TridiagArgs t;
  t.levels = levels;
  t.modes = modes;
  t.inv_den = inv_den.data();
  t.cp = cp.data();
  t.off = off.data();
  t.x = x1.data();
  simd::scalar_kernels().tridiag_solve(t);
  t.x = x2.data();
  v->tridiag_solve(t);
  EXPECT_LE(max_rel(x1, x2), 1e-13);
}

TEST(Simd, DirichletNeumannAgreesAcrossIsa) {
  if (!avx2_or_skip()) GTEST_SKIP() << "AVX2 not available";
  const Grid g(2, 16);
  const SpectralField eta =
      SpectralField::from_function(g, [](double x, double y) { return 0.1 * std::cos(x) + 0.05 * std::sin(x + 2 * y); });
  const SpectralField f = SpectralField::from_function(g, [](double x, double y) { return std::sin(2 * x - y); });
  DnOptions o;
  o.levels = 16;
  simd::set_active_isa(simd::Isa::scalar);
  const SpectralField a = dn_apply(eta, f, 1.0, o);
  simd::set_active_isa(simd::Isa::avx2);
  const SpectralField b = dn_apply(eta, f, 1.0, o);
  EXPECT_LE((a - b).max_abs(), 1e-11 * a.max_abs());
}

TEST(Simd, UnsupportedIsaRejectedOrAccepted) {
  // Selecting the scalar table always works.
  EXPECT_NO_THROW(simd::set_active_isa(simd::Isa::scalar));
  EXPECT_EQ(simd::active_isa(), simd::Isa::scalar);
  if (simd::avx2_kernels()) {
    simd::set_active_isa(simd::Isa::avx2);
  }
  EXPECT_EQ(simd::isa_name(simd::Isa::scalar), "scalar");
}
