#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "wwlab/symmetrizer.hpp"

using namespace wwlab;

namespace {

SpectralField fx(const Grid& g, std::function<double(double)> f) {
  return SpectralField::from_function(g, [f](double x, double) { return f(x); });
}
double diff(const SpectralField& a, const SpectralField& b) { return (a - b).max_abs(); }
SurfaceState make_state(const Grid& g, double a, double b, double gravity = 1.0, double depth = 1.0) {
  SurfaceState s;
  s.eta = fx(g, [a](double x) { return a * std::cos(x) + 0.3 * a * std::sin(3 * x); });
  s.psi = fx(g, [b](double x) { return b * std::sin(2 * x); });
  s.params = {gravity, depth};
  return s;
}
SymmetrizerOptions opts_m(int m) {
  SymmetrizerOptions o;
  o.dn.levels = m;
  return o;
}

}  // namespace

TEST(Symmetrizer, DefaultIndexAboveThreshold) {
  EXPECT_DOUBLE_EQ(default_sobolev_index(1), 2.1);
  EXPECT_DOUBLE_EQ(default_sobolev_index(2), 2.6);
  SymmetrizerOptions o;
  EXPECT_DOUBLE_EQ(o.index(1), 2.1);
  o.s = 3.0;
  EXPECT_DOUBLE_EQ(o.index(2), 3.0);
}

TEST(GoodUnknown, FlatSurfaceIsPsi) {
  const Grid g(1, 64);
  SurfaceState s = make_state(g, 0.0, 0.1);
  const GoodUnknown u = good_unknown(s, opts_m(32).dn);
  EXPECT_LE(diff(u.u, s.psi), 1e-14);
}

TEST(GoodUnknown, LinearInPsiForFixedSurface) {
  const Grid g(1, 64);
  SurfaceState s = make_state(g, 0.05, 0.1);
  const SpectralField u1 = good_unknown(s, opts_m(32).dn).u;
  s.psi *= 2.0;
  const SpectralField u2 = good_unknown(s, opts_m(32).dn).u;
  EXPECT_LE(diff(u2, 2.0 * u1), 1e-9 * u2.max_abs());
}

// Modes >= 4 at unit depth so tanh(h|xi|) ~ 1, and g = 0 since g eta is not
// part of T_ell eta; what is left of the linear part is the DN discretization.
namespace {
SurfaceState paralin_state(const Grid& g, double a) {
  SurfaceState s;
  s.eta = fx(g, [a](double x) { return a * std::cos(4 * x) + 0.3 * a * std::sin(5 * x); });
  s.psi = fx(g, [a](double x) { return a * std::sin(6 * x); });
  s.params = {0.0, 1.0};
  return s;
}
}  // namespace

TEST(Residuals, SmallForSmoothSmallState) {
  const Grid g(1, 64);
  const SurfaceState s = paralin_state(g, 0.002);
  const SymmetrizerOptions o = opts_m(64);
  const ParalinearResiduals r = paralinearized_residuals(s, o);
  const double sz = sobolev_norm(s.eta, o.index(1) + 0.5) + sobolev_norm(s.psi, o.index(1));
  EXPECT_LE(r.f1_norm + r.f2_norm, 0.2 * sz);
  EXPECT_TRUE(r.f1.is_real(1e-10));
  EXPECT_TRUE(r.f2.is_real(1e-10));
}

TEST(Residuals, CurvatureResidualIsQuadratic) {
  const Grid g(1, 64);
  const SymmetrizerOptions o = opts_m(64);
  const ParalinearResiduals r1 = paralinearized_residuals(paralin_state(g, 0.02), o);
  const ParalinearResiduals r2 = paralinearized_residuals(paralin_state(g, 0.01), o);
  EXPECT_NEAR(r1.f2_norm / r2.f2_norm, 4.0, 0.6);
  // f1 sits at the discretization floor of G(eta) psi.
  EXPECT_LE(r2.f1_norm, 2e-3 * sobolev_norm(dn_flat_exact(paralin_state(g, 0.01).psi, 1.0), o.index(1) + 0.5));
}

TEST(Phi, RestStateIsZero) {
  const Grid g(1, 32);
  const ComplexUnknown c = build_phi(make_state(g, 0.0, 0.0), opts_m(16));
  EXPECT_EQ(c.phi.max_abs(), 0.0);
  EXPECT_DOUBLE_EQ(c.s, 2.1);
}

TEST(Phi, FlatSurfaceSeparatesRealAndImaginaryParts) {
  // Flat surface: Re Phi depends only on eta, Im Phi only on psi.
  const Grid g(1, 64);
  const SymmetrizerOptions o = opts_m(32);
  SurfaceState s = make_state(g, 0.0, 0.1);
  const SpectralField phi_psi = build_phi(s, o).phi;
  EXPECT_LE(phi_psi.real_part().max_abs(), 1e-14);
  EXPECT_GT(phi_psi.imag_part().max_abs(), 0.0);
}

TEST(SymmetrizedResidual, SmallerThanPhiForSmallSolution) {
  const Grid g(1, 32);
  const SurfaceState s = make_state(g, 0.01, 0.01);
  DnOptions dn;
  dn.levels = 16;
  const SurfaceState s1 = step_rk4(s, 1e-3, dn);
  const SymmetrizedResidual r = symmetrized_residual(s, s1, opts_m(16));
  EXPECT_NEAR(r.t, 5e-4, 1e-15);
  EXPECT_GT(r.phi_l2, 0.0);
  EXPECT_LT(r.f_l2, r.phi_l2);
}

TEST(EnergyPhi, RatiosBoundedAcrossStates) {
  const Grid g(1, 64);
  const SymmetrizerOptions o = opts_m(16);
  for (double a : {0.005, 0.01, 0.02, 0.04}) {
    const PhiEnergy e = energy_phi(make_state(g, a, 2 * a), o);
    EXPECT_GT(e.upper_ratio(), 0.05) << a;
    EXPECT_LT(e.upper_ratio(), 20.0) << a;
    EXPECT_GT(e.lower_ratio(), 0.05) << a;
  }
}

TEST(EnergyPhi, HomogeneousForLinearData) {
  const Grid g(1, 64);
  const SymmetrizerOptions o = opts_m(16);
  const PhiEnergy e1 = energy_phi(make_state(g, 1e-4, 1e-4), o);
  const PhiEnergy e2 = energy_phi(make_state(g, 2e-4, 2e-4), o);
  EXPECT_NEAR(e1.upper_ratio(), e2.upper_ratio(), 1e-3 * e1.upper_ratio());
}

TEST(ResidualCsv, HeaderAndRows) {
  std::ostringstream os;
  write_residual_csv(os, {{0.0, 1.0, 2.0, 3.0, 4.0}, {0.1, 1.5, 2.5, 3.5, 4.5}});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,f1,f2,F,phi");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 2);
}
