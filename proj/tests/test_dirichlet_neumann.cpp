#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "wwlab/dirichlet_neumann.hpp"
#include "wwlab/dn_paralinearized.hpp"

using namespace wwlab;

namespace {

SpectralField fx(const Grid& g, std::function<double(double)> f) {
  return SpectralField::from_function(g, [f](double x, double) { return f(x); });
}
double diff(const SpectralField& a, const SpectralField& b) { return (a - b).max_abs(); }
SpectralField wavy(const Grid& g, double a = 0.1) {
  return fx(g, [a](double x) { return a * std::cos(x) + 0.3 * a * std::sin(2 * x); });
}
DnOptions levels(int m) {
  DnOptions o;
  o.levels = m;
  return o;
}

}  // namespace

TEST(Straightening, LinearMapExamples) {
  const Grid g(1, 32);
  const SpectralField eta = wavy(g);
  const StraighteningMap map(eta, 1.0, 8, StraighteningMode::linear);
  const auto e = eta.real_values();
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(map.rho(8)[j], e[j], 1e-14);
    EXPECT_NEAR(map.rho(0)[j], -1.0, 1e-14);
    EXPECT_NEAR(map.rho_z(4)[j], e[j] + 1.0, 1e-14);
  }
  EXPECT_NEAR(map.min_rho_z(), 1.0 - 0.1 * 1.0 - 0.0, 0.05);
  EXPECT_GT(map.min_rho_z(), 0.0);
}

// The smoothing map's bottom is the translated surface eta - h.
TEST(Straightening, SmoothingMapMatchesEndpoints) {
  const Grid g(1, 32);
  const SpectralField eta = wavy(g);
  const StraighteningMap map(eta, 1.0, 8, StraighteningMode::smoothing);
  EXPECT_GT(map.delta(), 0.0);
  EXPECT_LE(map.delta(), 1.0);
  const auto e = eta.real_values();
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(map.rho(8)[j], e[j], 1e-12);
    EXPECT_NEAR(map.rho(0)[j], e[j] - 1.0, 1e-12);
  }
}

TEST(Straightening, RejectsTouchingBottom) {
  const Grid g(1, 32);
  const SpectralField eta = fx(g, [](double x) { return 1.5 * std::cos(x); });
  EXPECT_THROW(StraighteningMap(eta, 1.0, 8, StraighteningMode::linear), StraighteningError);
}

TEST(Coefficients, FlatSurface) {
  const Grid g(1, 16);
  const StraighteningMap map(SpectralField(g), 2.0, 8, StraighteningMode::linear);
  const EllipticCoefficients c = elliptic_coefficients(map);
  for (std::size_t i = 0; i < c.alpha.size(); ++i) {
    EXPECT_NEAR(c.alpha[i], 4.0, 1e-14);
    EXPECT_NEAR(c.beta[0][i], 0.0, 1e-14);
    EXPECT_NEAR(c.gamma[i], 0.0, 1e-14);
  }
}

TEST(Coefficients, TiltedSurfaceFormula) {
  const Grid g(1, 32);
  const SpectralField eta = wavy(g, 0.2);
  const StraighteningMap map(eta, 1.0, 8, StraighteningMode::linear);
  const EllipticCoefficients c = elliptic_coefficients(map);
  const std::size_t p = g.size();
  for (int i = 0; i <= 8; ++i) {
    for (std::size_t j = 0; j < p; j += 5) {
      const double rz = map.rho_z(i)[j], gr = map.grad_rho(0, i)[j];
      EXPECT_NEAR(c.alpha[i * p + j], rz * rz / (1 + gr * gr), 1e-13);
      EXPECT_NEAR(c.beta[0][i * p + j], -2 * rz * gr / (1 + gr * gr), 1e-13);
    }
  }
}

TEST(FlatDn, MatchesTanhMultiplier) {
  const Grid g(1, 256);
  const SpectralField f = fx(g, [](double x) { return std::cos(3 * x); });
  const SpectralField exact = dn_flat_exact(f, 1.0);
  EXPECT_NEAR(exact.max_abs(), 3 * std::tanh(3.0), 1e-12);
  const SpectralField gf = dn_apply(SpectralField(g), f, 1.0, levels(64));
  EXPECT_LE(diff(gf, exact) / exact.max_abs(), 1e-3);
}

TEST(FlatDn, SecondOrderInLevels) {
  const Grid g(1, 64);
  const SpectralField f = fx(g, [](double x) { return std::cos(3 * x); });
  const SpectralField exact = dn_flat_exact(f, 1.0);
  const double e16 = diff(dn_apply(SpectralField(g), f, 1.0, levels(16)), exact);
  const double e32 = diff(dn_apply(SpectralField(g), f, 1.0, levels(32)), exact);
  EXPECT_NEAR(e16 / e32, 4.0, 0.5);
}

TEST(FlatDn, HarmonicLiftIsCoshProfile) {
  const Grid g(1, 64);
  const double h = 1.0;
  const SpectralField f = fx(g, [](double x) { return std::cos(2 * x); });
  const DirichletNeumann dn(SpectralField(g), h, levels(64));
  const HarmonicLift lift = dn.solve(f);
  for (int i : {0, 16, 32, 48, 64}) {
    const double y = lift.strip.z(i) * h;
    const double amp = std::cosh(2 * (y + h)) / std::cosh(2 * h);
    EXPECT_NEAR(lift.level(i).max_abs(), amp, 2e-3) << i;
  }
}

TEST(Dn, ConstantHasZeroImage) {
  const Grid g(1, 64);
  const SpectralField c = fx(g, [](double) { return 2.5; });
  EXPECT_LE(dn_apply(wavy(g), c, 1.0, levels(16)).max_abs(), 1e-10);
}

TEST(Dn, MaximumPrinciple) {
  const Grid g(1, 64);
  const SpectralField f = fx(g, [](double x) { return std::cos(x) + 0.5 * std::sin(3 * x); });
  const DirichletNeumann dn(wavy(g), 1.0, levels(32));
  const HarmonicLift lift = dn.solve(f);
  EXPECT_LE(lift.max_abs(), f.max_abs() * (1 + 1e-2));
  EXPECT_LE(lift.relative_residual, 1e-10);
}

TEST(Dn, SymmetricAndPositive) {
  const Grid g(1, 64);
  const DirichletNeumann dn(wavy(g, 0.15), 1.0, levels(16));
  const SpectralField a = fx(g, [](double x) { return std::cos(2 * x) + 0.3 * std::sin(5 * x); });
  const SpectralField b = fx(g, [](double x) { return std::sin(x) - 0.2 * std::cos(7 * x); });
  const double ab = inner_product(a, dn.apply(b)).real();
  const double ba = inner_product(b, dn.apply(a)).real();
  EXPECT_NEAR(ab, ba, 1e-10 * sobolev_norm(a, 0.5) * sobolev_norm(b, 0.5));
  EXPECT_GT(inner_product(a, dn.apply(a)).real(), 0.0);
  EXPECT_GT(inner_product(b, dn.apply(b)).real(), 0.0);
}

TEST(Dn, FluxEqualsEnergy) {
  const Grid g(1, 64);
  const SpectralField f = fx(g, [](double x) { return std::cos(2 * x) + 0.1 * std::sin(6 * x); });
  const EnergyFlux ef = energy_and_flux(wavy(g), f, 1.0, levels(32));
  EXPECT_GT(ef.energy_squared, 0.0);
  EXPECT_LE(ef.mismatch, 1e-8 * ef.energy_squared);
  EXPECT_NEAR(ef.energy(), std::sqrt(ef.energy_squared), 1e-14);
}

TEST(Dn, FlatFluxOracle) {
  const Grid g(1, 128);
  const int k = 2;
  const SpectralField f = fx(g, [](double x) { return std::cos(k * x); });
  const EnergyFlux ef = energy_and_flux(SpectralField(g), f, 1.0, levels(128));
  EXPECT_NEAR(ef.flux, kPi * k * std::tanh(k), 1e-3);
}

TEST(Dn, RichardsonImprovesError) {
  const Grid g(1, 64);
  const SpectralField f = fx(g, [](double x) { return std::cos(3 * x); });
  const SpectralField exact = dn_flat_exact(f, 1.0);
  const SpectralField g16 = dn_apply(SpectralField(g), f, 1.0, levels(16));
  const SpectralField g32 = dn_apply(SpectralField(g), f, 1.0, levels(32));
  const SpectralField rich = (4.0 / 3.0) * g32 - (1.0 / 3.0) * g16;
  EXPECT_LT(diff(rich, exact), 0.1 * diff(g32, exact));
}

TEST(Dn, DivergenceFormTraceAgreesWithPointwise) {
  const Grid g(1, 64);
  const DirichletNeumann dn(wavy(g), 1.0, levels(32));
  const HarmonicLift lift = dn.solve(fx(g, [](double x) { return std::sin(2 * x); }));
  EXPECT_LE(diff(dn.divergence_form_trace(lift), dn.pointwise_trace(lift)), 1e-8);
}

TEST(Dn, ConormalTraceCloseToPointwiseTrace) {
  const Grid g(1, 64);
  const DirichletNeumann dn(wavy(g), 1.0, levels(64));
  const HarmonicLift lift = dn.solve(fx(g, [](double x) { return std::sin(2 * x); }));
  const SpectralField c = dn.conormal_trace(lift);
  EXPECT_LE(diff(c, remove_mean(dn.pointwise_trace(lift))), 1e-2 * c.max_abs());
}

// The two maps have different bottoms; in deep water the bottom is invisible.
TEST(Dn, SmoothingStraighteningAgreesInDeepWater) {
  const Grid g(1, 64);
  const SpectralField eta = wavy(g);
  const SpectralField f = fx(g, [](double x) { return std::cos(2 * x); });
  DnOptions lin = levels(64), sm = levels(64);
  sm.mode = StraighteningMode::smoothing;
  const SpectralField a = dn_apply(eta, f, 4.0, lin), b = dn_apply(eta, f, 4.0, sm);
  EXPECT_LE(diff(a, b), 5e-3 * a.max_abs());
}

TEST(Dn, TwoDimensionalFlatOracle) {
  const Grid g(2, 32);
  const SpectralField f = SpectralField::from_function(g, [](double x, double y) { return std::cos(x + 2 * y); });
  const SpectralField exact = dn_flat_exact(f, 1.0);
  const SpectralField gf = dn_apply(SpectralField(g), f, 1.0, levels(32));
  EXPECT_LE(diff(gf, exact) / exact.max_abs(), 5e-3);
}

TEST(Dn, ShapeDerivativeMatchesFiniteDifference) {
  const Grid g(1, 64);
  const SpectralField eta = wavy(g);
  const SpectralField psi = fx(g, [](double x) { return std::sin(2 * x); });
  const SpectralField f = fx(g, [](double x) { return 0.5 * std::cos(3 * x); });
  const DnOptions o = levels(32);
  const double e = 1e-5;
  const SpectralField fd =
      (1.0 / (2 * e)) * (dn_apply(eta + e * f, psi, 1.0, o) - dn_apply(eta - e * f, psi, 1.0, o));
  const SpectralField sd = shape_derivative(eta, psi, f, 1.0, o);
  EXPECT_LE(diff(fd, sd), 2e-2 * fd.max_abs());
}

TEST(Dn, KineticGradientMatchesFiniteDifference) {
  const Grid g(1, 32);
  const SpectralField eta = wavy(g);
  const SpectralField psi = fx(g, [](double x) { return std::sin(2 * x) + 0.2 * std::cos(x); });
  const SpectralField f = fx(g, [](double x) { return std::cos(3 * x); });
  const DnOptions o = levels(16);
  auto kin = [&](const SpectralField& e) {
    return 0.5 * integrate(pointwise_product(psi, dn_apply(e, psi, 1.0, o))).real();
  };
  const double h = 1e-5;
  const double fd = (kin(eta + h * f) - kin(eta - h * f)) / (2 * h);
  const SpectralField grad = DirichletNeumann(eta, 1.0, o).kinetic_gradient(psi);
  const double an = integrate(pointwise_product(grad, f)).real();
  EXPECT_NEAR(an, fd, 1e-7 * std::max(1.0, std::abs(fd)));
}

TEST(VelocityTraces, FlatSurface) {
  const Grid g(1, 32);
  const SpectralField psi = fx(g, [](double x) { return std::cos(x); });
  const SpectralField gpsi = dn_flat_exact(psi, 1.0);
  const VelocityTraces vt = velocity_traces(SpectralField(g), psi, gpsi);
  EXPECT_LE(diff(vt.b, gpsi), 1e-14);
  EXPECT_LE(diff(vt.v[0], gradient(psi)[0]), 1e-14);
}

TEST(Paralinearized, ResidualSmallerThanImage) {
  const Grid g(1, 128);
  const SpectralField eta = fx(g, [](double x) { return 0.05 * std::cos(x); });
  const SpectralField psi = fx(g, [](double x) { return std::cos(8 * x); });
  const ParalinearizedDn p = dn_paralinearized(eta, psi, 1.0, levels(64));
  EXPECT_LE(diff(p.g_psi + (-1.0) * p.residual, p.approx), 1e-12 * p.g_psi.max_abs());
  EXPECT_LT(sobolev_norm(p.residual, 0.0), 0.1 * sobolev_norm(p.g_psi, 0.0));
}

TEST(Paralinearized, FlatSurfaceIsExactUpToCutoff) {
  const Grid g(1, 64);
  const SpectralField psi = fx(g, [](double x) { return std::cos(8 * x); });
  const ParalinearizedDn p = dn_paralinearized(SpectralField(g), psi, 1.0, levels(64));
  EXPECT_LE(diff(p.good, psi), 1e-13);
  EXPECT_LT(sobolev_norm(p.residual, 0.0), 1e-2 * sobolev_norm(p.g_psi, 0.0));
}

TEST(StripIo, HeaderAndRowCount) {
  const Grid g(1, 8);
  const DirichletNeumann dn(SpectralField(g), 1.0, levels(8));
  std::ostringstream os;
  write_strip(os, dn.solve(fx(g, [](double x) { return std::cos(x); })));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line.rfind("# strip 1 8 8", 0), 0u) << line;
  int rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  EXPECT_EQ(rows, 8 * 9);
}
