#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wwlab/littlewood_paley.hpp"
#include "wwlab/paradiff.hpp"

using namespace wwlab;

namespace {

SpectralField fn(const Grid& g, double (*f)(double)) {
  return SpectralField::from_function(g, [f](double x, double) { return f(x); });
}
SpectralField cosk(const Grid& g, int k) {
  return SpectralField::from_function(g, [k](double x, double) { return std::cos(k * x); });
}
double diff(const SpectralField& a, const SpectralField& b) { return (a - b).max_abs(); }

SpectralField random_smooth(const Grid& g, int kmax, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::vector<cplx> c(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Wavevector w = g.wavevector(i);
    if (w.norm() <= kmax) c[i] = cplx(n(rng), n(rng)) / (1.0 + w.norm2());
  }
  return SpectralField::from_coefficients(g, c).real_part();
}

}  // namespace

TEST(DyadicCutoff, PlateauValues) {
  const DyadicCutoff& c = default_cutoff();
  EXPECT_EQ(c.kappa(1.0), 1.0);
  EXPECT_EQ(c.kappa(1.1), 1.0);
  EXPECT_EQ(c.kappa(2.0), 0.0);
  EXPECT_EQ(c.kappa(1.9), 0.0);
  EXPECT_NEAR(c.phi(4, 16.0), 1.0, 1e-15);
}

TEST(DyadicCutoff, MonotoneAndBounded) {
  const DyadicCutoff& c = default_cutoff();
  double prev = 1.0;
  for (double t = 0.0; t <= 2.5; t += 1e-3) {
    const double k = c.kappa(t);
    EXPECT_GE(k, 0.0);
    EXPECT_LE(k, 1.0);
    EXPECT_LE(k, prev + 1e-15);
    prev = k;
  }
}

TEST(DyadicCutoff, TelescopingAndPureModes) {
  const DyadicCutoff& c = default_cutoff();
  for (double theta : {0.0, 0.7, 3.3, 17.0, 40.5, 100.0}) {
    for (int J = 0; J <= 7; ++J) {
      double s = 0.0;
      for (int k = 0; k <= J; ++k) s += c.phi(k, theta);
      EXPECT_NEAR(s, c.kappa_k(J, theta), 1e-15);
    }
  }
  for (int j = 1; j <= 8; ++j) {
    const double theta = std::ldexp(1.0, j);
    for (int k = 0; k <= 10; ++k) EXPECT_NEAR(c.phi(k, theta), k == j ? 1.0 : 0.0, 1e-15) << j << ' ' << k;
  }
}

TEST(DyadicBlock, PureModeHitsOneBand) {
  const Grid g(1, 64);
  const SpectralField u = cosk(g, 16);
  EXPECT_LE(diff(dyadic_block(4, u), u), 1e-14);
  EXPECT_LE(dyadic_block(3, u).max_abs(), 1e-14);
  EXPECT_LE(dyadic_block(5, u).max_abs(), 1e-14);
}

TEST(DyadicBlock, NegativeLowPassOfMeanFreeFieldVanishes) {
  const Grid g(1, 32);
  const SpectralField u = cosk(g, 3);
  EXPECT_LE(low_pass(-1, u).max_abs(), 1e-15);
  EXPECT_LE(low_pass(-3, u).max_abs(), 1e-15);
}

TEST(DyadicBlock, ReconstructionAndTelescoping) {
  std::mt19937_64 rng(1);
  for (int dim : {1, 2}) {
    const Grid g(dim, dim == 1 ? 128 : 32);
    const SpectralField u = random_smooth(g, g.n() / 2, rng);
    const int jmax = static_cast<int>(std::ceil(std::log2(g.n())));
    SpectralField sum(g);
    for (int j = 0; j <= jmax; ++j) {
      sum += dyadic_block(j, u);
      EXPECT_LE(diff(sum, low_pass(j, u)), 1e-12 * u.max_abs());
    }
    EXPECT_LE(diff(sum, u), 1e-12 * u.max_abs());
    const auto blocks = dyadic_decomposition(u);
    SpectralField total(g);
    for (const auto& b : blocks) total += b;
    EXPECT_LE(diff(total, u), 1e-12 * u.max_abs());
  }
}

TEST(BesovNorm, SingleBandValues) {
  const Grid g(1, 64);
  const SpectralField u = cosk(g, 16);
  EXPECT_NEAR(besov_norm(u, {0.5, Exponent::inf, Exponent::inf}), 4.0, 1e-12);
  EXPECT_NEAR(zygmund_norm(u, 0.5), 4.0, 1e-12);
  EXPECT_NEAR(besov_norm(u, {1.0, Exponent::inf, Exponent::one}), 16.0, 1e-12);
  EXPECT_NEAR(b_norm(u, 1.0), 16.0, 1e-12);
  EXPECT_EQ(besov_norm(SpectralField(g), {1.0, Exponent::two, Exponent::two}), 0.0);
}

TEST(BesovNorm, BlockTableRows) {
  const Grid g(1, 64);
  const auto rows = block_table(cosk(g, 16), {1.0, Exponent::inf, Exponent::inf});
  bool found = false;
  for (const auto& r : rows) {
    if (r.j == 4) {
      found = true;
      EXPECT_NEAR(r.block, 1.0, 1e-12);
      EXPECT_NEAR(r.weighted, 16.0, 1e-12);
    } else {
      EXPECT_LE(r.block, 1e-13);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Paraproduct, Examples) {
  const Grid g(1, 64);
  const SpectralField one = SpectralField::from_function(g, [](double, double) { return 1.0; });
  const SpectralField c1 = fn(g, [](double x) { return std::cos(x); });
  EXPECT_LE(diff(paraproduct(one, cosk(g, 8)), cosk(g, 8)), 1e-13);
  const SpectralField expect = SpectralField::from_function(g, [](double x, double) { return std::cos(x) * std::cos(16 * x); });
  EXPECT_LE(diff(paraproduct(c1, cosk(g, 16)), expect), 1e-13);
  EXPECT_LE(paraproduct(c1, c1).max_abs(), 1e-14);
}

TEST(BonyRemainder, Examples) {
  const Grid g(1, 64);
  const SpectralField one = SpectralField::from_function(g, [](double, double) { return 1.0; });
  const SpectralField c1 = fn(g, [](double x) { return std::cos(x); });
  const SpectralField sq = fn(g, [](double x) { return std::cos(x) * std::cos(x); });
  EXPECT_LE(diff(bony_remainder(c1, c1), sq), 1e-13);
  EXPECT_LE(bony_remainder(SpectralField(g), cosk(g, 5)).max_abs(), 1e-15);
  EXPECT_LE(bony_remainder(one, cosk(g, 8)).max_abs(), 1e-13);
}

TEST(BonyRemainder, IdentityOnRandomSuite) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const Grid g(trial % 2 ? 2 : 1, trial % 2 ? 32 : 128);
    const SpectralField a = random_smooth(g, g.n() / 2, rng), u = random_smooth(g, g.n() / 2, rng);
    const SpectralField lhs = product(a, u);
    const SpectralField rhs = paraproduct(a, u) + paraproduct(u, a) + bony_remainder(a, u);
    EXPECT_LE(diff(lhs, rhs), 1e-12 * std::max(1.0, lhs.max_abs()));
  }
}

TEST(BonyRemainder, SpectralSupport) {
  const Grid g(1, 512);
  for (int i = 1; i <= 3; ++i) {
    const SpectralField a = random_band_field(g, i, 100 + i);
    // Far-apart bands: no diagonal interaction at all.
    const SpectralField far = random_band_field(g, i + 5, 200 + i);
    EXPECT_LE(bony_remainder(a, far).max_abs(), 1e-12 * a.max_abs() * far.max_abs());
    // Nearby bands: output confined to |k| below the top interacting band.
    const SpectralField near = random_band_field(g, i + 1, 300 + i);
    const auto c = bony_remainder(a, near).coefficients();
    const double limit = 1.9 * std::ldexp(1.0, i + 1 + 2);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (g.wavevector(k).norm() > limit) {
        EXPECT_LE(std::abs(c[k]), 1e-13);
      }
    }
  }
}

TEST(Paraproduct, BoundednessConstant) {
  std::mt19937_64 rng(9);
  const Grid g(1, 256);
  double k_fit = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralField a = random_smooth(g, 20, rng), u = random_smooth(g, 100, rng);
    for (double s : {0.5, 1.0, 2.0}) {
      const double ratio = zygmund_norm(paraproduct(a, u), s) / (a.max_abs() * zygmund_norm(u, s));
      k_fit = std::max(k_fit, ratio);
    }
  }
  EXPECT_LT(k_fit, 3.0);
}

TEST(Paraproduct, LowFrequencyCutoffOption) {
  const Grid g(1, 64);
  EXPECT_EQ(low_frequency_cutoff(0.1), 0.0);
  EXPECT_EQ(low_frequency_cutoff(0.3), 1.0);
  const SpectralField a = fn(g, [](double x) { return 1.0 + 0.5 * std::sin(x); });
  const SpectralField u = SpectralField::from_function(g, [](double x, double) { return 2.0 + std::cos(9 * x); });
  // psi(D) only removes the mean of u.
  const SpectralField with = paraproduct(a, u, {true, nullptr});
  const SpectralField without = paraproduct(a, remove_mean(u));
  EXPECT_LE(diff(with, without), 1e-13);
}
