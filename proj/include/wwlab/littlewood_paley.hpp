#pragma once

#include <span>
#include <vector>

#include "wwlab/spectral.hpp"

namespace wwlab {

// Smooth radial cutoff: kappa = 1 on |theta| <= 1.1, 0 on |theta| >= 1.9,
// monotone in between. kappa_k(theta) = kappa(2^-k theta) for every integer k,
// phi_0 = kappa_0 and phi_k = kappa_k - kappa_{k-1} for k >= 1.
class DyadicCutoff {
 public:
  static constexpr double kInner = 1.1;
  static constexpr double kOuter = 1.9;

  // `sharpness` scales the exponent of the C-infinity transition profile.
  explicit DyadicCutoff(double sharpness = 1.0);

  double sharpness() const { return sharpness_; }
  double kappa(double theta) const;
  double kappa_k(int k, double theta) const;
  double phi(int k, double theta) const;

 private:
  double sharpness_;
};

const DyadicCutoff& default_cutoff();

// Largest band index that can be nonzero on the grid lattice.
int max_band(const Grid& grid);

SpectralField dyadic_block(int j, const SpectralField& u, const DyadicCutoff& cutoff = default_cutoff());
// S_k u = kappa_k(D) u; on the integer lattice S_k for k < 0 keeps only the mean.
SpectralField low_pass(int k, const SpectralField& u, const DyadicCutoff& cutoff = default_cutoff());
// All blocks Delta_0 .. Delta_J (one forward transform).
std::vector<SpectralField> dyadic_decomposition(const SpectralField& u, const DyadicCutoff& cutoff = default_cutoff());

enum class Exponent { one, two, inf };

struct BesovSpec {
  double s = 0.0;
  Exponent p = Exponent::inf;
  Exponent q = Exponent::inf;
};

struct BlockNorm {
  int j = 0;
  double block = 0.0;     // ||Delta_j u||_{L^p}
  double weighted = 0.0;  // 2^{js} ||Delta_j u||_{L^p}
};

// L^p norms are grid averages (p = 2: sqrt(mean |u|^2)); p = inf is the nodal max.
std::vector<BlockNorm> block_table(const SpectralField& u, const BesovSpec& spec);
double besov_norm(const SpectralField& u, const BesovSpec& spec);
// Vector fields use the pointwise Euclidean magnitude of the block.
std::vector<BlockNorm> block_table(std::span<const SpectralField> u, const BesovSpec& spec);
double besov_norm(std::span<const SpectralField> u, const BesovSpec& spec);

// Zygmund C^s_* = B^s_{inf,inf}; the B^s = B^s_{inf,1} norm used by the monitors.
double zygmund_norm(const SpectralField& u, double s);
double zygmund_norm(std::span<const SpectralField> u, double s);
double b_norm(const SpectralField& u, double s);
double b_norm(std::span<const SpectralField> u, double s);

// Low-frequency cutoff psi(D): 0 for |xi| <= 1/5, 1 for |xi| >= 1/4 (smooth between).
double low_frequency_cutoff(double abs_xi);

struct ParaproductOptions {
  // Apply psi(D) to u first, giving T_a u = T~_a psi(D) u.
  bool low_frequency_cutoff = false;
  const DyadicCutoff* cutoff = nullptr;
};

// T~_a u = sum_k S_{k-3} a Delta_k u, each band product dealiased.
SpectralField paraproduct(const SpectralField& a, const SpectralField& u, const ParaproductOptions& opts = {});
// R(a, u) = dealias(a u) - T~_a u - T~_u a.
SpectralField bony_remainder(const SpectralField& a, const SpectralField& u, const ParaproductOptions& opts = {});

}  // namespace wwlab
