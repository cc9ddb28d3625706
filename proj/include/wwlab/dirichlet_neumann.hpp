#pragma once

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

#include "wwlab/spectral.hpp"

namespace wwlab {

// Map of the fluid layer {-h < y < eta} onto the strip -1 < z < 0.
//   linear:    rho = eta + z (eta + h)
//   smoothing: rho = (1+z) e^{delta z <D>} eta - z (e^{-(1+z) delta <D>} eta - h)
enum class StraighteningMode { linear, smoothing };

struct StripGrid {
  Grid x;
  int levels = 8;  // M; z_i = -1 + i/M, i = 0..M

  double dz() const { return 1.0 / levels; }
  double z(int i) const { return -1.0 + static_cast<double>(i) / levels; }
  double z_cell(int i) const { return -1.0 + (i + 0.5) / levels; }
};

class StraighteningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StraighteningMap {
 public:
  // delta <= 0 picks min(0.1 / ||eta||_{W^{1,inf}}, 1) in smoothing mode.
  StraighteningMap(const SpectralField& eta, double depth, int levels, StraighteningMode mode, double delta = 0.0);

  const StripGrid& strip() const { return strip_; }
  StraighteningMode mode() const { return mode_; }
  double depth() const { return depth_; }
  double delta() const { return delta_; }
  const SpectralField& eta() const { return eta_; }
  double min_rho_z() const { return min_rho_z_; }

  // Level arrays of length N^d. Node index i = 0..M, cell index i = 0..M-1 (z_{i+1/2}).
  std::span<const double> rho(int i) const { return level(rho_, i); }
  std::span<const double> rho_z(int i) const { return level(rho_z_, i); }
  std::span<const double> grad_rho(int axis, int i) const { return level(grad_rho_[axis], i); }
  std::span<const double> rho_z_cell(int i) const { return level(rho_z_cell_, i); }
  std::span<const double> grad_rho_cell(int axis, int i) const { return level(grad_rho_cell_[axis], i); }

  // Second derivatives at node i: d_z^2 rho, Laplacian_x rho, grad_x d_z rho.
  void second_derivatives(int i, std::vector<double>& rho_zz, std::vector<double>& lap_rho,
                          std::vector<double> grad_rho_z[2]) const;

 private:
  std::span<const double> level(const std::vector<double>& a, int i) const {
    const std::size_t p = strip_.x.size();
    return {a.data() + static_cast<std::size_t>(i) * p, p};
  }
  void fill_level(double z, double* rho, double* rho_z, double* g0, double* g1) const;

  StripGrid strip_;
  StraighteningMode mode_;
  double depth_;
  double delta_ = 0.0;
  SpectralField eta_;
  std::vector<cplx> eta_hat_;
  std::vector<SpectralField> grad_eta_;
  std::vector<double> rho_, rho_z_, grad_rho_[2];
  std::vector<double> rho_z_cell_, grad_rho_cell_[2];
  double min_rho_z_ = 0.0;
};

// alpha = rho_z^2/(1+|grad rho|^2), beta = -2 rho_z grad rho/(1+|grad rho|^2),
// gamma = (rho_zz + alpha lap rho + beta . grad rho_z)/rho_z, at the strip nodes.
struct EllipticCoefficients {
  StripGrid strip;
  std::vector<double> alpha;
  std::vector<double> beta[2];
  std::vector<double> gamma;
};

EllipticCoefficients elliptic_coefficients(const StraighteningMap& map);

// Discrete harmonic extension of f into the strip; v[i * N^d + j] at (x_j, z_i).
struct HarmonicLift {
  StripGrid strip;
  std::vector<double> v;
  int iterations = 0;
  double relative_residual = 0.0;

  SpectralField level(int i) const;
  double max_abs() const;
};

struct DnOptions {
  int levels = 0;  // M; 0 picks M = N
  StraighteningMode mode = StraighteningMode::linear;
  double delta = 0.0;
  double tolerance = 1e-12;  // relative residual of the preconditioned CG solve
  int max_iterations = 400;
};

struct EnergyFlux {
  double energy_squared = 0.0;  // E^2
  double flux = 0.0;            // int f G(eta) f
  double mismatch = 0.0;        // |flux - E^2|
  double energy() const;
};

// G(eta) for one surface. The strip problem is discretized variationally:
// the discrete energy is the trapezoid/midpoint quadrature of
//   int int [zeta1 v_z^2 - 2 grad rho . grad v v_z + rho_z |grad v|^2] dx dz,
// zeta1 = (1+|grad rho|^2)/rho_z, with spectral x-derivatives, and G f is the
// discrete conormal flux at z = 0. Consequently int f G f = E^2 exactly,
// G is symmetric and positive, and the bottom carries the natural (Neumann)
// condition.
class DirichletNeumann {
 public:
  DirichletNeumann(const SpectralField& eta, double depth, const DnOptions& opts = {});
  ~DirichletNeumann();
  DirichletNeumann(DirichletNeumann&&) noexcept;
  DirichletNeumann& operator=(DirichletNeumann&&) noexcept;

  const StraighteningMap& map() const;
  const Grid& grid() const;
  double depth() const;

  HarmonicLift solve(const SpectralField& f) const;
  // Conormal trace with the mean projected out.
  SpectralField apply(const SpectralField& f) const;
  SpectralField conormal_trace(const HarmonicLift& lift) const;
  // zeta1 d_z v - grad rho . grad v at z = 0, one-sided second-order d_z.
  SpectralField pointwise_trace(const HarmonicLift& lift) const;
  // Lambda1 v - grad rho . Lambda2 v at z = 0 (same one-sided d_z).
  SpectralField divergence_form_trace(const HarmonicLift& lift) const;
  double energy_squared(const HarmonicLift& lift) const;
  EnergyFlux energy_and_flux(const SpectralField& f) const;
  // Gradient in eta (grid L2 pairing) of K = 1/2 int psi G(eta) psi for the
  // discrete operator; linear straightening only.
  SpectralField kinetic_gradient(const SpectralField& psi) const;
  SpectralField kinetic_gradient(const HarmonicLift& lift) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SpectralField dn_apply(const SpectralField& eta, const SpectralField& f, double depth, const DnOptions& opts = {});
// k tanh(hk) multiplier.
SpectralField dn_flat_exact(const SpectralField& f, double depth);
EnergyFlux energy_and_flux(const SpectralField& eta, const SpectralField& f, double depth, const DnOptions& opts = {});

// B = (grad eta . grad psi + G psi)/(1+|grad eta|^2), V = grad psi - B grad eta.
struct VelocityTraces {
  SpectralField b;
  std::vector<SpectralField> v;
};
VelocityTraces velocity_traces(const SpectralField& eta, const SpectralField& psi, const SpectralField& g_psi);

// -G(eta)(B f) - div(V f)
SpectralField shape_derivative(const SpectralField& eta, const SpectralField& psi, const SpectralField& f,
                               double depth, const DnOptions& opts = {});

// Strip dump: "# strip d N M L" header, rows "x [y] z value".
void write_strip(std::ostream& os, const HarmonicLift& lift);

}  // namespace wwlab
