#pragma once

#include <iosfwd>
#include <vector>

#include "wwlab/dn_paralinearized.hpp"
#include "wwlab/waterwaves.hpp"

namespace wwlab {

// 2.1 in d = 1 and 2.6 in d = 2 (strictly above 3/2 + d/2).
double default_sobolev_index(int dim);

struct SymmetrizerOptions {
  double s = 0.0;  // <= 0 picks default_sobolev_index
  DnOptions dn{};
  bool principal_only = false;  // drop lambda0 and p^(-1/2)

  double index(int dim) const { return s > 0.0 ? s : default_sobolev_index(dim); }
  CatalogParams catalog(int dim) const;
};

struct GoodUnknown {
  SpectralField u;  // psi - T_B eta
  SpectralField b;
};
GoodUnknown good_unknown(const SurfaceState& state, const DnOptions& dn = {});

struct ParalinearResiduals {
  SpectralField f1;  // d_t eta + T_V.grad eta - T_lambda U
  SpectralField f2;  // d_t U + T_V.grad U + T_ell eta
  double f1_norm = 0.0;  // H^{s+1/2}
  double f2_norm = 0.0;  // H^s
};
// Time derivatives come from rhs(); d_t B uses
// d_t(G psi) = G(psi_t - B eta_t) - div(V eta_t).
ParalinearResiduals paralinearized_residuals(const SurfaceState& state, const SymmetrizerOptions& opts = {});

struct ComplexUnknown {
  SpectralField phi;  // T_p eta + i T_q U
  double s = 0.0;
};
ComplexUnknown build_phi(const SurfaceState& state, const SymmetrizerOptions& opts = {});

struct SymmetrizedResidual {
  double t = 0.0;  // midpoint time
  SpectralField f;
  double f_l2 = 0.0;
  double f_hs = 0.0;
  double phi_l2 = 0.0;
  double phi_hs = 0.0;
};
// F = d_t Phi + T_V.grad Phi + i T_gamma Phi at the midpoint of two snapshots:
// d_t Phi by the difference quotient, Phi as the average, V and gamma from the
// averaged state. Second order in the snapshot spacing.
SymmetrizedResidual symmetrized_residual(const SurfaceState& before, const SurfaceState& after,
                                         const SymmetrizerOptions& opts = {});

struct PhiEnergy {
  double phi_l2 = 0.0;    // ||T_wp Phi||_{L^2}, wp = (gamma32)^{2s/3}
  double low = 0.0;       // ||eta||_{L^2} + ||psi||_{L^2}
  double original = 0.0;  // ||eta||_{H^{s+1/2}} + ||psi||_{H^s}
  double upper_ratio() const { return phi_l2 / original; }            // bounded above
  double lower_ratio() const { return (phi_l2 + low) / original; }    // bounded below
};
PhiEnergy energy_phi(const SurfaceState& state, const SymmetrizerOptions& opts = {});

struct ResidualRow {
  double t = 0.0;
  double f1 = 0.0, f2 = 0.0, f = 0.0, phi = 0.0;
};
// CSV "t,f1,f2,F,phi".
void write_residual_csv(std::ostream& os, const std::vector<ResidualRow>& rows);

}  // namespace wwlab
