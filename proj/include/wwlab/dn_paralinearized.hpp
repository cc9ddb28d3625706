#pragma once

#include "wwlab/dirichlet_neumann.hpp"
#include "wwlab/paradiff.hpp"

namespace wwlab {

struct ParalinearizedDn {
  SpectralField g_psi;     // G(eta) psi from the strip solve
  SpectralField good;      // U = psi - T_B eta
  SpectralField approx;    // T_lambda U + T_V . grad eta
  SpectralField residual;  // g_psi - approx
};

// lambda = lambda1 + lambda0 from the catalog; B, V from the same G(eta) psi.
ParalinearizedDn dn_paralinearized(const SpectralField& eta, const SpectralField& psi, double depth,
                                   const DnOptions& dn = {});

// T_B eta with B given (paraproduct with the low-frequency cutoff).
SpectralField good_unknown_from(const SpectralField& psi, const SpectralField& b, const SpectralField& eta);
// sum_j T_{V_j} d_j u.
SpectralField para_transport(std::span<const SpectralField> v, const SpectralField& u);

}  // namespace wwlab
