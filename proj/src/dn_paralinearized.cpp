#include "wwlab/dn_paralinearized.hpp"

#include "wwlab/littlewood_paley.hpp"

namespace wwlab {

namespace {
constexpr ParaproductOptions kParadiff{true, nullptr};
}

SpectralField good_unknown_from(const SpectralField& psi, const SpectralField& b, const SpectralField& eta) {
  return (psi - paraproduct(b, eta, kParadiff)).real_part();
}

SpectralField para_transport(std::span<const SpectralField> v, const SpectralField& u) {
  const std::vector<SpectralField> du = gradient(u);
  SpectralField out(u.grid());
  for (std::size_t a = 0; a < du.size(); ++a) out += paraproduct(v[a], du[a], kParadiff);
  return out.real_part();
}

ParalinearizedDn dn_paralinearized(const SpectralField& eta, const SpectralField& psi, double depth,
                                   const DnOptions& dn) {
  ParalinearizedDn r;
  r.g_psi = dn_apply(eta, psi, depth, dn).real_part();
  const VelocityTraces bv = velocity_traces(eta, psi, r.g_psi);
  r.good = good_unknown_from(psi, bv.b, eta);
  const SymbolDescriptor lambda = build_symbol(SymbolKind::lambda, eta);
  r.approx = (quantize(lambda, r.good) + para_transport(bv.v, eta)).real_part();
  r.residual = r.g_psi - r.approx;
  return r;
}

}  // namespace wwlab
