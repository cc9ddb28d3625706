#include "wwlab/symmetrizer.hpp"

#include <ostream>

#include "wwlab/littlewood_paley.hpp"

namespace wwlab {

double default_sobolev_index(int dim) { return dim == 1 ? 2.1 : 2.6; }

CatalogParams SymmetrizerOptions::catalog(int dim) const {
  CatalogParams c;
  c.s = index(dim);
  c.dn = dn;
  c.principal_only = principal_only;
  return c;
}

namespace {

SpectralField dot(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b) {
  SpectralField s = pointwise_product(a[0], b[0]);
  for (std::size_t c = 1; c < a.size(); ++c) s += pointwise_product(a[c], b[c]);
  return s;
}

SpectralField para(const SpectralField& a, const SpectralField& u) {
  return paraproduct(a, u, ParaproductOptions{true, nullptr});
}

SurfaceState average(const SurfaceState& a, const SurfaceState& b) {
  SurfaceState m = a;
  m.t = 0.5 * (a.t + b.t);
  m.eta = 0.5 * (a.eta + b.eta);
  m.psi = 0.5 * (a.psi + b.psi);
  return m;
}

}  // namespace

GoodUnknown good_unknown(const SurfaceState& state, const DnOptions& dn) {
  const VelocityTraces bv = compute_BV(state, dn);
  return {good_unknown_from(state.psi, bv.b, state.eta), bv.b};
}

ParalinearResiduals paralinearized_residuals(const SurfaceState& st, const SymmetrizerOptions& opts) {
  const Grid& grid = st.eta.grid();
  const double s = opts.index(grid.dim());
  const DirichletNeumann op(st.eta, st.params.depth, opts.dn);
  const SpectralField gpsi = op.apply(st.psi).real_part();
  const VelocityTraces bv = velocity_traces(st.eta, st.psi, gpsi);
  const Tendency tend = rhs(st, opts.dn);
  const SpectralField& eta_t = tend.eta_t;
  const SpectralField& psi_t = tend.psi_t;

  // d_t B from d_t(G psi).
  std::vector<SpectralField> v_eta_t;
  for (const auto& v : bv.v) v_eta_t.push_back(pointwise_product(v, eta_t));
  const SpectralField dt_gpsi = op.apply((psi_t - pointwise_product(bv.b, eta_t)).real_part()) - divergence(v_eta_t);
  const auto ge = gradient(st.eta), gp = gradient(st.psi), get = gradient(eta_t), gpt = gradient(psi_t);
  SpectralField dt_b = dot(get, gp) + dot(ge, gpt) + dt_gpsi - 2.0 * pointwise_product(bv.b, dot(ge, get));
  for (std::size_t j = 0; j < dt_b.size(); ++j) {
    double w = 1.0;
    for (const auto& g : ge) w += g[j].real() * g[j].real();
    dt_b[j] = dt_b[j].real() / w;
  }

  const SpectralField u = good_unknown_from(st.psi, bv.b, st.eta);
  const SpectralField u_t = (psi_t - para(bv.b, eta_t) - para(dt_b, st.eta)).real_part();
  const CatalogParams cp = opts.catalog(grid.dim());
  const SymbolDescriptor lambda = build_symbol(SymbolKind::lambda, st.eta, cp);
  const SymbolDescriptor ell = build_symbol(SymbolKind::ell, st.eta, cp);

  ParalinearResiduals r;
  r.f1 = (eta_t + para_transport(bv.v, st.eta) - quantize(lambda, u)).real_part();
  r.f2 = (u_t + para_transport(bv.v, u) + quantize(ell, st.eta)).real_part();
  r.f1_norm = sobolev_norm(r.f1, s + 0.5);
  r.f2_norm = sobolev_norm(r.f2, s);
  return r;
}

ComplexUnknown build_phi(const SurfaceState& st, const SymmetrizerOptions& opts) {
  const int d = st.eta.grid().dim();
  const CatalogParams cp = opts.catalog(d);
  const GoodUnknown gu = good_unknown(st, opts.dn);
  const SpectralField p_eta = quantize(build_symbol(SymbolKind::p, st.eta, cp), st.eta).real_part();
  const SpectralField q_u = quantize(build_symbol(SymbolKind::q, st.eta, cp), gu.u).real_part();
  ComplexUnknown c;
  c.s = opts.index(d);
  c.phi = p_eta + cplx(0.0, 1.0) * q_u;
  return c;
}

SymmetrizedResidual symmetrized_residual(const SurfaceState& before, const SurfaceState& after,
                                         const SymmetrizerOptions& opts) {
  const double dt = after.t - before.t;
  if (!(dt > 0.0)) throw std::invalid_argument("snapshots must be ordered in time");
  const SpectralField phi0 = build_phi(before, opts).phi;
  const SpectralField phi1 = build_phi(after, opts).phi;
  const SurfaceState mid = average(before, after);
  const int d = mid.eta.grid().dim();
  const double s = opts.index(d);
  const SpectralField phi = 0.5 * (phi0 + phi1);
  const VelocityTraces bv = compute_BV(mid, opts.dn);
  const SymbolDescriptor gamma = build_symbol(SymbolKind::gamma, mid.eta, opts.catalog(d));

  SymmetrizedResidual r;
  r.t = mid.t;
  r.f = (1.0 / dt) * (phi1 - phi0);
  const auto dphi = gradient(phi);
  for (int a = 0; a < d; ++a) r.f += para(bv.v[a], dphi[a]);
  r.f += cplx(0.0, 1.0) * quantize(gamma, phi);
  r.f_l2 = sobolev_norm(r.f, 0.0);
  r.f_hs = sobolev_norm(r.f, s);
  r.phi_l2 = sobolev_norm(phi, 0.0);
  r.phi_hs = sobolev_norm(phi, s);
  return r;
}

PhiEnergy energy_phi(const SurfaceState& st, const SymmetrizerOptions& opts) {
  const int d = st.eta.grid().dim();
  const double s = opts.index(d);
  const SpectralField phi = build_phi(st, opts).phi;
  const SymbolDescriptor wp = build_symbol(SymbolKind::weight, st.eta, opts.catalog(d));
  PhiEnergy e;
  e.phi_l2 = sobolev_norm(quantize(wp, phi), 0.0);
  e.low = sobolev_norm(st.eta, 0.0) + sobolev_norm(st.psi, 0.0);
  e.original = sobolev_norm(st.eta, s + 0.5) + sobolev_norm(st.psi, s);
  return e;
}

void write_residual_csv(std::ostream& os, const std::vector<ResidualRow>& rows) {
  os << "t,f1,f2,F,phi\n";
  os.precision(17);
  for (const auto& r : rows) os << r.t << ',' << r.f1 << ',' << r.f2 << ',' << r.f << ',' << r.phi << '\n';
}

}  // namespace wwlab
