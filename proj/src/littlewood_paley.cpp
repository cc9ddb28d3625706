#include "wwlab/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>

namespace wwlab {

namespace {

// C-infinity step from 0 (t <= 0) to 1 (t >= 1).
double smooth_step(double t, double sharpness) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-sharpness / t);
  const double b = std::exp(-sharpness / (1.0 - t));
  return a / (a + b);
}

std::vector<double> lattice_norms(const Grid& g) {
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = g.wavevector(i).norm();
  return r;
}

SpectralField band_from_coefficients(const Grid& g, const std::vector<cplx>& c, const std::vector<double>& norms,
                                     const std::function<double(double)>& weight, bool real_in) {
  std::vector<cplx> b(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double w = weight(norms[i]);
    b[i] = w == 0.0 ? cplx(0.0) : w * c[i];
  }
  SpectralField r = SpectralField::from_coefficients(g, b);
  if (real_in)
    for (cplx& v : r.values()) v = cplx(v.real(), 0.0);
  return r;
}

bool exactly_real(const SpectralField& u) {
  return std::all_of(u.values().begin(), u.values().end(), [](const cplx& v) { return v.imag() == 0.0; });
}

double lp_norm(std::span<const double> mag, Exponent p) {
  double r = 0.0;
  switch (p) {
    case Exponent::inf:
      for (double v : mag) r = std::max(r, v);
      return r;
    case Exponent::one:
      for (double v : mag) r += v;
      return r / static_cast<double>(mag.size());
    case Exponent::two:
      for (double v : mag) r += v * v;
      return std::sqrt(r / static_cast<double>(mag.size()));
  }
  return r;
}

double combine(const std::vector<BlockNorm>& t, Exponent q) {
  double r = 0.0;
  for (const BlockNorm& b : t) {
    switch (q) {
      case Exponent::inf: r = std::max(r, b.weighted); break;
      case Exponent::one: r += b.weighted; break;
      case Exponent::two: r += b.weighted * b.weighted; break;
    }
  }
  return q == Exponent::two ? std::sqrt(r) : r;
}

}  // namespace

DyadicCutoff::DyadicCutoff(double sharpness) : sharpness_(sharpness) {
  if (!(sharpness > 0.0) || !std::isfinite(sharpness)) throw std::invalid_argument("cutoff sharpness must be positive");
}

double DyadicCutoff::kappa(double theta) const {
  const double a = std::abs(theta);
  return 1.0 - smooth_step((a - kInner) / (kOuter - kInner), sharpness_);
}

double DyadicCutoff::kappa_k(int k, double theta) const { return kappa(std::ldexp(theta, -k)); }

double DyadicCutoff::phi(int k, double theta) const {
  if (k < 0) return 0.0;
  if (k == 0) return kappa_k(0, theta);
  return kappa_k(k, theta) - kappa_k(k - 1, theta);
}

const DyadicCutoff& default_cutoff() {
  static const DyadicCutoff c;
  return c;
}

int max_band(const Grid& grid) {
  const double kmax = grid.dim() == 1 ? grid.n() / 2.0 : std::sqrt(2.0) * grid.n() / 2.0;
  int j = 0;
  while (DyadicCutoff::kInner * std::ldexp(1.0, j) < kmax) ++j;
  return j;
}

SpectralField dyadic_block(int j, const SpectralField& u, const DyadicCutoff& cutoff) {
  const Grid& g = u.grid();
  return band_from_coefficients(g, u.coefficients(), lattice_norms(g), [&](double t) { return cutoff.phi(j, t); },
                                exactly_real(u));
}

SpectralField low_pass(int k, const SpectralField& u, const DyadicCutoff& cutoff) {
  const Grid& g = u.grid();
  return band_from_coefficients(g, u.coefficients(), lattice_norms(g), [&](double t) { return cutoff.kappa_k(k, t); },
                                exactly_real(u));
}

std::vector<SpectralField> dyadic_decomposition(const SpectralField& u, const DyadicCutoff& cutoff) {
  const Grid& g = u.grid();
  const std::vector<cplx> c = u.coefficients();
  const std::vector<double> norms = lattice_norms(g);
  const bool real_in = exactly_real(u);
  std::vector<SpectralField> blocks;
  for (int j = 0; j <= max_band(g); ++j)
    blocks.push_back(band_from_coefficients(g, c, norms, [&](double t) { return cutoff.phi(j, t); }, real_in));
  return blocks;
}

std::vector<BlockNorm> block_table(std::span<const SpectralField> u, const BesovSpec& spec) {
  if (u.empty()) throw std::invalid_argument("block_table of an empty vector field");
  const Grid& g = u[0].grid();
  std::vector<std::vector<SpectralField>> comps;
  for (const SpectralField& f : u) comps.push_back(dyadic_decomposition(f));
  std::vector<BlockNorm> out;
  std::vector<double> mag(g.size());
  for (std::size_t j = 0; j < comps[0].size(); ++j) {
    std::fill(mag.begin(), mag.end(), 0.0);
    for (const auto& c : comps)
      for (std::size_t i = 0; i < g.size(); ++i) mag[i] += std::norm(c[j][i]);
    for (double& m : mag) m = std::sqrt(m);
    BlockNorm b;
    b.j = static_cast<int>(j);
    b.block = lp_norm(mag, spec.p);
    b.weighted = std::pow(2.0, spec.s * static_cast<double>(j)) * b.block;
    out.push_back(b);
  }
  return out;
}

std::vector<BlockNorm> block_table(const SpectralField& u, const BesovSpec& spec) {
  return block_table(std::span<const SpectralField>(&u, 1), spec);
}

double besov_norm(std::span<const SpectralField> u, const BesovSpec& spec) { return combine(block_table(u, spec), spec.q); }
double besov_norm(const SpectralField& u, const BesovSpec& spec) { return combine(block_table(u, spec), spec.q); }

double zygmund_norm(const SpectralField& u, double s) { return besov_norm(u, {s, Exponent::inf, Exponent::inf}); }
double zygmund_norm(std::span<const SpectralField> u, double s) {
  return besov_norm(u, {s, Exponent::inf, Exponent::inf});
}
double b_norm(const SpectralField& u, double s) { return besov_norm(u, {s, Exponent::inf, Exponent::one}); }
double b_norm(std::span<const SpectralField> u, double s) { return besov_norm(u, {s, Exponent::inf, Exponent::one}); }

double low_frequency_cutoff(double abs_xi) { return smooth_step((abs_xi - 0.2) / 0.05, 1.0); }

SpectralField paraproduct(const SpectralField& a, const SpectralField& u, const ParaproductOptions& opts) {
  const Grid& g = u.grid();
  if (!(a.grid() == g)) throw std::invalid_argument("paraproduct fields live on different grids");
  const DyadicCutoff& cut = opts.cutoff ? *opts.cutoff : default_cutoff();
  const std::vector<double> norms = lattice_norms(g);
  const std::vector<cplx> ac = a.coefficients();
  std::vector<cplx> uc = u.coefficients();
  if (opts.low_frequency_cutoff)
    for (std::size_t i = 0; i < uc.size(); ++i) uc[i] *= low_frequency_cutoff(norms[i]);
  const bool real_in = exactly_real(a) && exactly_real(u);

  SpectralField sum(g);
  std::vector<cplx> buf(g.size());
  SpectralField sa(g), du(g);
  for (int k = 0; k <= max_band(g); ++k) {
    bool any = false;
    for (std::size_t i = 0; i < uc.size(); ++i) {
      const double w = cut.phi(k, norms[i]);
      buf[i] = w == 0.0 ? cplx(0.0) : w * uc[i];
      any = any || buf[i] != cplx(0.0);
    }
    if (!any) continue;
    fft_inverse(g, buf, du.values());
    bool any_a = false;
    for (std::size_t i = 0; i < ac.size(); ++i) {
      const double w = cut.kappa_k(k - 3, norms[i]);
      buf[i] = w == 0.0 ? cplx(0.0) : w * ac[i];
      any_a = any_a || buf[i] != cplx(0.0);
    }
    if (!any_a) continue;
    fft_inverse(g, buf, sa.values());
    for (std::size_t i = 0; i < g.size(); ++i) sum[i] += sa[i] * du[i];
  }
  SpectralField r = dealias(sum);
  if (real_in)
    for (cplx& v : r.values()) v = cplx(v.real(), 0.0);
  return r;
}

SpectralField bony_remainder(const SpectralField& a, const SpectralField& u, const ParaproductOptions& opts) {
  SpectralField r = product(a, u);
  r -= paraproduct(a, u, opts);
  r -= paraproduct(u, a, opts);
  return r;
}

}  // namespace wwlab
