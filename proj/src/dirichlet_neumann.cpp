#include "wwlab/dirichlet_neumann.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <tuple>

#include "fft_plans.hpp"
#include "wwlab/simd/kernels.hpp"

namespace wwlab {

namespace {

void require_real(const SpectralField& u, const char* what) {
  if (!u.is_real(1e-10)) throw std::invalid_argument(std::string(what) + " must be real");
}

double w1inf_norm(const SpectralField& eta) {
  double m = eta.max_abs();
  double gmax = 0.0;
  const std::vector<SpectralField> g = gradient(eta);
  for (std::size_t i = 0; i < eta.size(); ++i) {
    double s = 0.0;
    for (const SpectralField& c : g) s += std::norm(c[i]);
    gmax = std::max(gmax, std::sqrt(s));
  }
  return m + gmax;
}

// Derivative frequencies (Nyquist zeroed) of the half-spectrum layout.
void half_spectrum_frequencies(const Grid& g, std::vector<double> k[2]) {
  const int n = g.n();
  const int nh = n / 2 + 1;
  if (g.dim() == 1) {
    k[0].resize(nh);
    for (int q = 0; q < nh; ++q) k[0][q] = (q == n / 2) ? 0.0 : q;
    return;
  }
  k[0].resize(static_cast<std::size_t>(n) * nh);
  k[1].resize(static_cast<std::size_t>(n) * nh);
  for (int i0 = 0; i0 < n; ++i0)
    for (int q = 0; q < nh; ++q) {
      k[0][static_cast<std::size_t>(i0) * nh + q] = g.derivative_frequency(i0);
      k[1][static_cast<std::size_t>(i0) * nh + q] = (q == n / 2) ? 0.0 : q;
    }
}

std::string node_name(const Grid& g, std::size_t flat, double z) {
  double x, y;
  g.coordinates(flat, x, y);
  std::ostringstream os;
  os << std::setprecision(6) << "(x=" << x;
  if (g.dim() == 2) os << ", y=" << y;
  os << ", z=" << z << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Straightening

StraighteningMap::StraighteningMap(const SpectralField& eta, double depth, int levels, StraighteningMode mode,
                                   double delta)
    : mode_(mode), depth_(depth), eta_(eta.real_part()) {
  if (!(depth > 0.0) || !std::isfinite(depth)) throw std::invalid_argument("depth h must be positive");
  if (levels < 8) throw std::invalid_argument("strip needs at least 8 z intervals");
  require_real(eta, "surface elevation eta");
  if (!eta.all_finite()) throw std::invalid_argument("surface elevation has non-finite values");
  strip_.x = eta.grid();
  strip_.levels = levels;
  const Grid& g = strip_.x;
  const std::size_t p = g.size();

  if (mode_ == StraighteningMode::linear) {
    for (std::size_t j = 0; j < p; ++j) {
      if (!(eta_[j].real() + depth > 0.0))
        throw StraighteningError("surface touches the bottom: eta + h = " + std::to_string(eta_[j].real() + depth) +
                                 " at node " + node_name(g, j, 0.0));
    }
  } else {
    if (delta <= 0.0) {
      const double w = w1inf_norm(eta_);
      delta = w > 0.0 ? std::min(0.1 / w, 1.0) : 1.0;
    }
    delta_ = delta;
    eta_hat_ = eta_.coefficients();
  }
  if (mode_ == StraighteningMode::linear) grad_eta_ = gradient(eta_);

  const int d = g.dim();
  rho_.assign((levels + 1) * p, 0.0);
  rho_z_.assign((levels + 1) * p, 0.0);
  rho_z_cell_.assign(levels * p, 0.0);
  for (int a = 0; a < d; ++a) {
    grad_rho_[a].assign((levels + 1) * p, 0.0);
    grad_rho_cell_[a].assign(levels * p, 0.0);
  }
  std::vector<double> scratch(p);
  for (int i = 0; i <= levels; ++i) {
    fill_level(strip_.z(i), rho_.data() + i * p, rho_z_.data() + i * p, grad_rho_[0].data() + i * p,
               d == 2 ? grad_rho_[1].data() + i * p : nullptr);
  }
  for (int i = 0; i < levels; ++i) {
    fill_level(strip_.z_cell(i), scratch.data(), rho_z_cell_.data() + i * p, grad_rho_cell_[0].data() + i * p,
               d == 2 ? grad_rho_cell_[1].data() + i * p : nullptr);
  }
  // Exact boundary values.
  for (std::size_t j = 0; j < p; ++j) {
    rho_[levels * p + j] = eta_[j].real();
    if (mode_ == StraighteningMode::linear) rho_[j] = -depth;
  }

  const double bound = mode_ == StraighteningMode::linear ? 0.0 : 0.5 * depth;
  min_rho_z_ = rho_z_[0];
  auto check = [&](const std::vector<double>& a, int count, bool cell) {
    for (int i = 0; i < count; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        const double v = a[i * p + j];
        min_rho_z_ = std::min(min_rho_z_, v);
        const bool ok = mode_ == StraighteningMode::linear ? v > 0.0 : v >= bound;
        if (!ok) {
          const double z = cell ? strip_.z_cell(i) : strip_.z(i);
          throw StraighteningError("straightening map degenerates: d_z rho = " + std::to_string(v) + " < " +
                                   std::to_string(bound) + " at node " + node_name(g, j, z));
        }
      }
  };
  check(rho_z_, levels + 1, false);
  check(rho_z_cell_, levels, true);
}

void StraighteningMap::fill_level(double z, double* rho, double* rho_z, double* g0, double* g1) const {
  const Grid& g = strip_.x;
  const std::size_t p = g.size();
  if (mode_ == StraighteningMode::linear) {
    const std::vector<SpectralField>* grad = &grad_eta_;
    for (std::size_t j = 0; j < p; ++j) {
      const double e = eta_[j].real();
      rho[j] = (1.0 + z) * e + z * depth_;
      rho_z[j] = e + depth_;
      g0[j] = (1.0 + z) * (*grad)[0][j].real();
      if (g1) g1[j] = (1.0 + z) * (*grad)[1][j].real();
    }
    return;
  }
  std::vector<cplx> r(p), rz(p), gr0(p), gr1(p);
  for (std::size_t i = 0; i < p; ++i) {
    const Wavevector k = g.wavevector(i);
    const double br = std::sqrt(1.0 + k.norm2()) * delta_;
    const double ea = std::exp(z * br);
    const double eb = std::exp(-(1.0 + z) * br);
    const cplx e = eta_hat_[i];
    r[i] = ((1.0 + z) * ea - z * eb) * e;
    rz[i] = ((1.0 + (1.0 + z) * br) * ea + (-1.0 + z * br) * eb) * e;
    if (k.is_zero()) {
      r[i] += z * depth_;
      rz[i] += depth_;
    }
    const int i0 = g.dim() == 1 ? static_cast<int>(i) : static_cast<int>(i / g.n());
    gr0[i] = cplx(0.0, g.derivative_frequency(i0)) * r[i];
    if (g.dim() == 2) gr1[i] = cplx(0.0, g.derivative_frequency(static_cast<int>(i % g.n()))) * r[i];
  }
  std::vector<cplx> out(p);
  fft_inverse(g, r, out);
  for (std::size_t j = 0; j < p; ++j) rho[j] = out[j].real();
  fft_inverse(g, rz, out);
  for (std::size_t j = 0; j < p; ++j) rho_z[j] = out[j].real();
  fft_inverse(g, gr0, out);
  for (std::size_t j = 0; j < p; ++j) g0[j] = out[j].real();
  if (g1) {
    fft_inverse(g, gr1, out);
    for (std::size_t j = 0; j < p; ++j) g1[j] = out[j].real();
  }
}

void StraighteningMap::second_derivatives(int i, std::vector<double>& rho_zz, std::vector<double>& lap_rho,
                                          std::vector<double> grad_rho_z[2]) const {
  const Grid& g = strip_.x;
  const std::size_t p = g.size();
  const double z = strip_.z(i);
  rho_zz.assign(p, 0.0);
  lap_rho.assign(p, 0.0);
  for (int a = 0; a < g.dim(); ++a) grad_rho_z[a].assign(p, 0.0);
  std::vector<cplx> c = mode_ == StraighteningMode::linear ? eta_.coefficients() : eta_hat_;
  std::vector<cplx> zz(p), lap(p), gz0(p), gz1(p);
  for (std::size_t q = 0; q < p; ++q) {
    const Wavevector k = g.wavevector(q);
    const int i0 = g.dim() == 1 ? static_cast<int>(q) : static_cast<int>(q / g.n());
    const double k0 = g.derivative_frequency(i0);
    const double k1 = g.dim() == 2 ? g.derivative_frequency(static_cast<int>(q % g.n())) : 0.0;
    const double kk = k0 * k0 + k1 * k1;
    cplx r, rz;
    if (mode_ == StraighteningMode::linear) {
      r = (1.0 + z) * c[q];
      rz = c[q];
      zz[q] = 0.0;
    } else {
      const double br = std::sqrt(1.0 + k.norm2()) * delta_;
      const double ea = std::exp(z * br);
      const double eb = std::exp(-(1.0 + z) * br);
      r = ((1.0 + z) * ea - z * eb) * c[q];
      rz = ((1.0 + (1.0 + z) * br) * ea + (-1.0 + z * br) * eb) * c[q];
      zz[q] = ((2.0 * br + (1.0 + z) * br * br) * ea + (2.0 * br - z * br * br) * eb) * c[q];
    }
    lap[q] = -kk * r;
    gz0[q] = cplx(0.0, k0) * rz;
    gz1[q] = cplx(0.0, k1) * rz;
  }
  std::vector<cplx> out(p);
  fft_inverse(g, zz, out);
  for (std::size_t j = 0; j < p; ++j) rho_zz[j] = out[j].real();
  fft_inverse(g, lap, out);
  for (std::size_t j = 0; j < p; ++j) lap_rho[j] = out[j].real();
  fft_inverse(g, gz0, out);
  for (std::size_t j = 0; j < p; ++j) grad_rho_z[0][j] = out[j].real();
  if (g.dim() == 2) {
    fft_inverse(g, gz1, out);
    for (std::size_t j = 0; j < p; ++j) grad_rho_z[1][j] = out[j].real();
  }
}

EllipticCoefficients elliptic_coefficients(const StraighteningMap& map) {
  EllipticCoefficients c;
  c.strip = map.strip();
  const int m = c.strip.levels;
  const int d = c.strip.x.dim();
  const std::size_t p = c.strip.x.size();
  c.alpha.resize((m + 1) * p);
  c.gamma.resize((m + 1) * p);
  for (int a = 0; a < d; ++a) c.beta[a].resize((m + 1) * p);
  std::vector<double> rzz, lap, grz[2];
  for (int i = 0; i <= m; ++i) {
    map.second_derivatives(i, rzz, lap, grz);
    const auto rz = map.rho_z(i);
    for (std::size_t j = 0; j < p; ++j) {
      double gg = 0.0;
      for (int a = 0; a < d; ++a) gg += map.grad_rho(a, i)[j] * map.grad_rho(a, i)[j];
      const double den = 1.0 + gg;
      const double alpha = rz[j] * rz[j] / den;
      double bdot = 0.0;
      for (int a = 0; a < d; ++a) {
        const double b = -2.0 * rz[j] * map.grad_rho(a, i)[j] / den;
        c.beta[a][i * p + j] = b;
        bdot += b * grz[a][j];
      }
      c.alpha[i * p + j] = alpha;
      c.gamma[i * p + j] = (rzz[j] + alpha * lap[j] + bdot) / rz[j];
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Harmonic lift

SpectralField HarmonicLift::level(int i) const {
  const std::size_t p = strip.x.size();
  std::vector<double> vals(v.begin() + static_cast<std::ptrdiff_t>(i * p),
                           v.begin() + static_cast<std::ptrdiff_t>((i + 1) * p));
  return SpectralField::from_real(strip.x, vals);
}

double HarmonicLift::max_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double EnergyFlux::energy() const { return std::sqrt(std::max(0.0, energy_squared)); }

// ---------------------------------------------------------------------------
// Solver

namespace {

struct Workspace {
  detail::AlignedBuffer<double> v, out, divs, flux;
  detail::AlignedBuffer<double> g[2], s[2], hflux[2];
  detail::AlignedBuffer<fftw_complex> vhat, tmp;
  detail::AlignedBuffer<double> x, r, z, p, q;
};

using WorkspaceKey = std::tuple<int, int, int>;

// Per-thread free list so that repeated solves on one grid reuse buffers.
std::map<WorkspaceKey, std::vector<std::unique_ptr<Workspace>>>& workspace_pool() {
  static thread_local std::map<WorkspaceKey, std::vector<std::unique_ptr<Workspace>>> pool;
  return pool;
}

std::unique_ptr<Workspace> acquire_workspace(const WorkspaceKey& key, std::size_t p, std::size_t ph, int m, int d) {
  auto& list = workspace_pool()[key];
  if (!list.empty()) {
    auto w = std::move(list.back());
    list.pop_back();
    return w;
  }
  auto w = std::make_unique<Workspace>();
  const std::size_t nodes = (m + 1) * p, cells = m * p;
  w->v.resize(nodes);
  w->out.resize(nodes);
  w->divs.resize(nodes);
  w->flux.resize(cells);
  for (int a = 0; a < d; ++a) {
    w->g[a].resize(nodes);
    w->s[a].resize(nodes);
    w->hflux[a].resize(cells);
  }
  w->vhat.resize((m + 1) * ph);
  w->tmp.resize((m + 1) * ph);
  w->x.resize(cells);
  w->r.resize(cells);
  w->z.resize(cells);
  w->p.resize(cells);
  w->q.resize(cells);
  return w;
}

}  // namespace

struct DirichletNeumann::Impl {
  StraighteningMap map;
  Grid grid;
  int d, n, m;
  std::size_t p, ph;
  double dz, depth;
  DnOptions opts;
  std::vector<double> zeta;  // cells
  std::vector<double> cw;    // trapezoid weights per node
  std::vector<double> kder[2];
  std::vector<double> inv_den, cp, off;
  mutable std::mutex mutex;
  mutable std::unique_ptr<Workspace> ws;
  WorkspaceKey key;

  Impl(const SpectralField& eta, double h, const DnOptions& o)
      : map(eta, h, o.levels > 0 ? o.levels : eta.grid().n(), o.mode, o.delta),
        grid(eta.grid()),
        d(grid.dim()),
        n(grid.n()),
        m(map.strip().levels),
        p(grid.size()),
        ph(d == 1 ? static_cast<std::size_t>(n / 2 + 1) : static_cast<std::size_t>(n) * (n / 2 + 1)),
        dz(map.strip().dz()),
        depth(h),
        opts(o) {
    zeta.resize(m * p);
    for (int i = 0; i < m; ++i) {
      const auto rz = map.rho_z_cell(i);
      for (std::size_t j = 0; j < p; ++j) {
        double gg = 0.0;
        for (int a = 0; a < d; ++a) gg += map.grad_rho_cell(a, i)[j] * map.grad_rho_cell(a, i)[j];
        zeta[i * p + j] = (1.0 + gg) / rz[j];
      }
    }
    cw.assign(m + 1, 1.0);
    cw[0] = cw[m] = 0.5;
    half_spectrum_frequencies(grid, kder);
    build_preconditioner();
    key = WorkspaceKey{d, n, m};
    ws = acquire_workspace(key, p, ph, m, d);
  }

  ~Impl() {
    if (ws) workspace_pool()[key].push_back(std::move(ws));
  }

  void build_preconditioner() {
    std::vector<double> zbar(m), rbar(m + 1);
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) s += zeta[i * p + j];
      zbar[i] = s / static_cast<double>(p);
    }
    for (int i = 0; i <= m; ++i) {
      const auto rz = map.rho_z(i);
      double s = 0.0;
      for (double v : rz) s += v;
      rbar[i] = s / static_cast<double>(p);
    }
    off.resize(std::max(m - 1, 1));
    for (int i = 0; i + 1 < m; ++i) off[i] = -zbar[i] / dz;
    inv_den.resize(m * ph);
    cp.resize(m * ph);
    for (std::size_t q = 0; q < ph; ++q) {
      double kk = kder[0][q] * kder[0][q];
      if (d == 2) kk += kder[1][q] * kder[1][q];
      double prev_cp = 0.0;
      for (int i = 0; i < m; ++i) {
        double diag = zbar[i] / dz + dz * cw[i] * rbar[i] * kk;
        if (i >= 1) diag += zbar[i - 1] / dz;
        const double den = i == 0 ? diag : diag - off[i - 1] * prev_cp;
        inv_den[i * ph + q] = 1.0 / den;
        prev_cp = (i + 1 < m) ? off[i] / den : 0.0;
        cp[i * ph + q] = prev_cp;
      }
    }
  }

  // Gradients of all node levels of ws->v into ws->g.
  void node_gradients(int levels) const {
    Workspace& w = *ws;
    detail::r2c_many(d, n, levels, w.v.data(), w.vhat.data());
    const double inv_p = 1.0 / static_cast<double>(p);
    for (int a = 0; a < d; ++a) {
      const std::vector<double>& k = kder[a];
      for (int i = 0; i < levels; ++i) {
        const fftw_complex* src = w.vhat.data() + i * ph;
        fftw_complex* dst = w.tmp.data() + i * ph;
        for (std::size_t q = 0; q < ph; ++q) {
          const double kq = k[q] * inv_p;
          dst[q][0] = -kq * src[q][1];
          dst[q][1] = kq * src[q][0];
        }
      }
      detail::c2r_many(d, n, levels, w.tmp.data(), w.g[a].data());
    }
  }

  // Divergence of ws->s (levels node levels) into ws->divs.
  void node_divergence(int levels) const {
    Workspace& w = *ws;
    const double inv_p = 1.0 / static_cast<double>(p);
    for (int a = 0; a < d; ++a) {
      detail::r2c_many(d, n, levels, w.s[a].data(), a == 0 ? w.tmp.data() : w.vhat.data());
    }
    for (int i = 0; i < levels; ++i) {
      fftw_complex* acc = w.tmp.data() + i * ph;
      const fftw_complex* s1 = w.vhat.data() + i * ph;
      for (std::size_t q = 0; q < ph; ++q) {
        const double k0 = kder[0][q] * inv_p;
        double re = -k0 * acc[q][1], im = k0 * acc[q][0];
        if (d == 2) {
          const double k1 = kder[1][q] * inv_p;
          re -= k1 * s1[q][1];
          im += k1 * s1[q][0];
        }
        acc[q][0] = re;
        acc[q][1] = im;
      }
    }
    detail::c2r_many(d, n, levels, w.tmp.data(), w.divs.data());
  }

  // Half-gradient of the discrete energy for the full node vector ws->v,
  // rows 0..M into ws->out.
  void residual_rows() const {
    Workspace& w = *ws;
    const simd::KernelTable& kt = simd::active();
    node_gradients(m + 1);
    for (int i = 0; i < m; ++i) {
      simd::StripCellArgs args;
      args.count = p;
      args.dim = d;
      args.inv_dz = 1.0 / dz;
      args.v_lo = w.v.data() + i * p;
      args.v_hi = w.v.data() + (i + 1) * p;
      for (int a = 0; a < d; ++a) {
        args.g_lo[a] = w.g[a].data() + i * p;
        args.g_hi[a] = w.g[a].data() + (i + 1) * p;
        args.b[a] = map.grad_rho_cell(a, i).data();
        args.hflux[a] = w.hflux[a].data() + i * p;
      }
      args.zeta = zeta.data() + i * p;
      args.flux = w.flux.data() + i * p;
      kt.strip_cell_flux(args);
    }
    for (int i = 0; i <= m; ++i) {
      const double* rz = map.rho_z(i).data();
      const double wz = dz * cw[i];
      for (int a = 0; a < d; ++a) {
        double* s = w.s[a].data() + i * p;
        const double* g = w.g[a].data() + i * p;
        const double* hl = i > 0 ? w.hflux[a].data() + (i - 1) * p : nullptr;
        const double* hu = i < m ? w.hflux[a].data() + i * p : nullptr;
        for (std::size_t j = 0; j < p; ++j) {
          double h = 0.0;
          if (hl) h += hl[j];
          if (hu) h += hu[j];
          s[j] = 0.5 * dz * h + wz * rz[j] * g[j];
        }
      }
    }
    node_divergence(m + 1);
    for (int i = 0; i <= m; ++i) {
      double* o = w.out.data() + i * p;
      const double* fl = i > 0 ? w.flux.data() + (i - 1) * p : nullptr;
      const double* fu = i < m ? w.flux.data() + i * p : nullptr;
      const double* dv = w.divs.data() + i * p;
      for (std::size_t j = 0; j < p; ++j) {
        double t = 0.0;
        if (fl) t += fl[j];
        if (fu) t -= fu[j];
        o[j] = t - dv[j];
      }
    }
  }

  // Rows M-1 and M for the top cell only: levels M-1, M given, all lower
  // levels zero (the lower row is only meaningful under that assumption).
  void top_rows(const double* vlo, const double* vhi, double* lower, double* upper) const {
    Workspace& w = *ws;
    std::copy(vlo, vlo + p, w.v.data());
    std::copy(vhi, vhi + p, w.v.data() + p);
    node_gradients(2);
    simd::StripCellArgs args;
    args.count = p;
    args.dim = d;
    args.inv_dz = 1.0 / dz;
    args.v_lo = w.v.data();
    args.v_hi = w.v.data() + p;
    for (int a = 0; a < d; ++a) {
      args.g_lo[a] = w.g[a].data();
      args.g_hi[a] = w.g[a].data() + p;
      args.b[a] = map.grad_rho_cell(a, m - 1).data();
      args.hflux[a] = w.hflux[a].data();
    }
    args.zeta = zeta.data() + (m - 1) * p;
    args.flux = w.flux.data();
    simd::active().strip_cell_flux(args);
    const double* rz_hi = map.rho_z(m).data();
    const double* rz_lo = map.rho_z(m - 1).data();
    for (int a = 0; a < d; ++a) {
      const double* h = w.hflux[a].data();
      const double* glo = w.g[a].data();
      const double* ghi = w.g[a].data() + p;
      double* su = w.s[a].data();
      double* sl = w.s[a].data() + p;
      for (std::size_t j = 0; j < p; ++j) {
        su[j] = 0.5 * dz * h[j] + 0.5 * dz * rz_hi[j] * ghi[j];
        sl[j] = 0.5 * dz * h[j] + dz * rz_lo[j] * glo[j];
      }
    }
    node_divergence(2);
    for (std::size_t j = 0; j < p; ++j) {
      if (upper) upper[j] = w.flux[j] - w.divs[j];
      if (lower) lower[j] = -w.flux[j] - w.divs[p + j];
    }
  }

  // y = A x on interior levels with v_M = 0.
  void apply_interior(const double* x, double* y) const {
    Workspace& w = *ws;
    std::copy(x, x + m * p, w.v.data());
    std::fill(w.v.data() + m * p, w.v.data() + (m + 1) * p, 0.0);
    residual_rows();
    std::copy(w.out.data(), w.out.data() + m * p, y);
  }

  void precondition(const double* r, double* z) const {
    Workspace& w = *ws;
    std::copy(r, r + m * p, w.v.data());
    detail::r2c_many(d, n, m, w.v.data(), w.vhat.data());
    simd::TridiagArgs t;
    t.levels = m;
    t.modes = ph;
    t.x = reinterpret_cast<simd::cplx*>(w.vhat.data());
    t.inv_den = inv_den.data();
    t.cp = cp.data();
    t.off = off.data();
    simd::active().tridiag_solve(t);
    detail::c2r_many(d, n, m, w.vhat.data(), z);
    const double inv_p = 1.0 / static_cast<double>(p);
    for (std::size_t j = 0; j < m * p; ++j) z[j] *= inv_p;
  }

  HarmonicLift solve(const SpectralField& f) const {
    require_real(f, "boundary data f");
    if (!(f.grid() == grid)) throw std::invalid_argument("boundary data lives on a different grid");
    std::lock_guard<std::mutex> lock(mutex);
    Workspace& w = *ws;
    const simd::KernelTable& kt = simd::active();
    const std::size_t cells = m * p;

    std::vector<double> fvals = f.real_values();
    std::vector<double> zeros(p, 0.0);
    double* b = w.q.data();
    std::fill(b, b + cells, 0.0);
    top_rows(zeros.data(), fvals.data(), b + (m - 1) * p, nullptr);
    for (std::size_t j = 0; j < p; ++j) b[(m - 1) * p + j] = -b[(m - 1) * p + j];
    // b lives in q until the first product overwrites it; keep a copy in r.
    double* x = w.x.data();
    double* r = w.r.data();
    double* z = w.z.data();
    double* pp = w.p.data();
    std::copy(b, b + cells, r);
    const double bnorm = std::sqrt(kt.dot(r, r, cells));

    HarmonicLift lift;
    lift.strip = map.strip();
    lift.v.assign((m + 1) * p, 0.0);
    for (std::size_t j = 0; j < p; ++j) lift.v[cells + j] = f[j].real();
    if (bnorm == 0.0) {
      // Interior rows vanish for v = 0: f is constant in the kernel direction.
      const double c = f[0].real();
      bool constant = true;
      for (std::size_t j = 0; j < p; ++j) constant = constant && f[j].real() == c;
      if (constant) std::fill(lift.v.begin(), lift.v.end(), c);
      return lift;
    }

    precondition(r, x);
    apply_interior(x, w.q.data());
    for (std::size_t j = 0; j < cells; ++j) r[j] -= w.q[j];
    precondition(r, z);
    std::copy(z, z + cells, pp);
    double rz = kt.dot(r, z, cells);
    double rnorm = std::sqrt(kt.dot(r, r, cells));
    int it = 0;
    while (rnorm > opts.tolerance * bnorm) {
      if (it >= opts.max_iterations) {
        std::ostringstream os;
        os << "strip solve did not converge: relative residual " << rnorm / bnorm << " after " << it
           << " iterations";
        throw SolveError(os.str());
      }
      apply_interior(pp, w.q.data());
      const double pq = kt.dot(pp, w.q.data(), cells);
      if (!(pq > 0.0)) throw SolveError("strip operator lost positive definiteness (p.Ap <= 0)");
      const double alpha = rz / pq;
      kt.axpy(x, alpha, pp, cells);
      kt.axpy(r, -alpha, w.q.data(), cells);
      rnorm = std::sqrt(kt.dot(r, r, cells));
      ++it;
      if (rnorm <= opts.tolerance * bnorm) break;
      precondition(r, z);
      const double rz_new = kt.dot(r, z, cells);
      kt.xpby(pp, z, rz_new / rz, cells);
      rz = rz_new;
    }
    std::copy(x, x + cells, lift.v.begin());
    lift.iterations = it;
    lift.relative_residual = rnorm / bnorm;
    return lift;
  }

  // Loads lift into ws->v and evaluates all rows.
  void rows_of(const HarmonicLift& lift) const {
    std::copy(lift.v.begin(), lift.v.end(), ws->v.data());
    residual_rows();
  }
};

DirichletNeumann::DirichletNeumann(const SpectralField& eta, double depth, const DnOptions& opts)
    : impl_(std::make_unique<Impl>(eta, depth, opts)) {}
DirichletNeumann::~DirichletNeumann() = default;
DirichletNeumann::DirichletNeumann(DirichletNeumann&&) noexcept = default;
DirichletNeumann& DirichletNeumann::operator=(DirichletNeumann&&) noexcept = default;

const StraighteningMap& DirichletNeumann::map() const { return impl_->map; }
const Grid& DirichletNeumann::grid() const { return impl_->grid; }
double DirichletNeumann::depth() const { return impl_->depth; }

HarmonicLift DirichletNeumann::solve(const SpectralField& f) const { return impl_->solve(f); }

SpectralField DirichletNeumann::conormal_trace(const HarmonicLift& lift) const {
  const Impl& im = *impl_;
  std::lock_guard<std::mutex> lock(im.mutex);
  std::vector<double> top(im.p);
  im.top_rows(lift.v.data() + (im.m - 1) * im.p, lift.v.data() + im.m * im.p, nullptr, top.data());
  double mean = 0.0;
  for (double v : top) mean += v;
  mean /= static_cast<double>(im.p);
  for (double& v : top) v -= mean;
  return SpectralField::from_real(im.grid, top);
}

SpectralField DirichletNeumann::apply(const SpectralField& f) const { return conormal_trace(solve(f)); }

namespace {

// One-sided second-order d_z v at z = 0.
std::vector<double> top_dz(const HarmonicLift& lift) {
  const std::size_t p = lift.strip.x.size();
  const int m = lift.strip.levels;
  const double dz = lift.strip.dz();
  std::vector<double> r(p);
  for (std::size_t j = 0; j < p; ++j)
    r[j] = (3.0 * lift.v[m * p + j] - 4.0 * lift.v[(m - 1) * p + j] + lift.v[(m - 2) * p + j]) / (2.0 * dz);
  return r;
}

}  // namespace

SpectralField DirichletNeumann::pointwise_trace(const HarmonicLift& lift) const {
  const Impl& im = *impl_;
  const std::vector<double> vz = top_dz(lift);
  const std::vector<SpectralField> gv = gradient(lift.level(im.m));
  std::vector<double> out(im.p);
  const auto rz = im.map.rho_z(im.m);
  for (std::size_t j = 0; j < im.p; ++j) {
    double gg = 0.0, gd = 0.0;
    for (int a = 0; a < im.d; ++a) {
      const double gr = im.map.grad_rho(a, im.m)[j];
      gg += gr * gr;
      gd += gr * gv[a][j].real();
    }
    out[j] = (1.0 + gg) / rz[j] * vz[j] - gd;
  }
  return SpectralField::from_real(im.grid, out);
}

SpectralField DirichletNeumann::divergence_form_trace(const HarmonicLift& lift) const {
  const Impl& im = *impl_;
  const std::vector<double> vz = top_dz(lift);
  const std::vector<SpectralField> gv = gradient(lift.level(im.m));
  std::vector<double> out(im.p);
  const auto rz = im.map.rho_z(im.m);
  for (std::size_t j = 0; j < im.p; ++j) {
    const double l1 = vz[j] / rz[j];
    double dot = 0.0;
    for (int a = 0; a < im.d; ++a) {
      const double gr = im.map.grad_rho(a, im.m)[j];
      const double l2 = gv[a][j].real() - gr / rz[j] * vz[j];
      dot += gr * l2;
    }
    out[j] = l1 - dot;
  }
  return SpectralField::from_real(im.grid, out);
}

double DirichletNeumann::energy_squared(const HarmonicLift& lift) const {
  const Impl& im = *impl_;
  std::lock_guard<std::mutex> lock(im.mutex);
  Workspace& w = *im.ws;
  std::copy(lift.v.begin(), lift.v.end(), w.v.data());
  im.node_gradients(im.m + 1);
  double total = 0.0;
  for (int i = 0; i < im.m; ++i) {
    const double* zeta = im.zeta.data() + i * im.p;
    double s = 0.0;
    for (std::size_t j = 0; j < im.p; ++j) {
      const double a = (w.v[(i + 1) * im.p + j] - w.v[i * im.p + j]) / im.dz;
      double cross = 0.0;
      for (int c = 0; c < im.d; ++c) {
        const double gbar = 0.5 * (w.g[c][i * im.p + j] + w.g[c][(i + 1) * im.p + j]);
        cross += im.map.grad_rho_cell(c, i)[j] * gbar;
      }
      s += zeta[j] * a * a - 2.0 * cross * a;
    }
    total += im.dz * s;
  }
  for (int i = 0; i <= im.m; ++i) {
    const auto rz = im.map.rho_z(i);
    double s = 0.0;
    for (std::size_t j = 0; j < im.p; ++j) {
      double gg = 0.0;
      for (int c = 0; c < im.d; ++c) gg += w.g[c][i * im.p + j] * w.g[c][i * im.p + j];
      s += rz[j] * gg;
    }
    total += im.dz * im.cw[i] * s;
  }
  return total * im.grid.cell_weight();
}

EnergyFlux DirichletNeumann::energy_and_flux(const SpectralField& f) const {
  const HarmonicLift lift = solve(f);
  const SpectralField gf = conormal_trace(lift);
  EnergyFlux r;
  r.energy_squared = energy_squared(lift);
  r.flux = integrate(pointwise_product(f, gf)).real();
  r.mismatch = std::abs(r.flux - r.energy_squared);
  return r;
}

SpectralField DirichletNeumann::kinetic_gradient(const SpectralField& psi) const { return kinetic_gradient(solve(psi)); }

SpectralField DirichletNeumann::kinetic_gradient(const HarmonicLift& lift) const {
  const Impl& im = *impl_;
  if (im.map.mode() != StraighteningMode::linear)
    throw std::logic_error("discrete kinetic gradient is available for the linear straightening only");
  std::lock_guard<std::mutex> lock(im.mutex);
  Workspace& w = *im.ws;
  std::copy(lift.v.begin(), lift.v.end(), w.v.data());
  im.node_gradients(im.m + 1);
  const std::size_t p = im.p;
  std::vector<double> s(p, 0.0);
  std::vector<std::vector<double>> wv(im.d, std::vector<double>(p, 0.0));
  const auto rz = im.map.rho_z(0);  // eta + h on every level
  for (int i = 0; i < im.m; ++i) {
    const double lift_z = 1.0 + im.map.strip().z_cell(i);
    for (std::size_t j = 0; j < p; ++j) {
      const double a = (w.v[(i + 1) * p + j] - w.v[i * p + j]) / im.dz;
      s[j] -= im.dz * im.zeta[i * p + j] * a * a / rz[j];
      for (int c = 0; c < im.d; ++c) {
        const double gbar = 0.5 * (w.g[c][i * p + j] + w.g[c][(i + 1) * p + j]);
        const double b = im.map.grad_rho_cell(c, i)[j];
        wv[c][j] += im.dz * lift_z * 2.0 * a * (b * a / rz[j] - gbar);
      }
    }
  }
  for (int i = 0; i <= im.m; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double gg = 0.0;
      for (int c = 0; c < im.d; ++c) gg += w.g[c][i * p + j] * w.g[c][i * p + j];
      s[j] += im.dz * im.cw[i] * gg;
    }
  }
  std::vector<SpectralField> wf;
  for (int c = 0; c < im.d; ++c) wf.push_back(SpectralField::from_real(im.grid, wv[c]));
  SpectralField out = SpectralField::from_real(im.grid, s);
  out -= divergence(wf);
  out *= 0.5;
  return out.real_part();
}

// ---------------------------------------------------------------------------

SpectralField dn_apply(const SpectralField& eta, const SpectralField& f, double depth, const DnOptions& opts) {
  return DirichletNeumann(eta, depth, opts).apply(f);
}

SpectralField dn_flat_exact(const SpectralField& f, double depth) {
  return apply_multiplier(flat_dirichlet_neumann(f.grid(), depth), f);
}

EnergyFlux energy_and_flux(const SpectralField& eta, const SpectralField& f, double depth, const DnOptions& opts) {
  return DirichletNeumann(eta, depth, opts).energy_and_flux(f);
}

VelocityTraces velocity_traces(const SpectralField& eta, const SpectralField& psi, const SpectralField& g_psi) {
  const std::vector<SpectralField> ge = gradient(eta);
  const std::vector<SpectralField> gp = gradient(psi);
  const Grid& g = eta.grid();
  VelocityTraces t;
  t.b = SpectralField(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    double num = g_psi[j].real(), den = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
      num += ge[a][j].real() * gp[a][j].real();
      den += ge[a][j].real() * ge[a][j].real();
    }
    t.b[j] = num / den;
  }
  for (int a = 0; a < g.dim(); ++a) {
    SpectralField v(g);
    for (std::size_t j = 0; j < g.size(); ++j) v[j] = gp[a][j].real() - t.b[j].real() * ge[a][j].real();
    t.v.push_back(v);
  }
  return t;
}

SpectralField shape_derivative(const SpectralField& eta, const SpectralField& psi, const SpectralField& f,
                               double depth, const DnOptions& opts) {
  const DirichletNeumann dn(eta, depth, opts);
  const VelocityTraces t = velocity_traces(eta, psi, dn.apply(psi));
  SpectralField r = dn.apply(product(t.b, f));
  r *= -1.0;
  std::vector<SpectralField> vf;
  for (const SpectralField& v : t.v) vf.push_back(product(v, f));
  r -= divergence(vf);
  return r.real_part();
}

void write_strip(std::ostream& os, const HarmonicLift& lift) {
  const Grid& g = lift.strip.x;
  const std::size_t p = g.size();
  os << "# strip " << g.dim() << ' ' << g.n() << ' ' << lift.strip.levels << ' ' << std::setprecision(17) << kTwoPi
     << '\n';
  for (int i = 0; i <= lift.strip.levels; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double x, y;
      g.coordinates(j, x, y);
      os << x << ' ';
      if (g.dim() == 2) os << y << ' ';
      os << lift.strip.z(i) << ' ' << lift.v[i * p + j] << '\n';
    }
  }
}

}  // namespace wwlab
