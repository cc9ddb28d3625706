#include "wwlab/waterwaves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace wwlab {

namespace {

SpectralField slope_squared(const std::vector<SpectralField>& grad) {
  SpectralField s(grad[0].grid());
  for (const auto& g : grad)
    for (std::size_t j = 0; j < s.size(); ++j) s[j] += g[j].real() * g[j].real();
  return s;
}

SpectralField mul(const SpectralField& a, const SpectralField& b, bool dealiased) {
  return dealiased ? product(a, b) : pointwise_product(a, b);
}

SpectralField dot(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b, bool dealiased = true) {
  SpectralField s = mul(a[0], b[0], dealiased);
  for (std::size_t c = 1; c < a.size(); ++c) s += mul(a[c], b[c], dealiased);
  return s;
}

SpectralField finish(const SpectralField& u, bool dealiased) {
  return dealiased ? dealias(u.real_part()) : u.real_part();
}

SpectralField g_psi(const SurfaceState& s, const DnOptions& dn) {
  return DirichletNeumann(s.eta, s.params.depth, dn).apply(s.psi).real_part();
}

// The undealiased form is the exact grid gradient of the quadrature of sqrt(1+|grad eta|^2).
SpectralField curvature(const SpectralField& eta, bool dealiased) {
  const auto ge = gradient(eta);
  SpectralField w = slope_squared(ge);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = 1.0 / std::sqrt(1.0 + w[j].real());
  std::vector<SpectralField> flux;
  for (const auto& g : ge) flux.push_back(dealiased ? product(g, w) : pointwise_product(g, w));
  return (-divergence(flux)).real_part();
}

Tendency assemble(const SurfaceState& s, const SpectralField& gpsi, bool dealiased) {
  const auto ge = gradient(s.eta);
  const auto gp = gradient(s.psi);
  SpectralField w = slope_squared(ge);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = 1.0 / (1.0 + w[j].real());
  const SpectralField num = dot(ge, gp, dealiased) + gpsi;
  SpectralField psi_t = -s.params.gravity * s.eta - curvature(s.eta, dealiased);
  psi_t -= 0.5 * dot(gp, gp, dealiased);
  psi_t += 0.5 * mul(mul(num, num, dealiased), w, dealiased);
  return {finish(gpsi, dealiased), finish(psi_t, dealiased)};
}

bool finite_state(const SurfaceState& s) { return s.eta.all_finite() && s.psi.all_finite(); }

SurfaceState advance(const SurfaceState& s, const Tendency& k, double h) {
  SurfaceState r = s;
  for (std::size_t j = 0; j < r.eta.size(); ++j) {
    r.eta[j] += h * k.eta_t[j];
    r.psi[j] += h * k.psi_t[j];
  }
  return r;
}

void check_separation(const SurfaceState& s, double t) {
  if (!finite_state(s)) throw EvolutionError("non-finite surface state", t);
  if (s.eta.min_real() + s.params.depth <= 0.0) throw EvolutionError("surface touches the bottom", t);
}

}  // namespace

void validate_state(const SurfaceState& s) {
  if (!(s.params.depth > 0.0)) throw std::invalid_argument("depth must be positive");
  if (!(s.params.gravity >= 0.0)) throw std::invalid_argument("gravity must be non-negative");
  if (!(s.eta.grid() == s.psi.grid())) throw std::invalid_argument("eta and psi live on different grids");
  if (!s.eta.is_real() || !s.psi.is_real()) throw std::invalid_argument("eta and psi must be real");
  if (!finite_state(s)) throw std::invalid_argument("non-finite surface state");
  if (s.eta.min_real() + s.params.depth <= 0.0) throw std::invalid_argument("surface below the bottom");
}

VelocityTraces compute_BV(const SurfaceState& s, const DnOptions& dn) {
  return velocity_traces(s.eta, s.psi, g_psi(s, dn));
}

SpectralField mean_curvature(const SpectralField& eta) { return curvature(eta, true); }

Tendency rhs(const SurfaceState& s, const DnOptions& dn, KineticForm form, bool dealiased) {
  if (form == KineticForm::closed_form) return assemble(s, g_psi(s, dn), dealiased);
  const DirichletNeumann op(s.eta, s.params.depth, dn);
  const HarmonicLift lift = op.solve(s.psi);
  SpectralField psi_t = -s.params.gravity * s.eta - curvature(s.eta, false) - op.kinetic_gradient(lift);
  return {finish(remove_mean(op.conormal_trace(lift)), dealiased), finish(psi_t, dealiased)};
}

Tendency rhs_alternate(const SurfaceState& s, const DnOptions& dn) {
  const VelocityTraces bv = compute_BV(s, dn);
  const auto ge = gradient(s.eta);
  const auto gp = gradient(s.psi);
  SpectralField eta_t = bv.b - dot(bv.v, ge);
  SpectralField psi_t = -dot(bv.v, gp) - s.params.gravity * s.eta;
  psi_t += 0.5 * dot(bv.v, bv.v);
  psi_t += 0.5 * product(bv.b, bv.b);
  psi_t -= mean_curvature(s.eta);
  return {dealias(eta_t.real_part()), dealias(psi_t.real_part())};
}

double tendency_mismatch(const Tendency& a, const Tendency& b) {
  auto rel = [](const SpectralField& x, const SpectralField& y) {
    const double scale = std::max(x.max_abs(), std::numeric_limits<double>::min());
    return (x - y).max_abs() / scale;
  };
  return std::max(rel(a.eta_t, b.eta_t), rel(a.psi_t, b.psi_t));
}

double hamiltonian(const SurfaceState& s, const DnOptions& dn) {
  const SpectralField gpsi = g_psi(s, dn);
  const auto ge = gradient(s.eta);
  const SpectralField w = slope_squared(ge);
  double kinetic = 0.0, potential = 0.0, surface = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    kinetic += s.psi[j].real() * gpsi[j].real();
    potential += s.eta[j].real() * s.eta[j].real();
    const double q = w[j].real();
    surface += q / (std::sqrt(1.0 + q) + 1.0);  // sqrt(1+q) - 1 without cancellation
  }
  const double cw = s.eta.grid().cell_weight();
  return cw * (0.5 * kinetic + 0.5 * s.params.gravity * potential + surface);
}

SurfaceState step_rk4(const SurfaceState& s, double dt, const DnOptions& dn, KineticForm form, bool dealiased) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Tendency k1 = rhs(s, dn, form, dealiased);
  SurfaceState s2 = advance(s, k1, 0.5 * dt);
  check_separation(s2, s.t + 0.5 * dt);
  const Tendency k2 = rhs(s2, dn, form, dealiased);
  SurfaceState s3 = advance(s, k2, 0.5 * dt);
  check_separation(s3, s.t + 0.5 * dt);
  const Tendency k3 = rhs(s3, dn, form, dealiased);
  SurfaceState s4 = advance(s, k3, dt);
  check_separation(s4, s.t + dt);
  const Tendency k4 = rhs(s4, dn, form, dealiased);
  SurfaceState r = s;
  for (std::size_t j = 0; j < r.eta.size(); ++j) {
    r.eta[j] += dt / 6.0 * (k1.eta_t[j] + 2.0 * k2.eta_t[j] + 2.0 * k3.eta_t[j] + k4.eta_t[j]);
    r.psi[j] += dt / 6.0 * (k1.psi_t[j] + 2.0 * k2.psi_t[j] + 2.0 * k3.psi_t[j] + k4.psi_t[j]);
  }
  r.t = s.t + dt;
  check_separation(r, r.t);
  return r;
}

TrajectoryRecord evolve(const SurfaceState& initial, double duration, double dt, const EvolveOptions& opts,
                        const std::vector<Observer>& observers) {
  validate_state(initial);
  if (!(dt > 0.0) || !(duration >= 0.0)) throw std::invalid_argument("dt must be positive and duration non-negative");
  const double dx = initial.eta.grid().spacing();
  if (dt > opts.cfl * std::pow(dx, 1.5))
    throw std::invalid_argument("dt exceeds the dispersive CFL bound cfl * dx^{3/2}");

  TrajectoryRecord rec;
  auto sample = [&](const SurfaceState& s) {
    rec.times.push_back(s.t);
    rec.energy.push_back(hamiltonian(s, opts.dn));
    rec.mass.push_back(integrate(s.eta).real());
    rec.eta_norm.push_back(sobolev_norm(s.eta, opts.sobolev_s + 0.5));
    rec.psi_norm.push_back(sobolev_norm(s.psi, opts.sobolev_s));
    if (opts.keep_states) rec.states.push_back(s);
  };
  auto notify = [&](const SurfaceState& s) {
    for (const auto& ob : observers) ob(s);
  };

  SurfaceState s = initial;
  const double t_end = initial.t + duration;
  const long steps = std::max(0L, static_cast<long>(std::ceil(duration / dt - 1e-9)));
  double next_sample = initial.t + opts.sample_interval;
  sample(s);
  notify(s);
  for (long n = 0; n < steps; ++n) {
    const double h = std::min(dt, t_end - s.t);
    if (h <= 0.0) break;
    try {
      if (opts.check_alternate) {
        const double mm = tendency_mismatch(rhs(s, opts.dn), rhs_alternate(s, opts.dn));
        rec.max_alternate_mismatch = std::max(rec.max_alternate_mismatch, mm);
        if (mm > opts.alternate_tolerance) throw EvolutionError("rhs and alternate rhs disagree", s.t);
      }
      s = step_rk4(s, h, opts.dn, opts.kinetic, opts.dealias);
    } catch (const EvolutionError& e) {
      rec.aborted = true;
      rec.abort_time = e.time();
      rec.abort_reason = e.what();
      break;
    } catch (const std::runtime_error& e) {  // DN solve or straightening failure
      rec.aborted = true;
      rec.abort_time = s.t;
      rec.abort_reason = e.what();
      break;
    }
    if (n == steps - 1) s.t = t_end;
    const bool last = n == steps - 1;
    notify(s);
    if (opts.sample_interval <= 0.0 || s.t >= next_sample - 1e-9 * dt || last) {
      sample(s);
      while (opts.sample_interval > 0.0 && next_sample <= s.t + 1e-9 * dt) next_sample += opts.sample_interval;
    }
  }
  rec.final_state = s;
  return rec;
}

double linear_frequency(double k, const PhysicalParams& p) {
  return std::sqrt((p.gravity + k * k) * k * std::tanh(p.depth * k));
}

void linear_propagator(double k, const PhysicalParams& p, double t, double m[2][2]) {
  if (!(k > 0.0)) throw std::invalid_argument("linear_reference needs a nonzero mode");
  const double w = linear_frequency(k, p);
  const double a = k * std::tanh(p.depth * k);  // eta_t = a psi
  const double b = p.gravity + k * k;           // psi_t = -b eta
  const double c = std::cos(w * t), s = std::sin(w * t);
  m[0][0] = c;
  m[0][1] = a / w * s;
  m[1][0] = -b / w * s;
  m[1][1] = c;
}

ModeState linear_reference(double k, const PhysicalParams& p, double t, const ModeState& x) {
  double m[2][2];
  linear_propagator(k, p, t, m);
  return {m[0][0] * x.eta + m[0][1] * x.psi, m[1][0] * x.eta + m[1][1] * x.psi};
}

SurfaceState linear_evolve(const SurfaceState& s, double t) {
  const Grid& g = s.eta.grid();
  std::vector<cplx> e = s.eta.coefficients(), p = s.psi.coefficients();
  for (std::size_t f = 0; f < g.size(); ++f) {
    const double k = g.wavevector(f).norm();
    if (k == 0.0) {
      p[f] -= s.params.gravity * e[f] * t;
      continue;
    }
    const ModeState r = linear_reference(k, s.params, t, {e[f], p[f]});
    e[f] = r.eta;
    p[f] = r.psi;
  }
  SurfaceState r = s;
  r.t = s.t + t;
  r.eta = SpectralField::from_coefficients(g, e).real_part();
  r.psi = SpectralField::from_coefficients(g, p).real_part();
  return r;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& r) {
  os << "t,H,eta_norm,psi_norm,mass\n";
  os.precision(17);
  for (std::size_t i = 0; i < r.times.size(); ++i)
    os << r.times[i] << ',' << r.energy[i] << ',' << r.eta_norm[i] << ',' << r.psi_norm[i] << ',' << r.mass[i] << '\n';
}

}  // namespace wwlab
