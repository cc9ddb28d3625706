#include "wwlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "wwlab/littlewood_paley.hpp"
#include "wwlab/symmetrizer.hpp"

namespace wwlab {

namespace {

constexpr double kE = 2.718281828459045235360287471352662498;

struct Traces {
  SpectralField g_psi;
  double energy = 0.0;
};

Traces traces(const SurfaceState& s, const DnOptions& dn) {
  const DirichletNeumann op(s.eta, s.params.depth, dn);
  const HarmonicLift lift = op.solve(s.psi);
  Traces t;
  t.g_psi = remove_mean(op.conormal_trace(lift)).real_part();
  t.energy = std::sqrt(std::max(0.0, op.energy_squared(lift)));
  return t;
}

double trapezoid_step(double t0, double f0, double t1, double f1) { return 0.5 * (t1 - t0) * (f0 + f1); }

}  // namespace

double MonitorConfig::sobolev(int dim) const { return s > 0.0 ? s : default_sobolev_index(dim); }

void MonitorConfig::validate(int dim) const {
  if (!(sobolev(dim) > 1.5 + 0.5 * dim)) throw std::invalid_argument("monitor s must exceed 3/2 + d/2");
  if (!(r > 2.0)) throw std::invalid_argument("monitor r must exceed 2");
  if (!(eps_star > 0.0) || !(eps > 0.0)) throw std::invalid_argument("eps and eps_star must be positive");
  if (stride < 1) throw std::invalid_argument("stride must be at least 1");
}

MonitorAB monitor_AB(const SurfaceState& s, double eps_star, const DnOptions& dn) {
  const auto gp = gradient(s.psi);
  const Traces tr = traces(s, dn);
  MonitorAB m;
  m.a = zygmund_norm(s.eta, 2.0 + eps_star) + sobolev_norm(s.eta, 0.0) + b_norm(gp, 0.0) + tr.energy;
  m.b = zygmund_norm(s.eta, 2.5 + eps_star) + b_norm(gp, 1.0) + 1.0;
  return m;
}

MonitorSample measure(const SurfaceState& s, const MonitorConfig& cfg, const DnOptions& dn) {
  const int d = s.eta.grid().dim();
  const double sob = cfg.sobolev(d);
  const auto gp = gradient(s.psi);
  const Traces tr = traces(s, dn);
  MonitorSample m;
  m.t = s.t;
  m.sobolev = sobolev_norm(s.eta, sob + 0.5) + sobolev_norm(s.psi, sob);
  m.strichartz = zygmund_norm(s.eta, cfg.r + 0.5) + b_norm(gp, 1.0);
  m.separation = s.eta.min_real() + s.params.depth;
  m.eta_c2 = zygmund_norm(s.eta, 2.0 + cfg.eps_star);
  m.grad_psi_b0 = b_norm(gp, 0.0);
  m.grad_psi_c1 = zygmund_norm(gp, 1.0);

  // Hamiltonian from the same lift.
  double kinetic = 0.0, potential = 0.0, surface = 0.0;
  const auto ge = gradient(s.eta);
  for (std::size_t j = 0; j < s.eta.size(); ++j) {
    kinetic += s.psi[j].real() * tr.g_psi[j].real();
    potential += s.eta[j].real() * s.eta[j].real();
    double q = 0.0;
    for (const auto& g : ge) q += g[j].real() * g[j].real();
    surface += q / (std::sqrt(1.0 + q) + 1.0);
  }
  m.hamiltonian = s.eta.grid().cell_weight() * (0.5 * kinetic + 0.5 * s.params.gravity * potential + surface);

  if (cfg.ab) {
    m.a = zygmund_norm(s.eta, 2.0 + cfg.eps_star) + sobolev_norm(s.eta, 0.0) + m.grad_psi_b0 + tr.energy;
    m.b = zygmund_norm(s.eta, 2.5 + cfg.eps_star) + b_norm(gp, 1.0) + 1.0;
  }
  if (cfg.blowup) {
    const double c2 = zygmund_norm(s.eta, 2.0 + cfg.eps);
    const double c52 = zygmund_norm(s.eta, 2.5 + cfg.eps);
    m.p_eps = c2 + m.grad_psi_b0;
    m.q_eps = c52 + m.grad_psi_c1;
    const VelocityTraces bv = velocity_traces(s.eta, s.psi, tr.g_psi);
    std::vector<SpectralField> vb = bv.v;
    vb.push_back(bv.b);
    m.p0_eps = c2 + b_norm(vb, 0.0);
    m.q0_eps = c52 + zygmund_norm(vb, 1.0);
  }
  return m;
}

DiagnosticsRecorder::DiagnosticsRecorder(MonitorConfig cfg, DnOptions dn) : cfg_(cfg), dn_(dn) {}

void DiagnosticsRecorder::observe(const SurfaceState& state) {
  if (seen_++ % cfg_.stride == 0) add(measure(state, cfg_, dn_));
}

void DiagnosticsRecorder::add(const MonitorSample& m) {
  DiagnosticsRow r;
  r.sample = m;
  if (rows_.empty()) {
    r.m_running = m.sobolev;
    r.p_running = m.p_eps;
    r.p0_running = m.p0_eps;
    r.h_min = m.separation;
  } else {
    const DiagnosticsRow& prev = rows_.back();
    const MonitorSample& p = prev.sample;
    r.m_running = std::max(prev.m_running, m.sobolev);
    r.p_running = std::max(prev.p_running, m.p_eps);
    r.p0_running = std::max(prev.p0_running, m.p0_eps);
    r.h_min = std::min(prev.h_min, m.separation);
    r.n_running = prev.n_running + trapezoid_step(p.t, p.strichartz, m.t, m.strichartz);
    r.q_integral = prev.q_integral + trapezoid_step(p.t, p.q_eps, m.t, m.q_eps);
    r.q0_integral = prev.q0_integral + trapezoid_step(p.t, p.q0_eps, m.t, m.q0_eps);
  }
  rows_.push_back(r);
}

BlowupSummary summarize(const std::vector<DiagnosticsRow>& rows) {
  BlowupSummary b;
  if (rows.empty()) return b;
  const DiagnosticsRow& last = rows.back();
  b.p_eps = last.p_running;
  b.q_integral = last.q_integral;
  b.p0_eps = last.p0_running;
  b.q0_integral = last.q0_integral;
  b.h_min = last.h_min;
  return b;
}

BlowupSummary blowup_monitors(const std::vector<SurfaceState>& trajectory, const MonitorConfig& cfg,
                              const DnOptions& dn) {
  MonitorConfig c = cfg;
  c.stride = 1;
  DiagnosticsRecorder rec(c, dn);
  for (const auto& s : trajectory) rec.observe(s);
  return summarize(rec.rows());
}

GrowthAudit growth_bound_audit(const std::vector<SurfaceState>& trajectory, double sigma, double eps_star,
                               double slack_factor, const DnOptions& dn) {
  GrowthAudit a;
  a.sigma = sigma;
  if (trajectory.empty()) return a;
  const int d = trajectory.front().eta.grid().dim();
  if (!(sigma > 2.0 + 0.5 * d)) throw std::invalid_argument("growth audit needs sigma > 2 + d/2");
  if (!(slack_factor > 0.0)) throw std::invalid_argument("slack factor must be positive");

  MonitorConfig cfg;
  cfg.s = sigma;
  cfg.eps_star = eps_star;
  cfg.ab = false;
  cfg.blowup = false;
  const double h0 = hamiltonian(trajectory.front(), dn);
  double m_sup = 0.0, p_sup = 0.0, q_int = 0.0, prev_t = 0.0, prev_q = 0.0;
  double m0_sq = 0.0;
  a.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const MonitorSample m = measure(trajectory[i], cfg, dn);
    const double q = 1.0 + m.grad_psi_c1 + m.eta_c2;
    if (i == 0) {
      m0_sq = m.sobolev * m.sobolev;
      // At t = 0 the bound reads M0^2 <= F (M0^2 + 2e) e - 2e; the smallest F is 1/e.
      a.fitted_f = slack_factor / kE;
    } else {
      q_int += trapezoid_step(prev_t, prev_q, m.t, q);
    }
    prev_t = m.t;
    prev_q = q;
    m_sup = std::max(m_sup, m.sobolev);
    p_sup = std::max(p_sup, m.eta_c2 + m.grad_psi_b0 + h0);
    const double lhs = m_sup * m_sup;
    const double rhs = a.fitted_f * (m0_sq + 2.0 * kE) * std::exp(std::exp(q_int)) - 2.0 * kE;
    a.times.push_back(m.t);
    a.lhs.push_back(lhs);
    a.rhs.push_back(rhs);
    a.p_squared.push_back(p_sup);
    const double slack = lhs > 0.0 ? rhs / lhs : std::numeric_limits<double>::infinity();
    a.worst_slack = std::min(a.worst_slack, slack);
    if (lhs > rhs) a.satisfied = false;
  }
  return a;
}

LogInterp log_interp_check(const SpectralField& u, double mu) {
  const int d = u.grid().dim();
  if (!(mu > 1.0 + 0.5 * d)) throw std::invalid_argument("log interpolation needs mu > 1 + d/2");
  LogInterp r;
  r.lhs = b_norm(u, 1.0);
  const double hm = sobolev_norm(u, mu);
  r.rhs = (1.0 + zygmund_norm(u, 1.0)) * std::log(kE + hm * hm);
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
  return r;
}

double log_interp_suite(const Grid& grid, int count, int kmax, double mu, unsigned long long seed) {
  if (kmax >= grid.n() / 2) throw std::invalid_argument("kmax must stay below the Nyquist frequency");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < count; ++c) {
    // Random decay rate and phases over modes 1..kmax (axis 0 only in d = 2,
    // plus a diagonal family), so the function is grid independent.
    const double decay = 0.5 + 2.0 * unit(rng);
    std::vector<double> amp(kmax + 1), phase(kmax + 1);
    for (int k = 1; k <= kmax; ++k) {
      amp[k] = (0.2 + unit(rng)) * std::pow(static_cast<double>(k), -decay);
      phase[k] = kTwoPi * unit(rng);
    }
    const int d = grid.dim();
    const SpectralField u = SpectralField::from_function(grid, [&](double x, double y) {
      double v = 0.0;
      for (int k = 1; k <= kmax; ++k) v += amp[k] * std::cos(k * (d == 2 ? x + y : x) + phase[k]);
      return v;
    });
    worst = std::max(worst, log_interp_check(u, mu).ratio);
  }
  return worst;
}

double ContractionConfig::sobolev(int dim) const { return s > 0.0 ? s : (dim == 1 ? 2.5 : 3.0); }

void ContractionConfig::validate(int dim) const {
  const double sv = sobolev(dim);
  if (!(sv > 1.5 + 0.5 * dim)) throw std::invalid_argument("contraction s must exceed 3/2 + d/2");
  if (!(r > 2.0 && r < sv - 0.5 * dim + mu(dim)))
    throw std::invalid_argument("contraction r must satisfy 2 < r < s - d/2 + mu");
}

ContractionResult contraction_harness(const SurfaceState& first, const SurfaceState& second, double duration,
                                      double dt, const ContractionConfig& cfg, const EvolveOptions& opts) {
  if (!(first.eta.grid() == second.eta.grid())) throw std::invalid_argument("states live on different grids");
  const int d = first.eta.grid().dim();
  cfg.validate(d);
  const double s = cfg.sobolev(d);
  const int p = ContractionConfig::time_exponent(d);

  EvolveOptions o = opts;
  o.keep_states = true;
  o.sample_interval = 0.0;
  const TrajectoryRecord a = evolve(first, duration, dt, o);
  const TrajectoryRecord b = evolve(second, duration, dt, o);

  ContractionResult r;
  r.aborted = a.aborted || b.aborted;
  if (r.aborted) {
    r.abort_time = a.aborted && b.aborted ? std::min(a.abort_time, b.abort_time)
                                          : (a.aborted ? a.abort_time : b.abort_time);
    r.abort_reason = a.aborted ? a.abort_reason : b.abort_reason;
  }
  const std::size_t n = std::min(a.states.size(), b.states.size());
  double lp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const SpectralField de = (a.states[i].eta - b.states[i].eta).real_part();
    const SpectralField dp = (a.states[i].psi - b.states[i].psi).real_part();
    r.times.push_back(a.states[i].t);
    r.p_s.push_back(sobolev_norm(de, s - 1.0) + sobolev_norm(dp, s - 1.5));
    r.p_h.push_back(zygmund_norm(de, cfg.r - 1.0) + zygmund_norm(dp, cfg.r - 1.5));
    r.p_s_sup = std::max(r.p_s_sup, r.p_s.back());
    if (i > 0)
      lp += trapezoid_step(r.times[i - 1], std::pow(r.p_h[i - 1], p), r.times[i], std::pow(r.p_h[i], p));
  }
  r.p_h_lp = std::pow(lp, 1.0 / p);
  r.p_t = r.p_s_sup + r.p_h_lp;
  r.ratio = !r.p_s.empty() && r.p_s.front() > 0.0 ? r.p_t / r.p_s.front() : 0.0;
  return r;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  os << "t,H,A,B,M,N,P_eps,Q_eps,int_Q_eps,P0_eps,Q0_eps,int_Q0_eps,h_min\n";
  os.precision(17);
  for (const auto& r : rows) {
    const MonitorSample& m = r.sample;
    os << m.t << ',' << m.hamiltonian << ',' << m.a << ',' << m.b << ',' << r.m_running << ',' << r.n_running << ','
       << r.p_running << ',' << m.q_eps << ',' << r.q_integral << ',' << r.p0_running << ',' << m.q0_eps << ','
       << r.q0_integral << ',' << r.h_min << '\n';
  }
}

void write_contraction_csv(std::ostream& os, const ContractionResult& r) {
  os << "t,P_S,P_H\n";
  os.precision(17);
  for (std::size_t i = 0; i < r.times.size(); ++i) os << r.times[i] << ',' << r.p_s[i] << ',' << r.p_h[i] << '\n';
}

}  // namespace wwlab
