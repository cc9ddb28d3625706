#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wwlab/waterwaves.hpp"

namespace wwlab {

// L^2, H^s and Holder-type norms below are the grid-averaged ones of
// spectral_core / littlewood_paley; W^{r+1/2,inf} is measured in C^{r+1/2}_*.
struct MonitorConfig {
  double s = 0.0;  // <= 0 picks default_sobolev_index(d)
  double r = 2.1;
  double eps_star = 0.1;
  double eps = 0.1;
  int stride = 1;
  bool ab = true;       // compute A, B
  bool blowup = true;   // compute P, Q and their (V, B) variants

  double sobolev(int dim) const;
  // Throws std::invalid_argument unless s > 3/2 + d/2, r > 2, eps_star > 0, eps > 0, stride >= 1.
  void validate(int dim) const;
};

struct MonitorAB {
  double a = 0.0;
  double b = 1.0;
};
// A = |eta|_{C^{2+e*}} + |eta|_{L^2} + |grad psi|_{B^0} + E(eta, psi),
// B = |eta|_{C^{5/2+e*}} + |grad psi|_{B^1} + 1.
MonitorAB monitor_AB(const SurfaceState& state, double eps_star, const DnOptions& dn = {});

// Everything measured on one snapshot.
struct MonitorSample {
  double t = 0.0;
  double hamiltonian = 0.0;
  double a = 0.0, b = 1.0;
  double sobolev = 0.0;     // |eta|_{H^{s+1/2}} + |psi|_{H^s}
  double strichartz = 0.0;  // |eta|_{C^{r+1/2}_*} + |grad psi|_{B^1}
  double p_eps = 0.0;       // |eta|_{C^{2+e}} + |grad psi|_{B^0}
  double q_eps = 0.0;       // |eta|_{C^{5/2+e}} + |grad psi|_{C^1_*}
  double p0_eps = 0.0;      // |eta|_{C^{2+e}} + |(V, B)|_{B^0}
  double q0_eps = 0.0;      // |eta|_{C^{5/2+e}} + |(V, B)|_{C^1_*}
  double separation = 0.0;  // min eta + h
  // Ingredients of the growth audit.
  double eta_c2 = 0.0;      // |eta|_{C^{2+e*}}
  double grad_psi_b0 = 0.0;
  double grad_psi_c1 = 0.0;
};
MonitorSample measure(const SurfaceState& state, const MonitorConfig& cfg, const DnOptions& dn = {});

struct DiagnosticsRow {
  MonitorSample sample;
  double m_running = 0.0;    // M_{s,t}: running sup of sample.sobolev
  double n_running = 0.0;    // N_{r,t}: trapezoid integral of sample.strichartz
  double p_running = 0.0;    // P_eps: running sup
  double q_integral = 0.0;   // int Q_eps dt
  double p0_running = 0.0;
  double q0_integral = 0.0;
  double h_min = 0.0;        // running inf of separation
};

// Incremental accumulation of running suprema and trapezoid integrals.
class DiagnosticsRecorder {
 public:
  DiagnosticsRecorder(MonitorConfig cfg, DnOptions dn = {});
  void observe(const SurfaceState& state);  // honours the stride
  void add(const MonitorSample& sample);
  const std::vector<DiagnosticsRow>& rows() const { return rows_; }
  const MonitorConfig& config() const { return cfg_; }

 private:
  MonitorConfig cfg_;
  DnOptions dn_;
  long seen_ = 0;
  std::vector<DiagnosticsRow> rows_;
};

struct BlowupSummary {
  double p_eps = 0.0;
  double q_integral = 0.0;
  double p0_eps = 0.0;
  double q0_integral = 0.0;
  double h_min = 0.0;
};
// From stored snapshots; agrees with a recorder fed the same states.
BlowupSummary blowup_monitors(const std::vector<SurfaceState>& trajectory, const MonitorConfig& cfg,
                              const DnOptions& dn = {});
BlowupSummary summarize(const std::vector<DiagnosticsRow>& rows);

// Consistency audit of the double-exponential growth bound with a scalar F
// fitted at t = 0 and multiplied by `slack_factor`:
//   M^2_t <= F (M^2_0 + 2e) exp(exp(int_0^t Q)) - 2e,  Q = 1 + |grad psi|_{C^1} + |eta|_{C^{2+e*}}.
// This checks consistency along the run, it does not certify the bound.
struct GrowthAudit {
  double sigma = 0.0;
  double fitted_f = 0.0;
  double worst_slack = 0.0;  // min over samples of rhs / lhs (infinity when lhs = 0)
  bool satisfied = true;
  std::vector<double> times, lhs, rhs, p_squared;
};
// sigma must exceed 2 + d/2.
GrowthAudit growth_bound_audit(const std::vector<SurfaceState>& trajectory, double sigma, double eps_star,
                               double slack_factor = 10.0, const DnOptions& dn = {});

struct LogInterp {
  double lhs = 0.0;  // |u|_{B^1}
  double rhs = 0.0;  // (1 + |u|_{C^1_*}) ln(e + |u|^2_{H^mu})
  double ratio = 0.0;
};
// mu must exceed 1 + d/2.
LogInterp log_interp_check(const SpectralField& u, double mu);
// Max ratio over `count` random multi-band fields with modes |k| <= kmax;
// the same seed gives the same functions on any grid that resolves kmax.
double log_interp_suite(const Grid& grid, int count, int kmax, double mu, unsigned long long seed);

// Difference norms for two solutions.
struct ContractionConfig {
  double s = 0.0;  // <= 0 picks 2.5 (d=1) / 3.0 (d=2)
  double r = 2.1;
  double sobolev(int dim) const;
  // mu = 3/20 and p = 4 in d = 1, mu = 3/10 and p = 2 in d = 2.
  static double mu(int dim) { return dim == 1 ? 0.15 : 0.3; }
  static int time_exponent(int dim) { return dim == 1 ? 4 : 2; }
  // Throws unless s > 3/2 + d/2 and 2 < r < s - d/2 + mu.
  void validate(int dim) const;
};

struct ContractionResult {
  std::vector<double> times, p_s, p_h;
  double p_s_sup = 0.0;
  double p_h_lp = 0.0;  // (int P_H^p dt)^{1/p}
  double p_t = 0.0;
  double ratio = 0.0;   // P_T / P_S(0)
  bool aborted = false;
  double abort_time = 0.0;
  std::string abort_reason;
};
// P_S = |d eta|_{H^{s-1}} + |d psi|_{H^{s-3/2}}, P_H = |d eta|_{C^{r-1}_*} + |d psi|_{C^{r-3/2}_*}.
ContractionResult contraction_harness(const SurfaceState& first, const SurfaceState& second, double duration,
                                      double dt, const ContractionConfig& cfg = {}, const EvolveOptions& opts = {});

// "t,H,A,B,M,N,P_eps,Q_eps,int_Q_eps,P0_eps,Q0_eps,int_Q0_eps,h_min"
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);
// "t,P_S,P_H"
void write_contraction_csv(std::ostream& os, const ContractionResult& r);

}  // namespace wwlab
