#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "wwlab/diagnostics.hpp"
#include "wwlab/littlewood_paley.hpp"

using namespace wwlab;

namespace {

SpectralField fx(const Grid& g, std::function<double(double)> f) {
  return SpectralField::from_function(g, [f](double x, double) { return f(x); });
}
SurfaceState make_state(const Grid& g, double a) {
  SurfaceState s;
  s.eta = fx(g, [a](double x) { return a * std::cos(x) + 0.2 * a * std::sin(3 * x); });
  s.psi = fx(g, [a](double x) { return a * std::sin(2 * x); });
  return s;
}
DnOptions levels(int m) {
  DnOptions o;
  o.levels = m;
  return o;
}
std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST(MonitorConfig, ValidationAndDefaults) {
  MonitorConfig c;
  EXPECT_DOUBLE_EQ(c.sobolev(1), 2.1);
  EXPECT_DOUBLE_EQ(c.sobolev(2), 2.6);
  EXPECT_NO_THROW(c.validate(1));
  c.s = 2.0;
  EXPECT_THROW(c.validate(1), std::invalid_argument);
  c.s = 0.0;
  c.r = 2.0;
  EXPECT_THROW(c.validate(1), std::invalid_argument);
  c.r = 2.1;
  c.stride = 0;
  EXPECT_THROW(c.validate(1), std::invalid_argument);
}

TEST(Monitors, RestStateValues) {
  const Grid g(1, 32);
  const SurfaceState s = make_state(g, 0.0);
  const MonitorAB ab = monitor_AB(s, 0.1, levels(16));
  EXPECT_EQ(ab.a, 0.0);
  EXPECT_EQ(ab.b, 1.0);
  const MonitorSample m = measure(s, {}, levels(16));
  EXPECT_EQ(m.sobolev, 0.0);
  EXPECT_EQ(m.p_eps, 0.0);
  EXPECT_EQ(m.q_eps, 0.0);
  EXPECT_EQ(m.hamiltonian, 0.0);
  EXPECT_DOUBLE_EQ(m.separation, 1.0);
}

TEST(Monitors, SampleMatchesIngredientNorms) {
  const Grid g(1, 64);
  const SurfaceState s = make_state(g, 0.05);
  MonitorConfig c;
  const MonitorSample m = measure(s, c, levels(16));
  EXPECT_NEAR(m.sobolev, sobolev_norm(s.eta, 2.6) + sobolev_norm(s.psi, 2.1), 1e-12);
  EXPECT_NEAR(m.separation, 1.0 + s.eta.min_real(), 1e-14);
  EXPECT_GT(m.q_eps, 0.0);
  EXPECT_GE(m.p_eps, m.grad_psi_b0);
  EXPECT_EQ(m.t, 0.0);
  EXPECT_NEAR(m.hamiltonian, hamiltonian(s, levels(16)), 1e-14);
}

TEST(Monitors, MonitorsGrowWithAmplitude) {
  const Grid g(1, 64);
  const MonitorSample a = measure(make_state(g, 0.01), {}, levels(16));
  const MonitorSample b = measure(make_state(g, 0.02), {}, levels(16));
  EXPECT_NEAR(b.sobolev / a.sobolev, 2.0, 1e-12);
  EXPECT_NEAR(b.p_eps / a.p_eps, 2.0, 1e-9);
  EXPECT_GT(b.a, a.a);
  EXPECT_GT(b.b, a.b);
}

TEST(Recorder, RunningQuantitiesAndStride) {
  const Grid g(1, 32);
  MonitorConfig c;
  c.stride = 2;
  DiagnosticsRecorder rec(c, levels(8));
  SurfaceState s = make_state(g, 0.01);
  for (int i = 0; i < 5; ++i) {
    s.t = 0.1 * i;
    s.eta *= 1.1;
    rec.observe(s);
  }
  ASSERT_EQ(rec.rows().size(), 3u);
  const auto& rows = rec.rows();
  EXPECT_NEAR(rows[2].sample.t, 0.4, 1e-15);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].m_running, rows[i - 1].m_running);
    EXPECT_GE(rows[i].p_running, rows[i - 1].p_running);
    EXPECT_GE(rows[i].q_integral, rows[i - 1].q_integral);
    EXPECT_LE(rows[i].h_min, rows[i - 1].h_min);
  }
  const double trap = 0.5 * 0.2 * (rows[0].sample.q_eps + rows[1].sample.q_eps);
  EXPECT_NEAR(rows[1].q_integral, trap, 1e-12 * trap);
}

TEST(Recorder, BatchSummaryMatchesRecorder) {
  const Grid g(1, 32);
  EvolveOptions eo;
  eo.dn = levels(8);
  eo.keep_states = true;
  const TrajectoryRecord tr = evolve(make_state(g, 0.02), 0.05, 0.01, eo);
  ASSERT_FALSE(tr.aborted);
  MonitorConfig c;
  DiagnosticsRecorder rec(c, eo.dn);
  for (const auto& s : tr.states) rec.observe(s);
  const BlowupSummary a = summarize(rec.rows());
  const BlowupSummary b = blowup_monitors(tr.states, c, eo.dn);
  EXPECT_DOUBLE_EQ(a.p_eps, b.p_eps);
  EXPECT_DOUBLE_EQ(a.q_integral, b.q_integral);
  EXPECT_DOUBLE_EQ(a.p0_eps, b.p0_eps);
  EXPECT_DOUBLE_EQ(a.h_min, b.h_min);
}

TEST(GrowthAudit, SatisfiedOnShortSmoothRun) {
  const Grid g(1, 32);
  EvolveOptions eo;
  eo.dn = levels(8);
  eo.keep_states = true;
  const TrajectoryRecord tr = evolve(make_state(g, 0.02), 0.1, 0.01, eo);
  const GrowthAudit au = growth_bound_audit(tr.states, 3.1, 0.1, 10.0, eo.dn);
  EXPECT_TRUE(au.satisfied);
  EXPECT_GT(au.worst_slack, 1.0);
  EXPECT_GT(au.fitted_f, 0.0);
  EXPECT_EQ(au.times.size(), tr.states.size());
  EXPECT_THROW(growth_bound_audit(tr.states, 2.4, 0.1, 10.0, eo.dn), std::invalid_argument);
}

TEST(LogInterp, ExamplesAndSuite) {
  const Grid g(1, 128);
  const LogInterp zero = log_interp_check(SpectralField(g), 2.0);
  EXPECT_EQ(zero.lhs, 0.0);
  const LogInterp c = log_interp_check(fx(g, [](double x) { return std::cos(5 * x); }), 2.0);
  EXPECT_GT(c.lhs, 0.0);
  EXPECT_NEAR(c.ratio, c.lhs / c.rhs, 1e-14);
  EXPECT_THROW(log_interp_check(SpectralField(g), 1.4), std::invalid_argument);
  const double worst = log_interp_suite(g, 10, 40, 2.0, 3);
  EXPECT_GT(worst, 0.0);
  EXPECT_LT(worst, 10.0);
  EXPECT_DOUBLE_EQ(worst, log_interp_suite(g, 10, 40, 2.0, 3));
  // Same functions on a finer grid; sup norms are sampled on the nodes.
  EXPECT_NEAR(worst, log_interp_suite(Grid(1, 256), 10, 40, 2.0, 3), 2e-3 * worst);
}

TEST(Contraction, ConfigDefaultsAndValidation) {
  ContractionConfig c;
  EXPECT_DOUBLE_EQ(c.sobolev(1), 2.5);
  EXPECT_DOUBLE_EQ(c.sobolev(2), 3.0);
  EXPECT_NO_THROW(c.validate(1));
  c.r = 2.7;
  EXPECT_THROW(c.validate(1), std::invalid_argument);
  EXPECT_EQ(ContractionConfig::time_exponent(1), 4);
  EXPECT_DOUBLE_EQ(ContractionConfig::mu(2), 0.3);
}

TEST(Contraction, IdenticalSolutionsHaveZeroDistance) {
  const Grid g(1, 32);
  EvolveOptions eo;
  eo.dn = levels(8);
  const SurfaceState s = make_state(g, 0.02);
  const ContractionResult r = contraction_harness(s, s, 0.05, 0.01, {}, eo);
  ASSERT_FALSE(r.aborted);
  EXPECT_EQ(r.p_s_sup, 0.0);
  EXPECT_EQ(r.p_t, 0.0);
}

TEST(Contraction, SmallPerturbationStaysBounded) {
  const Grid g(1, 32);
  EvolveOptions eo;
  eo.dn = levels(8);
  const SurfaceState s = make_state(g, 0.02);
  SurfaceState t = s;
  t.eta += fx(g, [](double x) { return 1e-4 * std::cos(3 * x); });
  const ContractionResult r = contraction_harness(s, t, 0.1, 0.01, {}, eo);
  ASSERT_FALSE(r.aborted);
  EXPECT_GT(r.p_t, 0.0);
  EXPECT_LT(r.ratio, 10.0);
  EXPECT_GE(r.p_s_sup, r.p_s.front());
  EXPECT_EQ(r.times.size(), r.p_h.size());
}

TEST(Csv, Headers) {
  std::ostringstream a, b;
  write_diagnostics_csv(a, {});
  EXPECT_EQ(first_line(a.str()), "t,H,A,B,M,N,P_eps,Q_eps,int_Q_eps,P0_eps,Q0_eps,int_Q0_eps,h_min");
  write_contraction_csv(b, ContractionResult{});
  EXPECT_EQ(first_line(b.str()), "t,P_S,P_H");
}
