// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "scenarios.hpp"
#include "wwlab/diagnostics.hpp"
#include "wwlab/dn_paralinearized.hpp"
#include "wwlab/littlewood_paley.hpp"
#include "wwlab/paradiff.hpp"
#include "wwlab/symmetrizer.hpp"

using namespace wwlab;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kFlatDnTol = 1e-3;
constexpr double kFlatDnRatio = 4.0, kFlatDnRatioTol = 0.5;
constexpr double kFlatDnSeconds = 5.0;
constexpr double kFluxTol = 1e-6;
constexpr double kDispersionTol = 1e-4;
constexpr double kDriftTol = 1e-8;
constexpr double kShapeSlope = 1.0, kShapeSlopeTol = 0.2, kShapeTol = 1e-3;
constexpr double kOrderSlope = -1.0, kOrderSlopeTol = 0.3;
constexpr double kBonyTol = 1e-12;
constexpr double kParalinTol = 0.1;
constexpr double kSymLinearTol = 1e-3, kSymRefineTol = 0.2;
constexpr double kNormSpread = 10.0;
constexpr double kLogInterpStability = 0.2;
constexpr double kContractionFactor = 2.0;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SpectralField fx(const Grid& g, std::function<double(double)> f) {
  return SpectralField::from_function(g, [f](double x, double) { return f(x); });
}
DnOptions levels(int m) {
  DnOptions o;
  o.levels = m;
  return o;
}
// Sum of cosines with random amplitudes and phases on modes lo..hi.
SpectralField random_modes(const Grid& g, int lo, int hi, double amp, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), ph(0.0, kTwoPi);
  std::vector<std::pair<double, double>> c;
  for (int k = lo; k <= hi; ++k) c.emplace_back(amp * u(rng), ph(rng));
  return fx(g, [=](double x) {
    double s = 0.0;
    for (int k = lo; k <= hi; ++k) s += c[k - lo].first * std::cos(k * x + c[k - lo].second);
    return s;
  });
}
double l2(const SpectralField& u) { return sobolev_norm(u, 0.0); }

nlohmann::json run_config(const std::string& name, const std::vector<std::string>& sets = {}) {
  wwcli::ScenarioConfig cfg = wwcli::load_config(std::string(WWLAB_CONFIG_DIR) + "/" + name + ".cfg");
  for (const auto& s : sets) wwcli::apply_setting(cfg, s);
  const fs::path dir = fs::temp_directory_path() / ("wwlab_acceptance_" + name);
  fs::remove_all(dir);
  const wwcli::RunOutcome out = wwcli::run_scenario(cfg, dir);
  return nlohmann::json::parse(out.summary.dump());
}

Result flat_dn() {
  const Grid g(1, 256);
  std::mt19937_64 rng(11);
  const SpectralField f = random_modes(g, 1, 4, 1.0, rng);
  const SpectralField exact = dn_flat_exact(f, 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  const double e64 = l2(dn_apply(SpectralField(g), f, 1.0, levels(64)) - exact) / l2(f);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double e128 = l2(dn_apply(SpectralField(g), f, 1.0, levels(128)) - exact) / l2(f);
  const double ratio = e64 / e128;
  return {e64 <= kFlatDnTol && std::abs(ratio - kFlatDnRatio) <= kFlatDnRatioTol && secs < kFlatDnSeconds,
          fmt("err(M=64)=%.3e <= %.0e, ratio=%.3f in 4+-0.5, M=64 solve %.2f s < 5 s", e64, kFlatDnTol, ratio, secs)};
}

Result flux_identity() {
  const Grid g(1, 128);
  const EnergyFlux ef = energy_and_flux(fx(g, [](double x) { return 0.1 * std::cos(x); }),
                                        fx(g, [](double x) { return std::cos(x); }), 1.0, levels(128));
  const double rel = ef.mismatch / ef.energy_squared;
  return {rel <= kFluxTol, fmt("|flux - E^2|/E^2 = %.3e <= %.0e", rel, kFluxTol)};
}

Result dispersion() {
  const nlohmann::json s = run_config("dispersion");
  const double err = s["omega_rel_error"].get<double>();
  return {!s["aborted"].get<bool>() && err <= kDispersionTol,
          fmt("omega measured %.7f vs linear %.7f, rel error %.2e <= %.0e", s["omega_measured"].get<double>(),
              s["omega_linear"].get<double>(), err, kDispersionTol)};
}

Result conservation() {
  const nlohmann::json s = run_config("conservation");
  const double drift = s["trajectory"]["hamiltonian_max_rel_drift"].get<double>();
  return {!s["aborted"].get<bool>() && drift <= kDriftTol,
          fmt("max relative H drift over t in [0, %.0f] = %.2e <= %.0e", s["trajectory"]["final_time"].get<double>(),
              drift, kDriftTol)};
}

// G is replaced by its Richardson extrapolation in M (levels 128 and 256) on
// both sides, which pushes the O(dz^2) gap between the formula and the
// discrete operator below the O(eps) error of the forward difference.
Result shape_derivative_check() {
  const Grid g(1, 64);
  const SpectralField eta = fx(g, [](double x) { return 0.1 * std::cos(x); });
  const SpectralField psi = fx(g, [](double x) { return std::sin(2 * x); });
  const SpectralField f = fx(g, [](double x) { return std::cos(3 * x); });
  auto rich = [](const std::function<SpectralField(const DnOptions&)>& op) {
    return (4.0 / 3.0) * op(levels(256)) - (1.0 / 3.0) * op(levels(128));
  };
  auto dn = [&](const SpectralField& e) { return rich([&](const DnOptions& o) { return dn_apply(e, psi, 1.0, o); }); };
  const SpectralField g0 = dn(eta);
  const SpectralField sd = rich([&](const DnOptions& o) { return shape_derivative(eta, psi, f, 1.0, o); });
  std::vector<double> eps{1e-3, 1e-4, 1e-5}, err;
  for (double e : eps) err.push_back(l2((1.0 / e) * (dn(eta + e * f) - g0) - sd) / l2(sd));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double x = std::log10(eps[i]), y = std::log10(err[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double n = eps.size(), slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {std::abs(slope - kShapeSlope) <= kShapeSlopeTol && err.back() <= kShapeTol,
          fmt("forward FD errors %.2e %.2e %.2e, slope %.3f in 1+-0.2, error at eps=1e-5 <= %.0e", err[0], err[1],
              err[2], slope, kShapeTol)};
}

Result order_law() {
  const Grid g(1, 512);
  const SymbolDescriptor a = homogeneous_symbol(fx(g, [](double x) { return 1.0 + 0.25 * std::sin(x); }), 0.5, "a");
  const SymbolDescriptor ab = sharp_compose(a, a, 2.0);
  OrderProbeOptions po;
  po.first_band = 5;
  const OrderFit fit = order_probe([&](const SpectralField& u) { return quantize(a, quantize(a, u)) - quantize(ab, u); },
                                   g, po);
  return {std::abs(fit.slope - kOrderSlope) <= kOrderSlopeTol,
          fmt("T_a T_b - T_{a#b} slope %.3f in -1+-0.3 over bands %d..%d", fit.slope, fit.bands.front(),
              fit.bands.back())};
}

// R(a, u) is rebuilt from the blocks as sum_{|j-k|<=2} Delta_j a Delta_k u;
// inputs are mean-free so that S_k = 0 for k < 0.
Result bony() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const Grid g(1, 64 << (c % 3));
    std::uniform_int_distribution<int> top(2, g.n() / 3);
    const SpectralField a = random_modes(g, 1, top(rng), 1.0, rng);
    const SpectralField u = random_modes(g, 1, top(rng), 1.0, rng);
    const auto da = dyadic_decomposition(a), du = dyadic_decomposition(u);
    SpectralField r(g);
    for (std::size_t j = 0; j < da.size(); ++j)
      for (std::size_t k = 0; k < du.size(); ++k)
        if (std::abs(static_cast<int>(j) - static_cast<int>(k)) <= 2) r += product(da[j], du[k]);
    const SpectralField au = product(a, u);
    const SpectralField id = au - paraproduct(a, u) - paraproduct(u, a) - r;
    worst = std::max(worst, id.max_abs() / std::max(1.0, au.max_abs()));
  }
  return {worst <= kBonyTol, fmt("max |au - T_a u - T_u a - R(a,u)| over 50 cases = %.2e <= %.0e", worst, kBonyTol)};
}

Result paralinearized_dn() {
  const Grid g(1, 128);
  const DnOptions o = levels(128);
  const SpectralField psi = fx(g, [](double x) { return std::cos(8 * x); });
  auto ratio = [&](const SpectralField& eta) {
    const ParalinearizedDn p = dn_paralinearized(eta, psi, 1.0, o);
    return std::pair{sobolev_norm(p.residual, 2.0), sobolev_norm(p.g_psi, 2.0)};
  };
  const auto [r0, g0] = ratio(fx(g, [](double x) { return 0.05 * std::cos(x); }));
  // Rough surface, then two dyadic smoothings of it.
  const SpectralField rough = fx(g, [](double x) {
    return 0.05 * std::cos(x) + 0.004 * std::cos(6 * x + 0.3) + 0.002 * std::sin(13 * x) + 0.001 * std::cos(27 * x);
  });
  const double a = ratio(rough).first, b = ratio(low_pass(3, rough)).first, c = ratio(low_pass(2, rough)).first;
  return {r0 <= kParalinTol * g0 && a > b && b > c,
          fmt("residual/|G psi|_H2 = %.3e <= %.1f; smoothing sequence %.3e > %.3e > %.3e", r0 / g0, kParalinTol, a, b,
              c)};
}

// Max ||F||_{H^s} / ||Phi||_{H^s} and max ||F||_{H^s} / state norm over a short run.
std::pair<double, double> symmetrizer_ratios(const SurfaceState& s0, double duration, double dt, int m) {
  SymmetrizerOptions so;
  so.dn = levels(m);
  EvolveOptions eo;
  eo.dn = so.dn;
  eo.cfl = 10.0;
  eo.keep_states = true;
  const TrajectoryRecord rec = evolve(s0, duration, dt, eo);
  const double s = so.index(1);
  double over_phi = 0.0, over_state = 0.0;
  for (std::size_t i = 0; i + 2 < rec.states.size(); i += 2) {
    const SymmetrizedResidual r = symmetrized_residual(rec.states[i], rec.states[i + 2], so);
    const SurfaceState& mid = rec.states[i + 1];
    over_phi = std::max(over_phi, r.f_hs / r.phi_hs);
    over_state = std::max(over_state, r.f_hs / (sobolev_norm(mid.eta, s + 0.5) + sobolev_norm(mid.psi, s)));
  }
  return {over_phi, over_state};
}

Result symmetrization() {
  SurfaceState lin;
  const Grid g(1, 64);
  lin.eta = fx(g, [](double x) { return 1e-6 * std::cos(3 * x); });
  lin.psi = fx(g, [](double x) { return 1e-6 * std::sin(2 * x); });
  lin.params = {0.0, 4.0};
  const double linear = symmetrizer_ratios(lin, 0.02, 1e-3, 128).first;

  auto nonlinear = [](int n) {
    SurfaceState s;
    const Grid gn(1, n);
    s.eta = fx(gn, [](double x) { return 0.02 * std::cos(x) + 0.01 * std::sin(2 * x); });
    s.psi = fx(gn, [](double x) { return 0.02 * std::sin(x); });
    return symmetrizer_ratios(s, 0.02, 1e-3, 32).second;
  };
  const double coarse = nonlinear(32), fine = nonlinear(64);
  const double change = std::abs(fine - coarse) / coarse;
  return {linear <= kSymLinearTol && change < kSymRefineTol,
          fmt("linear |F|/|Phi| = %.2e <= %.0e; nonlinear |F|/state %.4e -> %.4e (change %.1f%% < 20%%)", linear,
              kSymLinearTol, coarse, fine, 100 * change)};
}

Result norm_equivalence() {
  const Grid g(1, 64);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> amp(0.002, 0.02);
  SymmetrizerOptions so;
  so.dn = levels(32);
  double lo = INFINITY, hi = 0.0;
  for (int i = 0; i < 20; ++i) {
    SurfaceState s;
    s.eta = random_modes(g, 1, 8, amp(rng), rng);
    s.psi = random_modes(g, 1, 8, amp(rng), rng);
    const PhiEnergy e = energy_phi(s, so);
    const double r = e.phi_l2 / (e.original + e.low);
    lo = std::min(lo, r), hi = std::max(hi, r);
  }
  return {hi / lo <= kNormSpread, fmt("|phi|/(|eta|_{s+1/2} + |psi|_s + low) in [%.3f, %.3f], spread %.2f <= 10", lo,
                                      hi, hi / lo)};
}

Result log_interpolation() {
  const double c1 = log_interp_suite(Grid(1, 128), 40, 40, 2.0, 5);
  const double c2 = log_interp_suite(Grid(1, 256), 40, 40, 2.0, 5);
  const double change = std::abs(c2 - c1) / c1;
  return {change <= kLogInterpStability,
          fmt("fitted C = %.4f (N=128), %.4f (N=256), change %.2f%% <= 20%%", c1, c2, 100 * change)};
}

Result contraction() {
  const double r4 = run_config("contraction", {"delta=1e-4"})["ratio"].get<double>();
  const double r5 = run_config("contraction", {"delta=1e-5"})["ratio"].get<double>();
  const double f = std::max(r4, r5) / std::min(r4, r5);
  return {f <= kContractionFactor, fmt("P_T/P_S(0) = %.4f (1e-4), %.4f (1e-5), factor %.3f <= 2", r4, r5, f)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> checks = {
      {"flat DN oracle", flat_dn},
      {"flux identity", flux_identity},
      {"dispersion", dispersion},
      {"hamiltonian drift", conservation},
      {"shape derivative", shape_derivative_check},
      {"symbolic calculus order", order_law},
      {"bony identity", bony},
      {"paralinearized DN", paralinearized_dn},
      {"symmetrization", symmetrization},
      {"norm equivalence", norm_equivalence},
      {"log interpolation", log_interpolation},
      {"contraction", contraction},
  };
  int failed = 0, index = 0;
  for (const auto& [name, check] : checks) {
    ++index;
    Result r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %-24s %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", index, name, r.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
