#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "wwlab/dirichlet_neumann.hpp"
#include "wwlab/spectral.hpp"

namespace wwlab {

// Surface tension is fixed to 1.
struct PhysicalParams {
  double gravity = 1.0;
  double depth = 1.0;
};

struct SurfaceState {
  double t = 0.0;
  SpectralField eta;
  SpectralField psi;
  PhysicalParams params;
};

// Throws std::invalid_argument if eta/psi are not real fields on one grid,
// the depth is not positive, or min(eta) + h <= 0.
void validate_state(const SurfaceState& state);

VelocityTraces compute_BV(const SurfaceState& state, const DnOptions& dn = {});
// H(eta) = -div(grad eta / sqrt(1 + |grad eta|^2)).
SpectralField mean_curvature(const SpectralField& eta);

struct Tendency {
  SpectralField eta_t;
  SpectralField psi_t;
};

// How psi_t gets the kinetic-energy term.
//   closed_form: -|grad psi|^2/2 + (grad eta.grad psi + G psi)^2 / (2(1+|grad eta|^2)), products dealiased.
//   discrete_gradient: -dK/deta of K = 1/2 int psi G_h psi for the discrete operator G_h
//   (linear straightening only). With it the semi-discrete system conserves the
//   discrete Hamiltonian exactly; the two forms differ by O(dz^2).
enum class KineticForm { closed_form, discrete_gradient };

// Zakharov/Craig-Sulem right-hand side. With `dealiased` the nonlinear
// products and the tendencies go through the 2/3 rule.
Tendency rhs(const SurfaceState& state, const DnOptions& dn = {}, KineticForm form = KineticForm::closed_form,
             bool dealiased = true);
// Same system written with B and V:
//   eta_t = B - V.grad eta,  psi_t = -V.grad psi - g eta + |V|^2/2 + B^2/2 - H(eta).
Tendency rhs_alternate(const SurfaceState& state, const DnOptions& dn = {});
// max over both components of ||a - b||_inf / max(||a||_inf, tiny).
double tendency_mismatch(const Tendency& a, const Tendency& b);

// 1/2 int psi G psi + g/2 int eta^2 + int (sqrt(1+|grad eta|^2) - 1).
double hamiltonian(const SurfaceState& state, const DnOptions& dn = {});

class EvolutionError : public std::runtime_error {
 public:
  EvolutionError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

struct EvolveOptions {
  DnOptions dn{};
  KineticForm kinetic = KineticForm::closed_form;
  bool dealias = true;
  double cfl = 1.0;              // dt <= cfl * dx^{3/2}
  double sample_interval = 0.0;  // <= 0 samples every step
  double sobolev_s = 2.0;        // norms ||eta||_{H^{s+1/2}}, ||psi||_{H^s} in the record
  bool keep_states = false;
  bool check_alternate = false;  // compare rhs and rhs_alternate on every step
  double alternate_tolerance = 1e-9;
};

// One classical RK4 step; no CFL guard (evolve applies it). Throws
// std::invalid_argument for dt <= 0, EvolutionError on separation loss or
// non-finite fields.
SurfaceState step_rk4(const SurfaceState& state, double dt, const DnOptions& dn = {},
                      KineticForm form = KineticForm::closed_form, bool dealiased = true);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> mass;
  std::vector<double> eta_norm;
  std::vector<double> psi_norm;
  std::vector<SurfaceState> states;  // filled when keep_states
  double max_alternate_mismatch = 0.0;
  bool aborted = false;
  double abort_time = 0.0;
  std::string abort_reason;
  SurfaceState final_state;
};

using Observer = std::function<void(const SurfaceState&)>;

// Observers see the initial state and every accepted step; the record only
// holds the samples.
// Integrates to t0 + duration with a fixed step (the last step is shortened to
// land on the end time). Failures are recorded in the returned trajectory
// (aborted, abort_time, abort_reason) rather than thrown; an invalid dt throws.
TrajectoryRecord evolve(const SurfaceState& initial, double duration, double dt, const EvolveOptions& opts = {},
                        const std::vector<Observer>& observers = {});

// Exact per-mode solution of eta_t = |k| tanh(h|k|) psi, psi_t = -(g + |k|^2) eta.
struct ModeState {
  cplx eta;
  cplx psi;
};
double linear_frequency(double abs_k, const PhysicalParams& params);
// Propagator entries: (eta, psi)(t) = P (eta, psi)(0).
void linear_propagator(double abs_k, const PhysicalParams& params, double t, double p[2][2]);
ModeState linear_reference(double abs_k, const PhysicalParams& params, double t, const ModeState& initial);
// Applies the per-mode solution to every coefficient; the mean of psi drifts
// linearly (psi_t = -g mean eta) and the mean of eta is constant.
SurfaceState linear_evolve(const SurfaceState& initial, double t);

// CSV with header "t,H,eta_norm,psi_norm,mass".
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);

}  // namespace wwlab
