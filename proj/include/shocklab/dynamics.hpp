#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shocklab/diag_record.hpp"
#include "shocklab/grid.hpp"
#include "shocklab/profile.hpp"

namespace shocklab {

struct SimState {
  Field u;
  double t = 0.0;
  double X = 0.0;
  double Xdot = 0.0;
  std::int64_t step_index = 0;
};

/// -(2a + g2)/(2 eps) * integral of (u - u~(xi - X)) u~'(xi - X).
double shift_rhs(const SimState& state, const ShockProfile& profile, const FluxSpec& flux);
double shift_rhs(const Field& u, double X, const ShockProfile& profile, const FluxSpec& flux);

/// Shifted profile values and derivatives on the xi nodes of a grid.
struct ShiftedProfile {
  std::vector<double> value, derivative;
  static ShiftedProfile on(const Grid& grid, const ShockProfile& profile, double X);
};

/// Largest |X| for which u~(xi - X) stays inside the profile tabulation on the grid window.
/// Infinite for the closed form.
double shift_margin(const Grid& grid, const ShockProfile& profile);

struct StepperOptions {
  SpatialOrder order = SpatialOrder::Fourth;
  double c_diffusion = 0.9;
  double c_advection = 0.9;
  /// Abort when a step raises ||u||_inf by more than this (relative to max(1, ||u||_inf)).
  double linf_growth_tol = 1e-6;
};

/// Three-stage SSP Runge-Kutta for the coupled (u, X) system in the moving frame.
class Stepper {
 public:
  Stepper(const Grid& grid, const FluxSpec& flux, const ShockProfile& profile, StepperOptions opts = {});

  /// Largest stable dt: min(c1 * 2 / rho_diffusion, c2 / advection_rate) over the value range [lo, hi].
  double stable_dt(double lo, double hi) const;

  /// Advances the state by dt in place; throws NumericalAbort on non-finite values, a
  /// max-norm jump, or a shift leaving the tabulation margin.
  void advance(SimState& s, double dt);

  const SpatialOperator& op() const { return op_; }
  const StepperOptions& options() const { return opts_; }

 private:
  double xdot(std::span<const double> u, double X) const;

  Grid grid_;
  FluxSpec flux_;
  const ShockProfile* profile_;
  StepperOptions opts_;
  SpatialOperator op_;
  double margin_;
  std::vector<double> k_, u1_, u2_;
};

/// One step without reusing a Stepper.
SimState step(const SimState& state, double dt, const ShockProfile& profile, const FluxSpec& flux, const Grid& grid,
              StepperOptions opts = {});

struct RunSetup {
  const ShockProfile* profile = nullptr;
  Field u0;
  double t_final = 1.0;
  /// Fixed step; <= 0 selects stable_dt over [min u0, max u0] (then shrunk to divide t_final).
  double dt = 0.0;
  std::int64_t diag_every = 100;
  /// Alternative stop criterion: when > 0 the run makes exactly this many steps of size dt.
  std::int64_t max_steps = 0;
  std::vector<double> snapshot_times;
  double alpha = 1.0;
  StepperOptions stepper;
};

struct RunObserver {
  std::function<void(const DiagRecord&, const SimState&)> on_record;
  std::function<void(const SimState&)> on_snapshot;
};

struct Trajectory {
  std::vector<DiagRecord> records;
  SimState final_state;
  double dt = 0.0;
  std::int64_t steps = 0;
  bool aborted = false;
  std::string abort_message;
};

/// Steps from t = 0, sampling diagnostics at step 0, every diag_every steps and at the
/// end. A NumericalAbort stops the run and is reported in the trajectory (records so far
/// are preserved); other errors propagate.
Trajectory run(const RunSetup& setup, const RunObserver& observer = {});

}  // namespace shocklab
