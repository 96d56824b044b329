#include "shocklab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shocklab/diagnostics.hpp"
#include "shocklab/error.hpp"

namespace shocklab {

ShiftedProfile ShiftedProfile::on(const Grid& grid, const ShockProfile& profile, double X) {
  ShiftedProfile s;
  const auto nx = static_cast<std::size_t>(grid.n_xi());
  s.value.resize(nx);
  s.derivative.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    s.value[i] = profile.value(grid.xi(i) - X);
    s.derivative[i] = profile.derivative(grid.xi(i) - X);
  }
  return s;
}

double shift_margin(const Grid& grid, const ShockProfile& profile) {
  if (profile.closed_form()) return std::numeric_limits<double>::infinity();
  return profile.half_width() - grid.half_width() - std::abs(profile.center());
}

namespace {

double shift_coefficient(const FluxSpec& flux, const ShockData& shock) {
  return -(2.0 * flux.a + flux.g2_bound) / (2.0 * shock.eps);
}

// Sums over the torus first (rows in fixed order), then the xi trapezoid.
double projection(std::span<const double> u, const Grid& g, const ShiftedProfile& sp) {
  const auto nx = static_cast<std::size_t>(g.n_xi());
  std::vector<double> col(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(nx));
  for (std::size_t r = 1; r < g.rows(); ++r) {
    const double* row = u.data() + nx * r;
    for (std::size_t i = 0; i < nx; ++i) col[i] += row[i];
  }
  const double rows = static_cast<double>(g.rows());
  double acc = 0.0;
  for (std::size_t i = 0; i < nx; ++i) acc += g.xi_weight(i) * (col[i] - rows * sp.value[i]) * sp.derivative[i];
  return acc * g.torus_weight();
}

}  // namespace

double shift_rhs(const Field& u, double X, const ShockProfile& profile, const FluxSpec& flux) {
  const auto sp = ShiftedProfile::on(u.grid(), profile, X);
  return shift_coefficient(flux, profile.shock()) * projection(u.values(), u.grid(), sp);
}

double shift_rhs(const SimState& state, const ShockProfile& profile, const FluxSpec& flux) {
  return shift_rhs(state.u, state.X, profile, flux);
}

Stepper::Stepper(const Grid& grid, const FluxSpec& flux, const ShockProfile& profile, StepperOptions opts)
    : grid_(grid),
      flux_(flux),
      profile_(&profile),
      opts_(opts),
      op_(grid, flux, profile.shock().sigma, opts.order, XiBoundary{profile.shock().u_minus, profile.shock().u_plus}),
      margin_(shift_margin(grid, profile)),
      k_(grid.size()),
      u1_(grid.size()),
      u2_(grid.size()) {}

double Stepper::stable_dt(double lo, double hi) const {
  const double diff = opts_.c_diffusion * 2.0 / op_.diffusion_spectral_radius();
  const double rate = op_.advection_rate(lo, hi);
  const double adv = rate > 0.0 ? opts_.c_advection / rate : std::numeric_limits<double>::infinity();
  return std::min(diff, adv);
}

double Stepper::xdot(std::span<const double> u, double X) const {
  if (std::abs(X) > margin_)
    throw NumericalAbort("shift X = " + std::to_string(X) + " left the profile tabulation margin " +
                         std::to_string(margin_));
  const auto sp = ShiftedProfile::on(grid_, *profile_, X);
  return shift_coefficient(flux_, profile_->shock()) * projection(u, grid_, sp);
}

void Stepper::advance(SimState& s, double dt) {
  if (!(s.u.grid() == grid_)) throw DomainError("state does not live on the stepper grid");
  auto& u = s.u.data();
  const std::size_t n = u.size();
  const double linf_old = s.u.max_abs();

  // Stage 1
  const double x0 = s.X;
  const double v0 = xdot(u, x0);
  op_.apply(u, k_);
  for (std::size_t j = 0; j < n; ++j) u1_[j] = u[j] + dt * k_[j];
  const double x1 = x0 + dt * v0;

  // Stage 2
  const double v1 = xdot(u1_, x1);
  op_.apply(u1_, k_);
  for (std::size_t j = 0; j < n; ++j) u2_[j] = 0.75 * u[j] + 0.25 * (u1_[j] + dt * k_[j]);
  const double x2 = 0.75 * x0 + 0.25 * (x1 + dt * v1);

  // Stage 3
  const double v2 = xdot(u2_, x2);
  op_.apply(u2_, k_);
  double nan_probe = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = u[j] / 3.0 + 2.0 / 3.0 * (u2_[j] + dt * k_[j]);
    nan_probe += v - v;  // NaN once any value is non-finite
    u[j] = v;
  }
  const double linf_new = max_abs_of(u);
  const double x3 = x0 / 3.0 + 2.0 / 3.0 * (x2 + dt * v2);

  if (!(nan_probe == 0.0) || !std::isfinite(x3))
    throw NumericalAbort("non-finite values at step " + std::to_string(s.step_index + 1));
  if (linf_new > linf_old + opts_.linf_growth_tol * std::max(1.0, linf_old))
    throw NumericalAbort("max norm grew from " + std::to_string(linf_old) + " to " + std::to_string(linf_new) +
                         " at step " + std::to_string(s.step_index + 1) + " (CFL violation?)");

  s.X = x3;
  s.t += dt;
  s.step_index += 1;
  s.Xdot = xdot(u, s.X);
}

SimState step(const SimState& state, double dt, const ShockProfile& profile, const FluxSpec& flux, const Grid& grid,
              StepperOptions opts) {
  Stepper stepper(grid, flux, profile, opts);
  SimState next = state;
  stepper.advance(next, dt);
  return next;
}

Trajectory run(const RunSetup& setup, const RunObserver& observer) {
  if (setup.profile == nullptr) throw DomainError("run requires a profile");
  const ShockProfile& profile = *setup.profile;
  const FluxSpec& flux = profile.flux();
  const Grid& grid = setup.u0.grid();
  if (setup.diag_every < 1) throw DomainError("diag_every must be at least 1");

  Stepper stepper(grid, flux, profile, setup.stepper);
  Trajectory traj;

  std::int64_t nsteps;
  double dt;
  if (setup.max_steps > 0) {
    if (!(setup.dt > 0.0)) throw DomainError("a step-count run needs an explicit dt");
    nsteps = setup.max_steps;
    dt = setup.dt;
  } else {
    if (!(setup.t_final > 0.0)) throw DomainError("t_final must be positive");
    const auto [lo, hi] = std::minmax_element(setup.u0.data().begin(), setup.u0.data().end());
    const double limit = setup.dt > 0.0 ? setup.dt : stepper.stable_dt(*lo, *hi);
    nsteps = static_cast<std::int64_t>(std::ceil(setup.t_final / limit - 1e-9));
    nsteps = std::max<std::int64_t>(nsteps, 1);
    dt = setup.t_final / static_cast<double>(nsteps);
  }
  traj.dt = dt;

  SimState s{setup.u0, 0.0, 0.0, 0.0, 0};
  s.Xdot = shift_rhs(s, profile, flux);

  std::vector<double> snaps = setup.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto maybe_snapshot = [&] {
    while (next_snap < snaps.size() && s.t >= snaps[next_snap] - 1e-9 * std::max(1.0, dt)) {
      if (observer.on_snapshot) observer.on_snapshot(s);
      ++next_snap;
    }
  };

  auto record = [&] {
    DiagRecord rec = measure(s, profile);
    if (!traj.records.empty()) rec.dissipation_residual = dissipation_residual(traj.records.back(), rec, setup.alpha);
    traj.records.push_back(rec);
    if (observer.on_record) observer.on_record(rec, s);
  };

  record();
  maybe_snapshot();
  try {
    for (std::int64_t k = 1; k <= nsteps; ++k) {
      stepper.advance(s, dt);
      if (k == nsteps && setup.max_steps == 0) s.t = setup.t_final;
      if (k % setup.diag_every == 0 || k == nsteps) record();
      maybe_snapshot();
    }
  } catch (const NumericalAbort& e) {
    traj.aborted = true;
    traj.abort_message = e.what();
  }
  traj.steps = s.step_index;
  traj.final_state = std::move(s);
  return traj;
}

}  // namespace shocklab
