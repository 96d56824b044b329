#include "shocklab/profile.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>

#include <boost/numeric/odeint.hpp>

#include "shocklab/error.hpp"

namespace shocklab {

namespace odeint = boost::numeric::odeint;

double ShockProfile::ode_rhs(double u) const {
  return flux_.f1(u) - flux_.f1(shock_.u_minus) - shock_.sigma * (u - shock_.u_minus);
}

double ShockProfile::hermite(const std::vector<double>& y, const std::vector<double>& m, double xi,
                             double lo, double hi) const {
  const double s = (xi - xi_.front()) / dx_;
  if (s <= 0.0) return lo;
  const auto last = static_cast<double>(xi_.size() - 1);
  if (s >= last) return hi;
  auto k = static_cast<std::size_t>(s);
  if (k >= xi_.size() - 1) k = xi_.size() - 2;
  const double t = s - static_cast<double>(k);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * y[k] + h10 * dx_ * m[k] + h01 * y[k + 1] + h11 * dx_ * m[k + 1];
}

double ShockProfile::value(double xi) const {
  if (closed_form_) {
    const double mid = 0.5 * (shock_.u_minus + shock_.u_plus);
    return mid - 0.5 * shock_.eps * std::tanh(0.5 * flux_.a * shock_.eps * (xi - center_));
  }
  return hermite(u_, slope_, xi, shock_.u_minus, shock_.u_plus);
}

double ShockProfile::derivative(double xi) const {
  if (closed_form_) {
    const double c = std::cosh(0.5 * flux_.a * shock_.eps * (xi - center_));
    return -0.25 * flux_.a * shock_.eps * shock_.eps / (c * c);
  }
  return hermite(du_, ddu_, xi, 0.0, 0.0);
}

double ShockProfile::ode_residual(double xi) const { return std::abs(derivative(xi) - ode_rhs(value(xi))); }

double default_half_width(const FluxSpec& flux, const ShockData& shock, double tol) {
  const double w = 1.1 * std::log(1.0 / tol) / (flux.a * shock.eps);
  return flux.g.is_zero() ? w : 2.0 * w;
}

namespace {

using State = std::array<double, 1>;

// Fills the nodes on one side of center_index, integrating du/ds = dir * R(u) node to node. Stops and clamps once the
// state is within clamp_tol of `target`; returns whether that happened.
bool integrate_branch(const ShockProfile& p, std::vector<double>& u, std::size_t center_index, int dir,
                      double dx, double target, double clamp_tol, double ode_tol) {
  auto system = [&p, dir](const State& x, State& dxdt, double) { dxdt[0] = dir * p.ode_rhs(x[0]); };
  auto stepper = odeint::make_controlled(ode_tol, ode_tol, odeint::runge_kutta_dopri5<State>());
  State x{u[center_index]};
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
  bool clamped = false;
  for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(center_index) + dir; k >= 0 && k < n; k += dir) {
    if (clamped) {
      u[static_cast<std::size_t>(k)] = target;
      continue;
    }
    odeint::integrate_adaptive(stepper, system, x, 0.0, dx, dx / 4);
    u[static_cast<std::size_t>(k)] = x[0];
    if (std::abs(x[0] - target) < clamp_tol) {
      clamped = true;
      u[static_cast<std::size_t>(k)] = target;
    }
  }
  return clamped;
}

}  // namespace

ShockProfile solve_profile(const FluxSpec& flux, const ShockData& shock, const ProfileOptions& opts) {
  if (!(shock.u_minus > shock.u_plus)) throw AdmissibilityError("profile requires the Lax condition u- > u+");
  if (!(opts.tol > 0.0)) throw DomainError("profile tolerance must be positive");

  ShockProfile p;
  p.flux_ = flux;
  p.shock_ = shock;
  p.center_ = opts.center;
  p.tol_ = opts.tol;
  p.closed_form_ = flux.g.is_zero() && !opts.force_numeric;
  p.half_width_ = opts.half_width.value_or(default_half_width(flux, shock, opts.tol));
  if (!(p.half_width_ > 0.0)) throw DomainError("profile half width must be positive");

  const double rate = std::max(std::abs(flux.df1(shock.u_minus) - shock.sigma),
                               std::abs(flux.df1(shock.u_plus) - shock.sigma));
  double dx = opts.spacing > 0.0 ? opts.spacing : std::min(0.01, 0.05 / rate);
  const auto half_nodes = static_cast<std::size_t>(std::ceil(p.half_width_ / dx));
  dx = p.half_width_ / static_cast<double>(half_nodes);
  p.dx_ = dx;

  const std::size_t n = 2 * half_nodes + 1;
  p.xi_.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    p.xi_[k] = p.center_ + (static_cast<double>(k) - static_cast<double>(half_nodes)) * dx;

  p.u_.assign(n, 0.0);
  const double clamp_tol = opts.tol * shock.eps;
  if (p.closed_form_) {
    for (std::size_t k = 0; k < n; ++k) p.u_[k] = p.value(p.xi_[k]);
    const double far = std::max(shock.u_minus - p.u_.front(), p.u_.back() - shock.u_plus);
    if (far >= clamp_tol) throw DomainError("profile half width too small to reach u+- within tolerance");
  } else {
    p.u_[half_nodes] = 0.5 * (shock.u_minus + shock.u_plus);
    const double ode_tol = std::max(1e-3 * clamp_tol, 1e-15);
    const bool right = integrate_branch(p, p.u_, half_nodes, +1, dx, shock.u_plus, clamp_tol, ode_tol);
    const bool left = integrate_branch(p, p.u_, half_nodes, -1, dx, shock.u_minus, clamp_tol, ode_tol);
    if (!right || !left) throw DomainError("profile half width too small to reach u+- within tolerance");
  }

  p.du_.resize(n);
  p.ddu_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    p.du_[k] = p.closed_form_ ? p.derivative(p.xi_[k]) : p.ode_rhs(p.u_[k]);
    p.ddu_[k] = (flux.df1(p.u_[k]) - shock.sigma) * p.du_[k];
  }

  // Fritsch-Carlson limiting of the value slopes keeps the interpolant monotone.
  p.slope_ = p.du_;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double secant = (p.u_[k + 1] - p.u_[k]) / dx;
    if (secant == 0.0) {
      p.slope_[k] = p.slope_[k + 1] = 0.0;
      continue;
    }
    double al = p.slope_[k] / secant, be = p.slope_[k + 1] / secant;
    if (al < 0.0) p.slope_[k] = al = 0.0;
    if (be < 0.0) p.slope_[k + 1] = be = 0.0;
    const double r2 = al * al + be * be;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      p.slope_[k] = tau * al * secant;
      p.slope_[k + 1] = tau * be * secant;
    }
  }
  return p;
}

double profile_l2_of_derivative(const ShockProfile& p) {
  const auto& d = p.derivatives();
  double acc = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double w = (k == 0 || k + 1 == d.size()) ? 0.5 : 1.0;
    acc += w * d[k] * d[k];
  }
  return std::sqrt(acc * p.spacing());
}

BetaConstants beta_constants(const ShockProfile& p) {
  // The inner integral is exact: int_{x-1}^{x} u~' = u~(x) - u~(x-1).
  const auto& xi = p.nodes();
  const auto& d = p.derivatives();
  const auto& u = p.values();
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double w = (k == 0 || k + 1 == xi.size()) ? 0.5 : 1.0;
    b1 += w * d[k] * (u[k] - p.value(xi[k] - 1.0));
    b2 += w * d[k] * (p.value(xi[k] + 1.0) - u[k]);
  }
  BetaConstants b{2.0 * b1 * p.spacing(), 2.0 * b2 * p.spacing()};
  if (!(b.beta1 > 0.0) || !(b.beta2 > 0.0))
    throw DomainError("nonpositive beta constant: profile width or quadrature inadequate");
  return b;
}

void write_profile_csv(const ShockProfile& p, const std::filesystem::path& stem) {
  std::ofstream fv(stem.string() + "_value.csv"), fd(stem.string() + "_derivative.csv");
  if (!fv || !fd) throw IoError("cannot write profile CSV at " + stem.string());
  fv << "xi,u\n" << std::setprecision(17);
  fd << "xi,du\n" << std::setprecision(17);
  for (std::size_t k = 0; k < p.nodes().size(); ++k) {
    fv << p.nodes()[k] << ',' << p.values()[k] << '\n';
    fd << p.nodes()[k] << ',' << p.derivatives()[k] << '\n';
  }
}

}  // namespace shocklab
