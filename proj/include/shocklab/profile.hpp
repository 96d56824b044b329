#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "shocklab/flux.hpp"

namespace shocklab {

struct ProfileOptions {
  /// Residual tolerance; also the relative distance to u+- at which the tails are clamped.
  double tol = 1e-12;
  /// Tabulation covers [center - half_width, center + half_width]; defaults to default_half_width().
  std::optional<double> half_width;
  /// Point where the profile takes the midpoint value (u- + u+)/2.
  double center = 0.0;
  /// Tabulation spacing; 0 picks one from the profile's decay rate.
  double spacing = 0.0;
  /// Integrate the ODE even when the closed form is available (g == 0).
  bool force_numeric = false;
};

/// Viscous shock profile u~ with u~' = f1(u~) - f1(u-) - sigma (u~ - u-), u~(center) = midpoint.
///
/// Values between tabulation nodes come from cubic Hermite interpolation using the
/// stored derivative (limited for monotonicity); the derivative is interpolated the
/// same way with u~'' = (f1'(u~) - sigma) u~'. When g == 0 the tanh closed form is
/// evaluated directly and the tabulation only serves quadratures.
class ShockProfile {
 public:
  ShockProfile() = default;

  const ShockData& shock() const { return shock_; }
  const FluxSpec& flux() const { return flux_; }
  bool closed_form() const { return closed_form_; }
  double center() const { return center_; }
  double half_width() const { return half_width_; }
  double spacing() const { return dx_; }
  double tol() const { return tol_; }

  double value(double xi) const;
  double derivative(double xi) const;
  /// |u~'(xi) - [f1(u~) - f1(u-) - sigma (u~ - u-)]| at an arbitrary point.
  double ode_residual(double xi) const;
  /// Right-hand side of the first-order profile ODE.
  double ode_rhs(double u) const;

  const std::vector<double>& nodes() const { return xi_; }
  const std::vector<double>& values() const { return u_; }
  const std::vector<double>& derivatives() const { return du_; }

 private:
  friend ShockProfile solve_profile(const FluxSpec&, const ShockData&, const ProfileOptions&);

  double hermite(const std::vector<double>& y, const std::vector<double>& m, double xi, double lo,
                 double hi) const;

  FluxSpec flux_;
  ShockData shock_;
  bool closed_form_ = false;
  double center_ = 0.0;
  double half_width_ = 0.0;
  double dx_ = 0.0;
  double tol_ = 0.0;
  std::vector<double> xi_, u_, du_, slope_, ddu_;
};

/// Width (with a 10% pad) at which the g == 0 closed form is within tol * eps of u+-,
/// doubled when g != 0.
double default_half_width(const FluxSpec& flux, const ShockData& shock, double tol);

/// Throws AdmissibilityError on a non-Lax shock and DomainError when half_width is too
/// small for the profile to reach u+- within tol * eps.
ShockProfile solve_profile(const FluxSpec& flux, const ShockData& shock, const ProfileOptions& opts = {});

/// (int |u~'|^2 dxi)^{1/2} by trapezoid quadrature over the tabulation.
double profile_l2_of_derivative(const ShockProfile& p);

struct BetaConstants {
  double beta1 = 0.0;  ///< 2 int u~'(x) int_{x-1}^{x} u~'(z) dz dx
  double beta2 = 0.0;  ///< 2 int u~'(x) int_{x}^{x+1} u~'(z) dz dx
  double beta() const { return beta1 < beta2 ? beta1 : beta2; }
};

/// Lower bounds on the growth of |u~(.+tau) - u~|^2 used to bound the shift.
/// Throws DomainError if either constant is not strictly positive.
BetaConstants beta_constants(const ShockProfile& p);

/// Writes <stem>_value.csv (xi, u~) and <stem>_derivative.csv (xi, u~').
void write_profile_csv(const ShockProfile& p, const std::filesystem::path& stem);

}  // namespace shocklab
