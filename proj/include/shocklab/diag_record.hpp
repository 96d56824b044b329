#pragma once

#include <cstdint>
#include <limits>

namespace shocklab {

/// One diagnostic sample. Distances are measured against the profile shifted by X,
/// i.e. u~^{-X}(xi) = u~(xi - X), unless the name says otherwise.
struct DiagRecord {
  std::int64_t step = 0;
  double t = 0.0;
  double X = 0.0;
  double Xdot = 0.0;
  double l2_dist = 0.0;
  double l2_dist_unshifted = 0.0;
  double l1_dist = 0.0;
  double l1_dist_unshifted = 0.0;
  double grad_sq = 0.0;
  /// d/dt l2_dist^2 + alpha grad_sq against the previous sample; NaN on the first record.
  double dissipation_residual = std::numeric_limits<double>::quiet_NaN();
  double linf = 0.0;
  double mass = 0.0;
  /// Integral of |u - u~^{-X}| over the outer 10% of the xi window on each side.
  double tail_mass = 0.0;
};

}  // namespace shocklab
