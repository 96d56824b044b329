#pragma once

#include <cstdint>
#include <string>

#include "shocklab/grid.hpp"
#include "shocklab/profile.hpp"

namespace shocklab {

enum class InitialFamily {
  Profile,         ///< u0 = u~ (zero perturbation)
  Bump,            ///< u~ + A phi((xi - c)/(w/2)) psi(x')
  ShiftedProfile,  ///< u~(. - s)
  ModulatedBump,   ///< u~ + A phi(...) (1 + cos 2 pi x_2)
  Random,          ///< u~ + sum of seeded smooth compact bumps
};

enum class BumpShape {
  Smooth,   ///< exp(1 - 1/(1 - r^2)) on |r| < 1
  Plateau,  ///< tanh-mollified indicator of width w, edge scale `mollify`
};

InitialFamily parse_family(const std::string& name);
std::string family_name(InitialFamily f);
BumpShape parse_shape(const std::string& name);
std::string shape_name(BumpShape s);

struct InitialData {
  InitialFamily family = InitialFamily::Bump;
  BumpShape shape = BumpShape::Smooth;
  double amplitude = 1.0;
  double center = 0.0;        ///< xi center of the bump
  double width_xi = 4.0;      ///< full xi support width
  double torus_center = 0.5;  ///< center in every torus direction
  double width_t = 1.0;       ///< full torus support width; >= 1 means constant in x'
  double mollify = 0.05;      ///< edge scale of the plateau shape
  double shift = 0.0;         ///< s for ShiftedProfile
  std::uint64_t seed = 1;
  int modes = 3;              ///< number of bumps for Random
  double margin = 0.0;        ///< minimum distance of the support from xi = +-L
};

/// C-infinity bump exp(1 - 1/(1 - r^2)), peak 1 at r = 0, zero for |r| >= 1.
double smooth_bump(double r);
/// 0.5 (tanh((x + w/2)/delta) - tanh((x - w/2)/delta)); integrates to exactly w on R.
double plateau_bump(double x, double width, double delta);

/// Builds u0 on the grid with the xi end nodes set to u+-.
///
/// Compactly supported families must keep their support at least
/// max(margin, 5 sqrt(t_final)) away from the xi ends; DomainError otherwise.
Field generate_initial(const InitialData& data, const Grid& grid, const ShockProfile& profile, double t_final);

/// The profile itself sampled on the grid (end nodes set to u+-).
Field profile_field(const Grid& grid, const ShockProfile& profile, double shift = 0.0);

}  // namespace shocklab
