#include "shocklab/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "shocklab/error.hpp"

namespace shocklab {

InitialFamily parse_family(const std::string& name) {
  if (name == "profile") return InitialFamily::Profile;
  if (name == "bump") return InitialFamily::Bump;
  if (name == "shifted_profile") return InitialFamily::ShiftedProfile;
  if (name == "modulated_bump") return InitialFamily::ModulatedBump;
  if (name == "random") return InitialFamily::Random;
  throw ConfigError("unknown initial data family '" + name + "'");
}

std::string family_name(InitialFamily f) {
  switch (f) {
    case InitialFamily::Profile: return "profile";
    case InitialFamily::Bump: return "bump";
    case InitialFamily::ShiftedProfile: return "shifted_profile";
    case InitialFamily::ModulatedBump: return "modulated_bump";
    case InitialFamily::Random: return "random";
  }
  return "?";
}

BumpShape parse_shape(const std::string& name) {
  if (name == "smooth") return BumpShape::Smooth;
  if (name == "plateau") return BumpShape::Plateau;
  throw ConfigError("unknown bump shape '" + name + "'");
}

std::string shape_name(BumpShape s) { return s == BumpShape::Smooth ? "smooth" : "plateau"; }

double smooth_bump(double r) {
  const double q = 1.0 - r * r;
  if (q <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / q);
}

double plateau_bump(double x, double width, double delta) {
  return 0.5 * (std::tanh((x + 0.5 * width) / delta) - std::tanh((x - 0.5 * width) / delta));
}

namespace {

double periodic_offset(double x, double c) {
  double d = x - c;
  d -= std::round(d);
  return d;
}

// Product over torus directions of a compact bump of full width w centered at c.
double torus_factor(std::span<const double> xt, double c, double w) {
  if (w >= 1.0) return 1.0;
  double f = 1.0;
  for (double x : xt) f *= smooth_bump(periodic_offset(x, c) / (0.5 * w));
  return f;
}

void clamp_ends(Field& f, const ShockData& s) {
  const Grid& g = f.grid();
  const auto last = static_cast<std::size_t>(g.n_xi() - 1);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    f(0, r) = s.u_minus;
    f(last, r) = s.u_plus;
  }
}

void check_support(double lo, double hi, const Grid& g, double margin) {
  const double L = g.half_width();
  if (lo < -L + margin || hi > L - margin)
    throw DomainError("initial perturbation support [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "] is closer than " + std::to_string(margin) + " to the xi boundary");
}

}  // namespace

Field profile_field(const Grid& grid, const ShockProfile& profile, double shift) {
  Field f = Field::sample(grid, [&](double xi, std::span<const double>) { return profile.value(xi - shift); });
  clamp_ends(f, profile.shock());
  return f;
}

Field generate_initial(const InitialData& d, const Grid& grid, const ShockProfile& profile, double t_final) {
  const double margin = std::max(d.margin, 5.0 * std::sqrt(std::max(t_final, 0.0)));
  const double half = 0.5 * d.width_xi;
  if (d.family == InitialFamily::Bump || d.family == InitialFamily::ModulatedBump) {
    if (!(d.width_xi > 0.0)) throw DomainError("bump width must be positive");
    const double pad = d.shape == BumpShape::Plateau ? 20.0 * d.mollify : 0.0;
    check_support(d.center - half - pad, d.center + half + pad, grid, margin);
  }

  Field u0(grid);
  switch (d.family) {
    case InitialFamily::Profile:
      u0 = profile_field(grid, profile);
      break;
    case InitialFamily::ShiftedProfile:
      u0 = profile_field(grid, profile, d.shift);
      break;
    case InitialFamily::Bump:
    case InitialFamily::ModulatedBump: {
      const bool modulated = d.family == InitialFamily::ModulatedBump;
      u0 = Field::sample(grid, [&](double xi, std::span<const double> xt) {
        const double shape = d.shape == BumpShape::Smooth ? smooth_bump((xi - d.center) / half)
                                                          : plateau_bump(xi - d.center, d.width_xi, d.mollify);
        double tf = torus_factor(xt, d.torus_center, d.width_t);
        if (modulated && !xt.empty()) tf *= 1.0 + std::cos(2.0 * std::numbers::pi * xt[0]);
        return profile.value(xi) + d.amplitude * shape * tf;
      });
      break;
    }
    case InitialFamily::Random: {
      const double L = grid.half_width();
      struct Blob {
        double amp, center, width, depth, phase;
        int mode;
      };
      std::mt19937_64 rng(d.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<Blob> blobs;
      for (int k = 0; k < std::max(d.modes, 1); ++k) {
        Blob b;
        b.amp = d.amplitude * (2.0 * unit(rng) - 1.0);
        b.width = 0.5 + 1.5 * unit(rng);
        const double lo = -L + margin + 0.5 * b.width, hi = L - margin - 0.5 * b.width;
        if (lo > hi) throw DomainError("no room for random perturbation inside the margin");
        b.center = lo + (hi - lo) * unit(rng);
        b.depth = unit(rng);
        b.phase = unit(rng);
        b.mode = static_cast<int>(unit(rng) * 3.0);
        blobs.push_back(b);
      }
      u0 = Field::sample(grid, [&](double xi, std::span<const double> xt) {
        double v = profile.value(xi);
        for (const Blob& b : blobs) {
          double m = 1.0;
          if (!xt.empty()) m += b.depth * std::cos(2.0 * std::numbers::pi * (b.mode * xt[0] + b.phase));
          v += b.amp * smooth_bump((xi - b.center) / (0.5 * b.width)) * m;
        }
        return v;
      });
      break;
    }
  }
  clamp_ends(u0, profile.shock());
  return u0;
}

}  // namespace shocklab
