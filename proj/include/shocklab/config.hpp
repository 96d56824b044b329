#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shocklab/flux.hpp"
#include "shocklab/grid.hpp"
#include "shocklab/initial_data.hpp"

namespace shocklab {

/// One experiment, parsed from an INI file with sections
/// [flux] [shock] [grid] [time] [initial] [profile] [output] [tolerances] [fit] [checks].
struct ExperimentConfig {
  std::string name = "run";

  // [flux]
  double a = 0.5;
  std::string g_kind = "zero";  // zero | sine | poly
  double kappa = 0.0;
  double omega = 1.0;
  std::vector<double> g_coeffs;
  std::optional<double> g2_bound;         // required for poly; defaults to |kappa| omega^2 for sine
  std::vector<double> transverse_coeffs;  // empty: a u^2

  // [shock]
  double u_minus = 0.0;
  double u_plus = 0.0;

  // [grid]
  double half_width = 0.0;
  int n_xi = 0;
  int n_dims = 2;
  int n_t = 16;
  SpatialOrder order = SpatialOrder::Fourth;

  // [time]
  bool dt_auto = true;
  double dt = 0.0;
  double t_final = 0.0;
  std::int64_t diag_every = 100;
  double c_diffusion = 0.9;
  double c_advection = 0.9;

  // [initial]
  InitialData initial;

  // [profile]
  double profile_tol = 1e-12;

  // [output]
  std::vector<double> snapshot_times;
  bool write_profile = true;

  // [tolerances]
  std::optional<double> tol_residual;  // default 10 (h^2 + dt^2) E
  double tail_tol = 1e-6;
  double linf_growth_tol = 1e-6;
  double l1_rel_tol = 1e-6;

  // [fit]
  double t_min = 1.0;

  // [checks]
  std::vector<std::string> checks;  // empty: every runtime check

  FluxSpec flux() const;
  Grid grid() const;
};

/// Throws ConfigError on syntax errors, unknown sections or keys, missing required keys
/// ([shock] u_minus/u_plus, [grid] L/n_xi, [time] t_final, [initial] family) and bad values.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every field with its effective value (defaults included).
nlohmann::json config_to_json(const ExperimentConfig& c);

/// Names accepted under [checks] enabled = ...
const std::vector<std::string>& runtime_check_names();

}  // namespace shocklab
