#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shocklab/diag_record.hpp"
#include "shocklab/dynamics.hpp"

namespace shocklab {

/// Every DiagRecord field for the current state except dissipation_residual.
DiagRecord measure(const SimState& state, const ShockProfile& profile);

/// (l2_dist^2 - prev.l2_dist^2)/dt + alpha * (grad_sq + prev.grad_sq)/2.
double dissipation_residual(const DiagRecord& prev, const DiagRecord& rec, double alpha);

/// min{2 - (2a+g2)/(2a-g2), 2(1 - (2a+g2)^2 eps^2 / (64 pi^2))}; DomainError if g2 >= 2a.
double compute_alpha(const FluxSpec& flux, double eps);

struct PerturbationNorms {
  double l1 = 0.0;    ///< ||u0 - u~||_{L1}
  double l2 = 0.0;    ///< ||u0 - u~||_{L2}
  double linf_u0 = 0.0;
  double energy() const { return l2 * l2; }
};
PerturbationNorms perturbation_norms(const Field& u0, const ShockProfile& profile);

/// 1 + ||u0 - u~||^2_{L2} + ||u0 - u~||_{L1}.
double compute_C0(const Field& u0, const ShockProfile& profile);

struct Constants {
  double a = 0.0;
  double g2_bound = 0.0;
  double eps = 0.0;
  double alpha = 0.0;
  double C0 = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta = 0.0;
  double profile_deriv_l2 = 0.0;  ///< ||u~'||_{L2(R)}
  PerturbationNorms u0;
  int n_dims = 2;
  /// (1/beta)(||u0-u~||^2 + 4 eps ||u0-u~||_{L1}) + 1
  double x_bound() const { return (u0.energy() + 4.0 * eps * u0.l1) / beta + 1.0; }
  /// (2a + g2)/(2 eps) * ||u~'||_{L2}, the factor of the Cauchy-Schwarz bound on |X'|.
  double xdot_factor() const { return (2.0 * a + g2_bound) / (2.0 * eps) * profile_deriv_l2; }
};

Constants make_constants(const ShockProfile& profile, const Field& u0);
nlohmann::json to_json(const Constants& c);
Constants constants_from_json(const nlohmann::json& j);

/// 10 (h^2 + dt^2) * energy, h the largest active grid spacing; energy is floored at 1e-16
/// so the zero-perturbation run keeps a positive tolerance.
double default_tol_residual(const Grid& grid, double dt, double energy);

struct CheckResult {
  std::string name;
  bool pass = true;
  /// Smallest (bound - value) over the series; negative when violated.
  double margin = 0.0;
  double worst_t = 0.0;
  std::string detail;
};
nlohmann::json to_json(const CheckResult& c);

/// l2_dist(t_k) <= l2_dist(t_{k-1}) + tol * (t_k - t_{k-1}) and l2_dist(t) <= l2_dist(0) + tol.
CheckResult contraction_check(std::span<const DiagRecord> series, double tol);
/// dissipation_residual <= tol at every sample after the first.
CheckResult dissipation_check(std::span<const DiagRecord> series, double tol);
/// Largest positive dissipation residual (0 if none is positive).
double max_positive_residual(std::span<const DiagRecord> series);

struct L1BoundReport {
  CheckResult l1_unshifted;  ///< ||u - u~||_{L1} <= ||u0 - u~||_{L1} (relative tolerance)
  CheckResult x_bound;       ///< |X| <= x_bound()
  double max_l1_over_C0 = 0.0;  ///< sup ||u^X - u~||_{L1} / C0, reported only
};
L1BoundReport l1_bound_check(std::span<const DiagRecord> series, const Constants& c, double rel_tol = 1e-8);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
  bool conclusive = false;
  bool envelope_ok = false;
  double K = 0.0;                  ///< t^{p} v(t) at the first sample >= t_min
  double max_envelope_ratio = 0.0; ///< sup t^p v(t) / K over the window
  std::string note;
};

/// Least-squares slope of log v against log t over samples with t >= t_min and v above
/// noise_floor; envelope_ok iff t^p v(t) <= slack * K throughout, p = envelope_exponent.
/// Fewer than 3 usable points or less than a decade of t is flagged inconclusive.
DecayFit fit_decay(std::span<const double> t, std::span<const double> v, double t_min, double noise_floor = 0.0,
                   double envelope_exponent = 0.25, double slack = 1.05);
/// fit_decay of l2_dist; the noise floor is 1e-9 * max(1, l2_dist(0)).
DecayFit fit_decay(std::span<const DiagRecord> series, double t_min);

struct XdotReport {
  CheckResult cs_bound;  ///< |X'| <= xdot_factor * l2_dist, relative tolerance
  DecayFit fit;          ///< fit of |X'|
};
XdotReport xdot_decay_check(std::span<const DiagRecord> series, const Constants& c, double t_min,
                            double rel_tol = 1e-12);

/// |X(t)| <= |X(t_min)| + K (t^{3/4} - t_min^{3/4}) with K = (4/3) sup_{t >= t_min} t^{1/4} |X'(t)|.
CheckResult sublinear_shift_check(std::span<const DiagRecord> series, double t_min);

/// linf <= linf(u0) + tol.
CheckResult max_principle_check(std::span<const DiagRecord> series, double linf0, double tol = 1e-10);
/// |mass(t) - mass(0)| <= rel_tol * energy + abs_floor.
CheckResult conservation_check(std::span<const DiagRecord> series, double energy, double rel_tol = 1e-8,
                               double abs_floor = 0.0);

/// tail_mass <= tol at every sample.
CheckResult tail_mass_check(std::span<const DiagRecord> series, double tol);

/// l2_dist (q t^{1/4} E + C~ C0 n^{3/2}) / (2 C~ C0 n^{3/2} E), q = (2 alpha)^{1/4}, E = ||u0 - u~||_{L2}.
/// Values above 1 would contradict the time-decay estimate with the empirical constant C~.
double timedecay_ratio(const DiagRecord& r, const Constants& c, double gn_constant);

struct SummarySettings {
  double tol_residual = 0.0;
  double t_min = 1.0;
  double gn_constant = 0.0;  ///< 0 skips the time-decay ratio
  /// Relative tolerance of the unshifted L1 bound. That bound is an equality for data
  /// lying on one side of the profile, so it needs room for the scheme's small undershoots.
  double l1_rel_tol = 1e-6;
  /// Largest tail_mass tolerated (truncation monitor); <= 0 disables the check.
  double tail_tol = 1e-6;
  /// Checks that decide the verdict; empty means all of them.
  std::vector<std::string> enabled;
  bool aborted = false;
  std::string abort_message;
};

/// Summary JSON built only from the series, the constants and the settings, so that it can
/// be regenerated from stored files.
nlohmann::json build_summary(std::span<const DiagRecord> series, const Constants& c, const SummarySettings& s);

/// Names of the enabled runtime checks in a summary that failed.
std::vector<std::string> failed_checks(const nlohmann::json& summary);

/// CSV with every DiagRecord field (%.17g) plus running check flags; see docs/diagnostics_csv.md.
void write_diagnostics_csv(const std::filesystem::path& path, std::span<const DiagRecord> series, double tol_residual);
/// Same format, one row at a time, so that an interrupted run leaves its samples on disk.
class DiagnosticsCsvWriter {
 public:
  DiagnosticsCsvWriter(const std::filesystem::path& path, double tol_residual);
  void append(const DiagRecord& r);
  void flush();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  double tol_;
  std::optional<DiagRecord> prev_;
};

/// Reads the DiagRecord columns back; throws IoError on missing columns or malformed numbers.
std::vector<DiagRecord> read_diagnostics_csv(const std::filesystem::path& path);

/// l2_decay.csv (t, l2_dist, l2_dist_unshifted), loglog.csv (log t, log l2_dist, log|X'|),
/// shift.csv (t, X, Xdot) under dir.
void write_plot_data(const std::filesystem::path& dir, std::span<const DiagRecord> series);

}  // namespace shocklab
