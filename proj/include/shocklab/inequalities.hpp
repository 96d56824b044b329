#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shocklab/diagnostics.hpp"
#include "shocklab/dynamics.hpp"
#include "shocklab/grid.hpp"
#include "shocklab/profile.hpp"

namespace shocklab {

/// A function on [0, 1] sampled at quadrature nodes, with weights attached.
struct SampledFunction1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> values;
  std::vector<double> derivatives;
  bool analytic_derivative = false;

  /// Composite 4-point Gauss-Legendre on `panels` equal panels.
  static SampledFunction1D gauss_legendre(const std::function<double(double)>& f,
                                          const std::function<double(double)>& df, int panels = 64);
  /// Arbitrary increasing nodes covering [0, 1]: trapezoid weights and finite-difference
  /// derivatives (second order, one-sided at the ends).
  static SampledFunction1D from_samples(std::vector<double> nodes, std::vector<double> values);

  /// Throws DomainError on non-finite values, non-increasing nodes or size mismatches.
  void validate() const;
};

struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
  bool holds(double rel_tol = 1e-12) const { return lhs <= rhs * (1.0 + rel_tol) + 1e-300; }
};

/// lhs = int (f - mean f)^2, rhs = 1/2 int z(1-z) f'^2 over [0, 1].
InequalitySides poincare_weighted_check(const SampledFunction1D& f);

struct GnResult {
  double lhs = 0.0;                 ///< ||f||_{L2}
  double rhs = 0.0;                 ///< sum_k ||grad f||^{theta_k} ||f||_{L1}^{1 - theta_k}
  std::vector<double> theta;        ///< theta_k = (k+1)/(k+3), k = 0..n-1
  std::vector<double> theta_terms;  ///< the summands
  double grad_l2 = 0.0;
  double l1 = 0.0;
  bool zero = false;  ///< f == 0; the ratio is skipped
  double ratio() const { return zero ? 0.0 : lhs / rhs; }
};

GnResult gn_slab_check(const Field& f);

struct GnFixture {
  std::string name;
  Field field;
};

/// Gaussians, smooth bumps and transversally modulated bumps at dilations mu in {1/4, 1, 4}
/// on a slab grid with n_dims dimensions.
std::vector<GnFixture> gn_corpus(int n_dims = 2);

struct GnEstimate {
  double constant = 0.0;  ///< sup of lhs/rhs over the corpus (an empirical surrogate)
  std::string argmax;
  std::vector<std::pair<std::string, double>> ratios;
};
GnEstimate estimate_gn_constant(const std::vector<GnFixture>& corpus);

/// Two runs stepped in lockstep with ||u - v||_{L1} sampled every diag_every steps of `a`.
struct PairedTrajectory {
  std::vector<double> t;
  std::vector<double> l1_diff;
  double dt = 0.0;
};

/// DomainError unless both setups share profile, grid, dt policy, t_final and stepper settings.
PairedTrajectory run_paired(const RunSetup& a, const RunSetup& b);

/// ||u(t) - v(t)||_{L1} <= ||u0 - v0||_{L1} (1 + rel_tol) at every sample, plus the
/// stronger sample-to-sample monotonicity with the same tolerance.
CheckResult l1_contraction_paired_check(const PairedTrajectory& p, double rel_tol);

struct SandwichReport {
  bool pass = true;
  bool degenerate = false;         ///< 2a - g2 <= 0: lower bound nonpositive, not asserted
  double min_lower_margin = 0.0;   ///< min over nodes of (-u~'/eps - lower)
  double min_upper_margin = 0.0;   ///< min over nodes of (upper - (-u~'/eps))
  double max_identity_error = 0.0; ///< max |-u~'/eps - a eps z(1-z)| (meaningful for g == 0)
  std::size_t nodes = 0;
};

/// Checks (2a - g2)/2 eps z(1-z) <= -u~'/eps <= (2a + g2)/2 eps z(1-z) at every
/// tabulation node, z = (u- - u~)/eps, with relative tolerance rel_tol.
SandwichReport dzdxi_sandwich_check(const ShockProfile& profile, const FluxSpec& flux, double rel_tol = 1e-9);

struct LemmaEntry {
  std::string lemma;
  std::string fixture;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = true;
  bool asserted = true;  ///< false for reported-only entries (degenerate fixtures)
};

struct LemmaSuiteOptions {
  std::uint64_t seed = 20240601;
  int trig_cases = 1000;
  int panels = 64;
  bool inject_broken = false;  ///< halves the rhs of one Poincare fixture (negative control)
  bool empty_corpus = false;
};

struct LemmaSuiteReport {
  std::vector<LemmaEntry> entries;
  GnEstimate gn;
  bool pass() const;
  std::vector<std::string> failures() const;
  nlohmann::json to_json() const;
};

/// The full lemma corpus. Throws ConfigError when the corpus is empty.
LemmaSuiteReport run_lemma_suite(const LemmaSuiteOptions& opts = {});

}  // namespace shocklab
