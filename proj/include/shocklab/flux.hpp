#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace shocklab {

/// Polynomial c0 + c1 u + c2 u^2 + ... evaluated with Horner's rule.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  double value(double u) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
    return acc;
  }
  double derivative(double u) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * u + static_cast<double>(k) * coeffs_[k];
    return acc;
  }
  double second_derivative(double u) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 2;)
      acc = acc * u + static_cast<double>(k * (k - 1)) * coeffs_[k];
    return acc;
  }
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/// The perturbation g of the normal flux f1 = a u^2 + g(u).
///
/// Closed-form families are dispatched by a switch so the solver's inner loops
/// stay cheap; arbitrary user functions go through the Custom kind.
class Perturbation {
 public:
  enum class Kind { Zero, Sine, Poly, Custom };

  static Perturbation zero() { return Perturbation{}; }
  /// g(u) = kappa sin(omega u); |g''| <= |kappa| omega^2.
  static Perturbation sine(double kappa, double omega = 1.0);
  static Perturbation polynomial(std::vector<double> coeffs);
  static Perturbation custom(std::function<double(double)> g, std::function<double(double)> dg,
                             std::function<double(double)> d2g, std::string label = "custom");

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }
  const std::string& label() const { return label_; }
  double kappa() const { return kappa_; }
  double omega() const { return omega_; }
  const Polynomial& poly() const { return poly_; }

  double value(double u) const {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::Sine: return kappa_ * std::sin(omega_ * u);
      case Kind::Poly: return poly_.value(u);
      case Kind::Custom: return g_(u);
    }
    return 0.0;
  }
  double d1(double u) const {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::Sine: return kappa_ * omega_ * std::cos(omega_ * u);
      case Kind::Poly: return poly_.derivative(u);
      case Kind::Custom: return dg_(u);
    }
    return 0.0;
  }
  double d2(double u) const {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::Sine: return -kappa_ * omega_ * omega_ * std::sin(omega_ * u);
      case Kind::Poly: return poly_.second_derivative(u);
      case Kind::Custom: return d2g_(u);
    }
    return 0.0;
  }

 private:
  Kind kind_ = Kind::Zero;
  std::string label_ = "zero";
  double kappa_ = 0.0;
  double omega_ = 0.0;
  Polynomial poly_;
  std::function<double(double)> g_, dg_, d2g_;
};

/// F = (f1, ..., fn) with f1(u) = a u^2 + g(u) and user-configurable transverse fluxes.
struct FluxSpec {
  double a = 0.5;
  Perturbation g;
  /// Asserted bound on sup |g''|; verified by sampling, never trusted blindly.
  double g2_bound = 0.0;
  /// f2..fn; an empty list means every transverse flux is a u^2.
  std::vector<Polynomial> transverse;

  /// Pure Burgers-type flux f_i = a u^2 in every direction.
  static FluxSpec burgers(double a = 0.5);
  /// a u^2 + kappa sin(omega u) with the exact bound |kappa| omega^2.
  static FluxSpec sine_perturbed(double a, double kappa, double omega = 1.0);

  double f1(double u) const { return a * u * u + g.value(u); }
  double df1(double u) const { return 2.0 * a * u + g.d1(u); }
  double d2f1(double u) const { return 2.0 * a + g.d2(u); }

  /// Transverse flux f_{dir+2}; dir counts torus directions from 0.
  double ft(std::size_t dir, double u) const {
    if (transverse.empty()) return a * u * u;
    return transverse[std::min(dir, transverse.size() - 1)].value(u);
  }
  double dft(std::size_t dir, double u) const {
    if (transverse.empty()) return 2.0 * a * u;
    return transverse[std::min(dir, transverse.size() - 1)].derivative(u);
  }

  /// Throws DomainError unless a > 0 and |g''| <= g2_bound on dense samples of [lo, hi].
  void verify(double lo, double hi, int samples = 20001) const;
  /// Largest |f_i'| over samples of [lo, hi] for the transverse fluxes (Lipschitz sanity check).
  double transverse_lipschitz(double lo, double hi, std::size_t n_dirs, int samples = 2001) const;
};

struct ShockData {
  double u_minus = 1.0;
  double u_plus = 0.0;
  double eps = 1.0;
  double sigma = 0.5;

  /// Builds the shock, computing eps and sigma; throws DomainError on equal endpoints.
  static ShockData make(const FluxSpec& flux, double u_minus, double u_plus);
};

/// sigma = (f1(u-) - f1(u+)) / (u- - u+).
double rankine_hugoniot(const FluxSpec& flux, double u_minus, double u_plus);

struct AdmissibilityReport {
  bool lax = false;           ///< u- > u+
  bool flux_hyp = false;      ///< g2_bound < (2/3) a
  bool strength_hyp = false;  ///< eps < 8 pi / (2a + g2_bound)
  double flux_threshold = 0.0;
  double strength_threshold = 0.0;

  bool admissible() const { return lax && flux_hyp && strength_hyp; }
  /// Human-readable list of the failed gates; empty when admissible.
  std::string failures() const;
};

AdmissibilityReport check_admissibility(const FluxSpec& flux, const ShockData& shock);

/// G(u|v) = G(u) - G(v) - G'(v)(u - v).
template <class G, class DG>
double relative_quantity(G&& g, DG&& dg, double u, double v) {
  return g(u) - g(v) - dg(v) * (u - v);
}

/// f1(u|v) = a (u-v)^2 + g(u|v).
double relative_flux_f1(const FluxSpec& flux, double u, double v);

}  // namespace shocklab
