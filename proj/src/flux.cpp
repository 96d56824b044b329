#include "shocklab/flux.hpp"

#include <numbers>
#include <sstream>

#include "shocklab/error.hpp"

namespace shocklab {

Perturbation Perturbation::sine(double kappa, double omega) {
  Perturbation p;
  p.kind_ = kappa == 0.0 ? Kind::Zero : Kind::Sine;
  p.label_ = p.kind_ == Kind::Zero ? "zero" : "sine";
  p.kappa_ = kappa;
  p.omega_ = omega;
  return p;
}

Perturbation Perturbation::polynomial(std::vector<double> coeffs) {
  Perturbation p;
  p.kind_ = Kind::Poly;
  p.label_ = "poly";
  p.poly_ = Polynomial(std::move(coeffs));
  return p;
}

Perturbation Perturbation::custom(std::function<double(double)> g, std::function<double(double)> dg,
                                  std::function<double(double)> d2g, std::string label) {
  Perturbation p;
  p.kind_ = Kind::Custom;
  p.label_ = std::move(label);
  p.g_ = std::move(g);
  p.dg_ = std::move(dg);
  p.d2g_ = std::move(d2g);
  return p;
}

FluxSpec FluxSpec::burgers(double a) {
  FluxSpec f;
  f.a = a;
  return f;
}

FluxSpec FluxSpec::sine_perturbed(double a, double kappa, double omega) {
  FluxSpec f;
  f.a = a;
  f.g = Perturbation::sine(kappa, omega);
  f.g2_bound = std::abs(kappa) * omega * omega;
  return f;
}

void FluxSpec::verify(double lo, double hi, int samples) const {
  if (!(a > 0.0)) throw DomainError("flux coefficient a must be positive");
  if (!(g2_bound >= 0.0)) throw DomainError("g2_bound must be nonnegative");
  if (g.is_zero()) return;
  samples = std::max(samples, 2);
  for (int k = 0; k < samples; ++k) {
    const double u = lo + (hi - lo) * k / (samples - 1);
    const double v = std::abs(g.d2(u));
    if (!std::isfinite(v) || v > g2_bound * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "asserted g2_bound " << g2_bound << " violated: |g''(" << u << ")| = " << v;
      throw DomainError(os.str());
    }
  }
}

double FluxSpec::transverse_lipschitz(double lo, double hi, std::size_t n_dirs, int samples) const {
  double lip = 0.0;
  samples = std::max(samples, 2);
  for (std::size_t d = 0; d < n_dirs; ++d) {
    for (int k = 0; k < samples; ++k) {
      const double u = lo + (hi - lo) * k / (samples - 1);
      const double s = std::abs(dft(d, u));
      if (!std::isfinite(s)) throw DomainError("transverse flux derivative is not finite");
      lip = std::max(lip, s);
    }
  }
  return lip;
}

double rankine_hugoniot(const FluxSpec& flux, double u_minus, double u_plus) {
  if (u_minus == u_plus) throw DomainError("degenerate shock: u- == u+");
  return (flux.f1(u_minus) - flux.f1(u_plus)) / (u_minus - u_plus);
}

ShockData ShockData::make(const FluxSpec& flux, double u_minus, double u_plus) {
  ShockData s;
  s.u_minus = u_minus;
  s.u_plus = u_plus;
  s.eps = u_minus - u_plus;
  s.sigma = rankine_hugoniot(flux, u_minus, u_plus);
  return s;
}

std::string AdmissibilityReport::failures() const {
  std::ostringstream os;
  if (!lax) os << "Lax condition u- > u+ violated; ";
  if (!flux_hyp) os << "flux hypothesis |g''| < (2/3)a violated (need g2_bound < " << flux_threshold << "); ";
  if (!strength_hyp) os << "shock strength eps < 8pi/(2a+|g''|) violated (threshold " << strength_threshold << "); ";
  std::string s = os.str();
  if (s.size() >= 2) s.resize(s.size() - 2);
  return s;
}

AdmissibilityReport check_admissibility(const FluxSpec& flux, const ShockData& shock) {
  AdmissibilityReport r;
  r.lax = shock.u_minus > shock.u_plus;
  r.flux_threshold = 2.0 * flux.a / 3.0;
  r.flux_hyp = flux.g2_bound < r.flux_threshold;
  r.strength_threshold = 8.0 * std::numbers::pi / (2.0 * flux.a + flux.g2_bound);
  r.strength_hyp = shock.eps > 0.0 && shock.eps < r.strength_threshold;
  return r;
}

double relative_flux_f1(const FluxSpec& flux, double u, double v) {
  const double d = u - v;
  const double g_rel = flux.g.value(u) - flux.g.value(v) - flux.g.d1(v) * d;
  return flux.a * d * d + g_rel;
}

}  // namespace shocklab
