#include "shocklab/inequalities.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "shocklab/error.hpp"
#include "shocklab/initial_data.hpp"

namespace shocklab {

SampledFunction1D SampledFunction1D::gauss_legendre(const std::function<double(double)>& f,
                                                    const std::function<double(double)>& df, int panels) {
  if (panels < 1) throw DomainError("need at least one quadrature panel");
  using rule = boost::math::quadrature::gauss<double, 4>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  SampledFunction1D s;
  s.analytic_derivative = true;
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    // abscissa() lists the nonnegative half of a symmetric rule.
    for (int side : {-1, 1})
      for (std::size_t k = 0; k < x.size(); ++k) {
        const std::size_t j = side < 0 ? x.size() - 1 - k : k;
        const double z = mid + side * 0.5 * h * x[j];
        s.nodes.push_back(z);
        s.weights.push_back(0.5 * h * w[j]);
      }
  }
  for (double z : s.nodes) {
    s.values.push_back(f(z));
    s.derivatives.push_back(df(z));
  }
  s.validate();
  return s;
}

SampledFunction1D SampledFunction1D::from_samples(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() != values.size() || nodes.size() < 3) throw DomainError("need at least three matching samples");
  SampledFunction1D s;
  s.nodes = std::move(nodes);
  s.values = std::move(values);
  const std::size_t n = s.nodes.size();
  s.weights.assign(n, 0.0);
  s.derivatives.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = s.nodes[k + 1] - s.nodes[k];
    s.weights[k] += 0.5 * h;
    s.weights[k + 1] += 0.5 * h;
  }
  auto d3 = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t at) {
    // Derivative at node `at` of the parabola through a, b, c.
    const double xa = s.nodes[a], xb = s.nodes[b], xc = s.nodes[c], x = s.nodes[at];
    return s.values[a] * ((x - xb) + (x - xc)) / ((xa - xb) * (xa - xc)) +
           s.values[b] * ((x - xa) + (x - xc)) / ((xb - xa) * (xb - xc)) +
           s.values[c] * ((x - xa) + (x - xb)) / ((xc - xa) * (xc - xb));
  };
  s.derivatives[0] = d3(0, 1, 2, 0);
  for (std::size_t k = 1; k + 1 < n; ++k) s.derivatives[k] = d3(k - 1, k, k + 1, k);
  s.derivatives[n - 1] = d3(n - 3, n - 2, n - 1, n - 1);
  s.validate();
  return s;
}

void SampledFunction1D::validate() const {
  const std::size_t n = nodes.size();
  if (weights.size() != n || values.size() != n || derivatives.size() != n)
    throw DomainError("sampled function arrays differ in length");
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(values[k]) || !std::isfinite(derivatives[k]) || !std::isfinite(weights[k]))
      throw DomainError("sampled function has non-finite entries");
    if (nodes[k] < 0.0 || nodes[k] > 1.0) throw DomainError("sample node outside [0, 1]");
    if (k > 0 && !(nodes[k] > nodes[k - 1])) throw DomainError("sample nodes must increase");
  }
}

InequalitySides poincare_weighted_check(const SampledFunction1D& f) {
  double mean = 0.0;
  for (std::size_t k = 0; k < f.nodes.size(); ++k) mean += f.weights[k] * f.values[k];
  InequalitySides s;
  for (std::size_t k = 0; k < f.nodes.size(); ++k) {
    const double z = f.nodes[k], d = f.values[k] - mean;
    s.lhs += f.weights[k] * d * d;
    s.rhs += f.weights[k] * z * (1.0 - z) * f.derivatives[k] * f.derivatives[k];
  }
  s.rhs *= 0.5;
  return s;
}

GnResult gn_slab_check(const Field& f) {
  GnResult r;
  const int n = f.grid().n_dims();
  r.lhs = std::sqrt(integrate_abs_pow(f, 2.0));
  r.l1 = integrate_abs_pow(f, 1.0);
  r.grad_l2 = std::sqrt(gradient_sq_integral(f));
  for (int k = 0; k < n; ++k) {
    const double th = (k + 1.0) / (k + 3.0);
    r.theta.push_back(th);
    const double term = std::pow(r.grad_l2, th) * std::pow(r.l1, 1.0 - th);
    r.theta_terms.push_back(term);
    r.rhs += term;
  }
  r.zero = r.lhs == 0.0 && r.rhs == 0.0;
  return r;
}

std::vector<GnFixture> gn_corpus(int n_dims) {
  // h = 0.02 resolves the narrowest dilation; L = 40 holds the widest.
  const Grid grid(40.0, 4001, n_dims, 16);
  std::vector<GnFixture> out;
  const double pi = std::numbers::pi;
  for (double mu : {0.25, 1.0, 4.0}) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "mu=%g", mu);
    out.push_back({std::string("gaussian ") + tag, Field::sample(grid, [mu](double xi, std::span<const double>) {
                     return std::exp(-0.5 * xi * xi / (mu * mu));
                   })});
    out.push_back({std::string("bump ") + tag, Field::sample(grid, [mu](double xi, std::span<const double>) {
                     return smooth_bump(xi / (2.0 * mu));
                   })});
    out.push_back({std::string("modulated_bump ") + tag,
                   Field::sample(grid, [mu, pi](double xi, std::span<const double> xt) {
                     double m = 1.0;
                     for (double x : xt) m *= 1.0 + std::cos(2.0 * pi * x);
                     return smooth_bump(xi / (2.0 * mu)) * m;
                   })});
    out.push_back({std::string("torus_localized_bump ") + tag,
                   Field::sample(grid, [mu](double xi, std::span<const double> xt) {
                     double m = 1.0;
                     for (double x : xt) m *= smooth_bump((x - 0.5) / 0.3);
                     return smooth_bump(xi / (2.0 * mu)) * m;
                   })});
  }
  return out;
}

GnEstimate estimate_gn_constant(const std::vector<GnFixture>& corpus) {
  GnEstimate e;
  for (const auto& fx : corpus) {
    const auto r = gn_slab_check(fx.field);
    if (r.zero) continue;
    e.ratios.emplace_back(fx.name, r.ratio());
    if (r.ratio() > e.constant) {
      e.constant = r.ratio();
      e.argmax = fx.name;
    }
  }
  return e;
}

PairedTrajectory run_paired(const RunSetup& a, const RunSetup& b) {
  if (a.profile == nullptr || b.profile == nullptr) throw DomainError("paired runs need a profile");
  if (a.profile != b.profile) throw DomainError("paired runs must share the profile and flux");
  if (!(a.u0.grid() == b.u0.grid())) throw DomainError("paired runs must share the grid");
  if (a.dt != b.dt || a.t_final != b.t_final || a.max_steps != b.max_steps ||
      a.stepper.order != b.stepper.order || a.stepper.c_diffusion != b.stepper.c_diffusion ||
      a.stepper.c_advection != b.stepper.c_advection)
    throw DomainError("paired runs must share dt policy, horizon and stepper settings");
  if (a.diag_every < 1) throw DomainError("diag_every must be at least 1");

  const ShockProfile& profile = *a.profile;
  const Grid& grid = a.u0.grid();
  Stepper stepper(grid, profile.flux(), profile, a.stepper);

  // The step is fixed by the union of both data ranges so both runs use the same dt.
  std::int64_t nsteps;
  double dt;
  if (a.max_steps > 0) {
    if (!(a.dt > 0.0)) throw DomainError("a step-count run needs an explicit dt");
    nsteps = a.max_steps;
    dt = a.dt;
  } else {
    const auto [la, ha] = std::minmax_element(a.u0.data().begin(), a.u0.data().end());
    const auto [lb, hb] = std::minmax_element(b.u0.data().begin(), b.u0.data().end());
    const double limit = a.dt > 0.0 ? a.dt : stepper.stable_dt(std::min(*la, *lb), std::max(*ha, *hb));
    nsteps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(a.t_final / limit - 1e-9)));
    dt = a.t_final / static_cast<double>(nsteps);
  }

  PairedTrajectory p;
  p.dt = dt;
  SimState sa{a.u0}, sb{b.u0};
  auto sample = [&] {
    p.t.push_back(sa.t);
    p.l1_diff.push_back(integrate_abs_pow(sa.u - sb.u, 1.0));
  };
  sample();
  for (std::int64_t k = 1; k <= nsteps; ++k) {
    stepper.advance(sa, dt);
    stepper.advance(sb, dt);
    if (k % a.diag_every == 0 || k == nsteps) sample();
  }
  return p;
}

CheckResult l1_contraction_paired_check(const PairedTrajectory& p, double rel_tol) {
  CheckResult c;
  c.name = "l1_contraction_paired";
  if (p.l1_diff.empty()) {
    c.detail = "no samples";
    return c;
  }
  const double d0 = p.l1_diff.front();
  c.margin = std::numeric_limits<double>::infinity();
  auto add = [&](double bound, double v, double t) {
    if (bound - v < c.margin) {
      c.margin = bound - v;
      c.worst_t = t;
    }
    if (!(v <= bound)) c.pass = false;
  };
  for (std::size_t k = 1; k < p.l1_diff.size(); ++k) {
    add(d0 * (1.0 + rel_tol), p.l1_diff[k], p.t[k]);
    add(p.l1_diff[k - 1] + d0 * rel_tol, p.l1_diff[k], p.t[k]);
  }
  if (p.l1_diff.size() == 1) c.margin = 0.0;
  char buf[96];
  std::snprintf(buf, sizeof buf, "||u0 - v0||_L1 = %.6g, final %.6g", d0, p.l1_diff.back());
  c.detail = buf;
  return c;
}

SandwichReport dzdxi_sandwich_check(const ShockProfile& profile, const FluxSpec& flux, double rel_tol) {
  SandwichReport r;
  const auto& sh = profile.shock();
  const double eps = sh.eps;
  const double lo = 0.5 * (2.0 * flux.a - flux.g2_bound) * eps;
  const double hi = 0.5 * (2.0 * flux.a + flux.g2_bound) * eps;
  r.degenerate = !(lo > 0.0);
  r.min_lower_margin = r.min_upper_margin = std::numeric_limits<double>::infinity();
  const auto& u = profile.values();
  const auto& du = profile.derivatives();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double z = (sh.u_minus - u[k]) / eps;
    const double w = z * (1.0 - z);
    const double q = -du[k] / eps;
    const double lower = lo * w, upper = hi * w;
    r.min_lower_margin = std::min(r.min_lower_margin, q - lower);
    r.min_upper_margin = std::min(r.min_upper_margin, upper - q);
    r.max_identity_error = std::max(r.max_identity_error, std::abs(q - flux.a * eps * w));
    // Both bounds vanish in the clamped tails, where rounding alone decides the sign.
    const double slack = rel_tol * std::abs(upper) + 64.0 * std::numeric_limits<double>::epsilon() * hi;
    if (!r.degenerate && (q < lower - slack || q > upper + slack)) r.pass = false;
  }
  r.nodes = u.size();
  return r;
}

bool LemmaSuiteReport::pass() const {
  for (const auto& e : entries)
    if (e.asserted && !e.pass) return false;
  return !entries.empty();
}

std::vector<std::string> LemmaSuiteReport::failures() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (e.asserted && !e.pass) out.push_back(e.lemma + " / " + e.fixture);
  return out;
}

nlohmann::json LemmaSuiteReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass();
  j["failures"] = failures();
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries)
    j["entries"].push_back({{"lemma", e.lemma},
                            {"fixture", e.fixture},
                            {"lhs", e.lhs},
                            {"rhs", e.rhs},
                            {"margin", e.margin},
                            {"pass", e.pass},
                            {"asserted", e.asserted}});
  j["gn_constant"] = {{"value", gn.constant}, {"argmax", gn.argmax}, {"empirical", true}};
  return j;
}

namespace {

// f(z) = c z + sum_k (a_k cos 2 pi k z + b_k sin 2 pi k z) / k with a random number of modes.
struct TrigPoly {
  double c = 0.0;
  std::vector<double> a, b;
  double operator()(double z) const {
    double v = c * z;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k + 1);
      v += (a[k] * std::cos(w * z) + b[k] * std::sin(w * z)) / static_cast<double>(k + 1);
    }
    return v;
  }
  double derivative(double z) const {
    double v = c;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k + 1);
      v += w * (-a[k] * std::sin(w * z) + b[k] * std::cos(w * z)) / static_cast<double>(k + 1);
    }
    return v;
  }
};

LemmaEntry poincare_entry(const std::string& fixture, const SampledFunction1D& f, bool broken) {
  auto s = poincare_weighted_check(f);
  if (broken) s.rhs *= 0.5;
  return {"weighted_poincare", fixture, s.lhs, s.rhs, s.margin(), s.margin() >= -1e-8, true};
}

}  // namespace

LemmaSuiteReport run_lemma_suite(const LemmaSuiteOptions& opts) {
  if (opts.empty_corpus) throw ConfigError("empty lemma corpus: nothing would be verified");
  LemmaSuiteReport rep;
  auto& E = rep.entries;

  // Weighted Poincare: closed-form fixtures first.
  {
    const auto affine = SampledFunction1D::gauss_legendre([](double z) { return z; }, [](double) { return 1.0; },
                                                          opts.panels);
    auto e = poincare_entry("affine f(z) = z", affine, opts.inject_broken);
    e.pass = e.pass && std::abs(e.lhs - 1.0 / 12.0) <= 1e-8 && std::abs(e.rhs - 1.0 / 12.0) <= 1e-8;
    E.push_back(e);
    E.push_back(poincare_entry(
        "constant", SampledFunction1D::gauss_legendre([](double) { return 3.0; }, [](double) { return 0.0; }), false));
    auto sq = poincare_entry("f(z) = z^2", SampledFunction1D::gauss_legendre([](double z) { return z * z; },
                                                                             [](double z) { return 2.0 * z; }),
                             false);
    sq.pass = sq.pass && std::abs(sq.lhs - 4.0 / 45.0) <= 1e-12 && std::abs(sq.rhs - 0.1) <= 1e-12;
    E.push_back(sq);
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> modes(1, 6);
  for (int k = 0; k < opts.trig_cases; ++k) {
    TrigPoly p;
    p.c = normal(rng);
    const int m = modes(rng);
    for (int j = 0; j < m; ++j) {
      p.a.push_back(normal(rng));
      p.b.push_back(normal(rng));
    }
    char name[32];
    std::snprintf(name, sizeof name, "trig_%04d", k);
    E.push_back(poincare_entry(
        name,
        SampledFunction1D::gauss_legendre([&p](double z) { return p(z); }, [&p](double z) { return p.derivative(z); },
                                          opts.panels),
        false));
  }

  // Gagliardo-Nirenberg on the slab: estimate the constant, then check amplitude invariance.
  const auto corpus = gn_corpus(2);
  rep.gn = estimate_gn_constant(corpus);
  for (const auto& fx : corpus) {
    const auto r = gn_slab_check(fx.field);
    E.push_back({"gn_ratio", fx.name, r.lhs, rep.gn.constant * r.rhs, rep.gn.constant * r.rhs - r.lhs,
                 std::isfinite(r.ratio()) && r.ratio() > 0.0, true});
    const auto scaled = gn_slab_check(3.0 * fx.field);
    const double drift = std::abs(scaled.ratio() - r.ratio());
    E.push_back({"gn_scale_invariance", fx.name + " x3", r.ratio(), scaled.ratio(), 1e-12 * r.ratio() - drift,
                 drift <= 1e-12 * r.ratio(), true});
  }

  // The printed inequality carries no constant; the corpus supremum should not exceed 1.
  E.push_back({"gn_bounded", "corpus supremum (" + rep.gn.argmax + ")", rep.gn.constant, 1.0, 1.0 - rep.gn.constant,
               rep.gn.constant > 0.0 && rep.gn.constant <= 1.0, true});

  // dz/dxi sandwich over admissible fluxes; an inadmissible one is reported, not asserted.
  struct SandwichFixture {
    std::string name;
    FluxSpec flux;
    double um, up;
  };
  const std::vector<SandwichFixture> sandwich = {
      {"burgers a=1/2 (1,0)", FluxSpec::burgers(0.5), 1.0, 0.0},
      {"burgers a=1 (0.5,-1)", FluxSpec::burgers(1.0), 0.5, -1.0},
      {"sine kappa=0.05 a=1/2 (1,0)", FluxSpec::sine_perturbed(0.5, 0.05), 1.0, 0.0},
      {"sine kappa=0.02 omega=2 a=1/2 (1.5,-0.5)", FluxSpec::sine_perturbed(0.5, 0.02, 2.0), 1.5, -0.5},
      {"sine kappa=-0.1 a=1 (1,0)", FluxSpec::sine_perturbed(1.0, -0.1), 1.0, 0.0},
  };
  for (const auto& fx : sandwich) {
    const auto shock = ShockData::make(fx.flux, fx.um, fx.up);
    const auto prof = solve_profile(fx.flux, shock);
    const auto r = dzdxi_sandwich_check(prof, fx.flux);
    const double m = std::min(r.min_lower_margin, r.min_upper_margin);
    E.push_back({"dzdxi_sandwich", fx.name, 0.0, m, m, r.pass, true});
    if (fx.flux.g.is_zero())
      E.push_back({"dzdxi_identity", fx.name, r.max_identity_error, 1e-10, 1e-10 - r.max_identity_error,
                   r.max_identity_error <= 1e-10, true});
  }
  {
    // g'' bound 0.6 >= 2a = 0.5: the lower bound is negative and the check degenerates.
    FluxSpec f = FluxSpec::sine_perturbed(0.25, 0.6);
    SandwichReport r;
    r.degenerate = true;
    double m = 0.0;
    try {
      const auto prof = solve_profile(f, ShockData::make(f, 1.0, 0.0));
      r = dzdxi_sandwich_check(prof, f);
      m = std::min(r.min_lower_margin, r.min_upper_margin);
    } catch (const Error&) {
      m = std::numeric_limits<double>::quiet_NaN();
    }
    E.push_back({"dzdxi_sandwich", "inadmissible sine kappa=0.6 a=1/4 (flagged)", 0.0, m, m, !r.degenerate, false});
  }
  return rep;
}

}  // namespace shocklab
