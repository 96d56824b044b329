#include "shocklab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "shocklab/error.hpp"

namespace shocklab {

using nlohmann::json;

DiagRecord measure(const SimState& s, const ShockProfile& profile) {
  const Grid& g = s.u.grid();
  const auto nx = static_cast<std::size_t>(g.n_xi());
  const auto shifted = ShiftedProfile::on(g, profile, s.X);
  std::vector<double> base(nx);
  for (std::size_t i = 0; i < nx; ++i) base[i] = profile.value(g.xi(i));

  const double tail_edge = 0.9 * g.half_width();
  const auto& u = s.u.data();
  std::vector<double> diff(u.size());
  double l2 = 0, l2u = 0, l1 = 0, l1u = 0, mass = 0, tail = 0, linf = 0;
  for (std::size_t r = 0; r < g.rows(); ++r) {
    double a2 = 0, a2u = 0, a1 = 0, a1u = 0, am = 0, at = 0;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = i + nx * r;
      const double w = g.xi_weight(i);
      const double d = u[k] - shifted.value[i];
      const double du = u[k] - base[i];
      diff[k] = d;
      a2 += w * d * d;
      a1 += w * std::abs(d);
      a2u += w * du * du;
      a1u += w * std::abs(du);
      am += w * du;
      if (std::abs(g.xi(i)) >= tail_edge) at += w * std::abs(d);
      linf = std::max(linf, std::abs(u[k]));
    }
    l2 += a2;
    l2u += a2u;
    l1 += a1;
    l1u += a1u;
    mass += am;
    tail += at;
  }
  const double tw = g.torus_weight();

  DiagRecord rec;
  rec.step = s.step_index;
  rec.t = s.t;
  rec.X = s.X;
  rec.Xdot = shift_rhs(s, profile, profile.flux());
  rec.l2_dist = std::sqrt(l2 * tw);
  rec.l2_dist_unshifted = std::sqrt(l2u * tw);
  rec.l1_dist = l1 * tw;
  rec.l1_dist_unshifted = l1u * tw;
  rec.grad_sq = gradient_sq_integral(Field(g, std::move(diff)));
  rec.linf = linf;
  rec.mass = mass * tw;
  rec.tail_mass = tail * tw;
  return rec;
}

double dissipation_residual(const DiagRecord& prev, const DiagRecord& rec, double alpha) {
  const double dt = rec.t - prev.t;
  if (!(dt > 0.0)) throw DomainError("dissipation residual needs strictly increasing times");
  return (rec.l2_dist * rec.l2_dist - prev.l2_dist * prev.l2_dist) / dt + alpha * 0.5 * (rec.grad_sq + prev.grad_sq);
}

double compute_alpha(const FluxSpec& flux, double eps) {
  const double g2 = flux.g2_bound;
  if (!(g2 < 2.0 * flux.a)) throw DomainError("alpha requires |g''| bound < 2a");
  const double first = 2.0 - (2.0 * flux.a + g2) / (2.0 * flux.a - g2);
  const double s = (2.0 * flux.a + g2) * eps;
  const double second = 2.0 * (1.0 - s * s / (64.0 * std::numbers::pi * std::numbers::pi));
  return std::min(first, second);
}

PerturbationNorms perturbation_norms(const Field& u0, const ShockProfile& profile) {
  const Field base = Field::sample(u0.grid(), [&](double xi, std::span<const double>) { return profile.value(xi); });
  const Field d = u0 - base;
  return {integrate_abs_pow(d, 1.0), std::sqrt(integrate_abs_pow(d, 2.0)), u0.max_abs()};
}

double compute_C0(const Field& u0, const ShockProfile& profile) {
  const auto n = perturbation_norms(u0, profile);
  return 1.0 + n.energy() + n.l1;
}

Constants make_constants(const ShockProfile& profile, const Field& u0) {
  Constants c;
  c.a = profile.flux().a;
  c.g2_bound = profile.flux().g2_bound;
  c.eps = profile.shock().eps;
  c.alpha = compute_alpha(profile.flux(), c.eps);
  c.u0 = perturbation_norms(u0, profile);
  c.C0 = 1.0 + c.u0.energy() + c.u0.l1;
  const auto b = beta_constants(profile);
  c.beta1 = b.beta1;
  c.beta2 = b.beta2;
  c.beta = b.beta();
  c.profile_deriv_l2 = profile_l2_of_derivative(profile);
  c.n_dims = u0.grid().n_dims();
  return c;
}

json to_json(const Constants& c) {
  return json{{"a", c.a},
              {"g2_bound", c.g2_bound},
              {"eps", c.eps},
              {"alpha", c.alpha},
              {"C0", c.C0},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"beta", c.beta},
              {"profile_deriv_l2", c.profile_deriv_l2},
              {"u0_l1", c.u0.l1},
              {"u0_l2", c.u0.l2},
              {"u0_linf", c.u0.linf_u0},
              {"energy", c.u0.energy()},
              {"x_bound", c.x_bound()},
              {"n_dims", c.n_dims}};
}

Constants constants_from_json(const json& j) {
  Constants c;
  try {
    c.a = j.at("a").get<double>();
    c.g2_bound = j.at("g2_bound").get<double>();
    c.eps = j.at("eps").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.C0 = j.at("C0").get<double>();
    c.beta1 = j.at("beta1").get<double>();
    c.beta2 = j.at("beta2").get<double>();
    c.beta = j.at("beta").get<double>();
    c.profile_deriv_l2 = j.at("profile_deriv_l2").get<double>();
    c.u0.l1 = j.at("u0_l1").get<double>();
    c.u0.l2 = j.at("u0_l2").get<double>();
    c.u0.linf_u0 = j.at("u0_linf").get<double>();
    c.n_dims = j.at("n_dims").get<int>();
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed constants record: ") + e.what());
  }
  return c;
}

double default_tol_residual(const Grid& grid, double dt, double energy) {
  const double h = grid.n_t() > 1 ? std::max(grid.h_xi(), grid.h_t()) : grid.h_xi();
  return 10.0 * (h * h + dt * dt) * std::max(energy, 1e-16);
}

json to_json(const CheckResult& c) {
  return json{{"pass", c.pass}, {"margin", c.margin}, {"worst_t", c.worst_t}, {"detail", c.detail}};
}

namespace {

// Tracks the smallest bound - value seen.
struct Margin {
  CheckResult r;
  bool seen = false;
  explicit Margin(std::string name) { r.name = std::move(name); }
  void add(double bound, double value, double t) {
    const double m = bound - value;
    if (!seen || m < r.margin) {
      r.margin = m;
      r.worst_t = t;
    }
    seen = true;
    if (!(value <= bound)) r.pass = false;
  }
  CheckResult done(std::string detail = {}) {
    r.detail = std::move(detail);
    return r;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

CheckResult contraction_check(std::span<const DiagRecord> s, double tol) {
  Margin m("contraction");
  for (std::size_t k = 1; k < s.size(); ++k) {
    m.add(s[k - 1].l2_dist + tol * (s[k].t - s[k - 1].t), s[k].l2_dist, s[k].t);
    m.add(s.front().l2_dist + tol, s[k].l2_dist, s[k].t);
  }
  return m.done("tol " + fmt(tol));
}

CheckResult dissipation_check(std::span<const DiagRecord> s, double tol) {
  Margin m("dissipation");
  for (std::size_t k = 1; k < s.size(); ++k) m.add(tol, s[k].dissipation_residual, s[k].t);
  return m.done("tol " + fmt(tol) + ", max positive residual " + fmt(max_positive_residual(s)));
}

double max_positive_residual(std::span<const DiagRecord> s) {
  double worst = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k)
    if (std::isfinite(s[k].dissipation_residual)) worst = std::max(worst, s[k].dissipation_residual);
  return worst;
}

L1BoundReport l1_bound_check(std::span<const DiagRecord> s, const Constants& c, double rel_tol) {
  Margin l1("l1_unshifted"), xb("x_bound");
  L1BoundReport rep;
  const double bound = c.u0.l1 * (1.0 + rel_tol) + 1e-12;
  const double xbound = c.x_bound();
  for (const auto& r : s) {
    l1.add(bound, r.l1_dist_unshifted, r.t);
    xb.add(xbound, std::abs(r.X), r.t);
    rep.max_l1_over_C0 = std::max(rep.max_l1_over_C0, r.l1_dist / c.C0);
  }
  rep.l1_unshifted = l1.done("||u0 - u~||_L1 = " + fmt(c.u0.l1));
  rep.x_bound = xb.done("bound " + fmt(xbound) + ", beta " + fmt(c.beta));
  return rep;
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> v, double t_min, double noise_floor,
                   double p, double slack) {
  if (t.size() != v.size()) throw DomainError("fit_decay: t and v differ in length");
  DecayFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double t_first = 0, t_last = 0;
  bool have_k = false;
  fit.envelope_ok = true;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_min || !(t[k] > 0.0)) continue;
    const double rescaled = std::pow(t[k], p) * std::abs(v[k]);
    if (!have_k) {
      fit.K = rescaled;
      have_k = true;
    }
    if (fit.K > 0.0) fit.max_envelope_ratio = std::max(fit.max_envelope_ratio, rescaled / fit.K);
    if (rescaled > slack * fit.K) fit.envelope_ok = false;
    if (!(std::abs(v[k]) > noise_floor)) continue;
    const double x = std::log(t[k]), y = std::log(std::abs(v[k]));
    if (fit.points == 0) t_first = t[k];
    t_last = t[k];
    ++fit.points;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (!have_k) {
    fit.envelope_ok = false;
    fit.note = "no samples at or after t_min";
    return fit;
  }
  if (fit.points >= 2) {
    const double n = static_cast<double>(fit.points);
    const double den = n * sxx - sx * sx;
    if (den > 0.0) {
      fit.slope = (n * sxy - sx * sy) / den;
      fit.intercept = (sy - fit.slope * sx) / n;
    }
  }
  fit.conclusive = fit.points >= 3 && t_last >= 10.0 * t_first;
  if (!fit.conclusive) fit.note = "inconclusive: fewer than 3 points above the noise floor or less than a decade of t";
  return fit;
}

DecayFit fit_decay(std::span<const DiagRecord> s, double t_min) {
  std::vector<double> t, v;
  for (const auto& r : s) {
    t.push_back(r.t);
    v.push_back(r.l2_dist);
  }
  const double floor = s.empty() ? 0.0 : 1e-9 * std::max(1.0, s.front().l2_dist);
  return fit_decay(t, v, t_min, floor);
}

XdotReport xdot_decay_check(std::span<const DiagRecord> s, const Constants& c, double t_min, double rel_tol) {
  Margin m("xdot_cs_bound");
  std::vector<double> t, v;
  double vmax = 0.0;
  for (const auto& r : s) {
    const double bound = c.xdot_factor() * r.l2_dist;
    m.add(bound * (1.0 + rel_tol) + 1e-300, std::abs(r.Xdot), r.t);
    t.push_back(r.t);
    v.push_back(r.Xdot);
    vmax = std::max(vmax, std::abs(r.Xdot));
  }
  XdotReport rep;
  rep.cs_bound = m.done("factor " + fmt(c.xdot_factor()));
  rep.fit = fit_decay(t, v, t_min, 1e-9 * std::max(vmax, 1e-300));
  return rep;
}

CheckResult sublinear_shift_check(std::span<const DiagRecord> s, double t_min) {
  Margin m("sublinear_shift");
  const DiagRecord* start = nullptr;
  double sup = 0.0;
  for (const auto& r : s) {
    if (r.t < t_min) continue;
    if (!start) start = &r;
    sup = std::max(sup, std::pow(r.t, 0.25) * std::abs(r.Xdot));
  }
  if (!start) return m.done("no samples at or after t_min");
  const double K = 4.0 / 3.0 * sup;
  const double x0 = std::abs(start->X);
  for (const auto& r : s) {
    if (r.t < t_min) continue;
    const double bound = x0 + K * (std::pow(r.t, 0.75) - std::pow(start->t, 0.75));
    m.add(bound + 1e-9 * std::max(1.0, std::abs(bound)), std::abs(r.X), r.t);
  }
  return m.done("K " + fmt(K));
}

CheckResult max_principle_check(std::span<const DiagRecord> s, double linf0, double tol) {
  Margin m("max_principle");
  for (const auto& r : s) m.add(linf0 + tol, r.linf, r.t);
  return m.done("||u0||_inf = " + fmt(linf0));
}

CheckResult conservation_check(std::span<const DiagRecord> s, double energy, double rel_tol, double abs_floor) {
  Margin m("conservation");
  if (s.empty()) return m.done();
  const double tol = rel_tol * energy + abs_floor;
  for (const auto& r : s) m.add(tol, std::abs(r.mass - s.front().mass), r.t);
  return m.done("tol " + fmt(tol));
}

CheckResult tail_mass_check(std::span<const DiagRecord> s, double tol) {
  Margin m("tail_mass");
  for (const auto& r : s) m.add(tol, r.tail_mass, r.t);
  return m.done("tol " + fmt(tol));
}

double timedecay_ratio(const DiagRecord& r, const Constants& c, double gn) {
  const double E = c.u0.l2;
  const double q = std::pow(2.0 * c.alpha, 0.25);
  const double k = gn * c.C0 * std::pow(static_cast<double>(c.n_dims), 1.5);
  if (!(E > 0.0) || !(k > 0.0)) return 0.0;
  return r.l2_dist * (q * std::pow(r.t, 0.25) * E + k) / (2.0 * k * E);
}

namespace {

json fit_json(const DecayFit& f) {
  return json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"points", f.points},
              {"conclusive", f.conclusive},
              {"envelope_ok", f.envelope_ok},
              {"K", f.K},
              {"max_envelope_ratio", f.max_envelope_ratio},
              {"note", f.note}};
}

}  // namespace

json build_summary(std::span<const DiagRecord> s, const Constants& c, const SummarySettings& set) {
  json out;
  out["samples"] = s.size();
  out["t_final"] = s.empty() ? 0.0 : s.back().t;
  out["aborted"] = set.aborted;
  if (set.aborted) out["abort_message"] = set.abort_message;
  out["constants"] = to_json(c);
  out["tol_residual"] = set.tol_residual;
  out["t_min"] = set.t_min;

  json checks;
  const auto contraction = contraction_check(s, set.tol_residual);
  checks["contraction"] = to_json(contraction);
  checks["dissipation"] = to_json(dissipation_check(s, set.tol_residual));
  const auto l1 = l1_bound_check(s, c, set.l1_rel_tol);
  checks["l1_unshifted"] = to_json(l1.l1_unshifted);
  checks["x_bound"] = to_json(l1.x_bound);
  const auto xd = xdot_decay_check(s, c, set.t_min);
  checks["xdot_cs_bound"] = to_json(xd.cs_bound);
  checks["sublinear_shift"] = to_json(sublinear_shift_check(s, set.t_min));
  checks["max_principle"] = to_json(max_principle_check(s, c.u0.linf_u0));
  checks["conservation"] = to_json(conservation_check(s, c.u0.energy(), 1e-8, 1e-12));
  if (set.tail_tol > 0.0) checks["tail_mass"] = to_json(tail_mass_check(s, set.tail_tol));
  out["checks"] = checks;
  json enabled = json::array();
  for (const auto& [name, chk] : checks.items())
    if (set.enabled.empty() || std::find(set.enabled.begin(), set.enabled.end(), name) != set.enabled.end())
      enabled.push_back(name);
  out["enabled_checks"] = enabled;
  out["l1_rel_tol"] = set.l1_rel_tol;
  out["contraction"] = contraction.pass ? "pass" : "fail";

  const auto l2fit = fit_decay(s, set.t_min);
  out["decay"] = json{{"l2_dist", fit_json(l2fit)}, {"xdot", fit_json(xd.fit)}};
  out["decay"]["l2_dist"]["slope_ok"] = l2fit.slope <= -0.25 + 0.05;
  out["decay"]["xdot"]["slope_ok"] = xd.fit.slope <= -0.25 + 0.05;

  double tail = 0.0;
  for (const auto& r : s) tail = std::max(tail, r.tail_mass);
  out["margins"] = json{{"max_positive_residual", max_positive_residual(s)},
                        {"max_l1_over_C0", l1.max_l1_over_C0},
                        {"x_bound", c.x_bound()},
                        {"final_X", s.empty() ? 0.0 : s.back().X},
                        {"max_tail_mass", tail}};

  if (set.gn_constant > 0.0) {
    double worst = 0.0;
    for (const auto& r : s)
      if (r.t > 0.0) worst = std::max(worst, timedecay_ratio(r, c, set.gn_constant));
    out["timedecay"] = json{{"gn_constant", set.gn_constant}, {"max_ratio", worst}, {"empirical", true}};
  }
  return out;
}

std::vector<std::string> failed_checks(const json& summary) {
  std::vector<std::string> failed;
  if (!summary.contains("checks")) return failed;
  const auto& checks = summary["checks"];
  if (summary.contains("enabled_checks")) {
    for (const auto& name : summary["enabled_checks"])
      if (!checks.contains(name) || !checks[name.get<std::string>()].value("pass", false))
        failed.push_back(name.get<std::string>());
    return failed;
  }
  for (const auto& [name, c] : checks.items())
    if (!c.value("pass", false)) failed.push_back(name);
  return failed;
}

namespace {

const char* const kColumns[] = {"step",     "t",      "X",        "Xdot",     "l2_dist", "l2_dist_unshifted",
                                "l1_dist",  "l1_dist_unshifted", "grad_sq", "dissipation_residual",
                                "linf",     "mass",   "tail_mass"};

}  // namespace

DiagnosticsCsvWriter::DiagnosticsCsvWriter(const std::filesystem::path& path, double tol_residual)
    : path_(path), out_(path), tol_(tol_residual) {
  if (!out_) throw IoError("cannot write " + path.string());
  for (const char* c : kColumns) out_ << c << ',';
  out_ << "contraction_ok,residual_ok\n";
}

void DiagnosticsCsvWriter::append(const DiagRecord& r) {
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out_ << buf << ',';
  };
  out_ << r.step << ',';
  for (double v : {r.t, r.X, r.Xdot, r.l2_dist, r.l2_dist_unshifted, r.l1_dist, r.l1_dist_unshifted, r.grad_sq,
                   r.dissipation_residual, r.linf, r.mass, r.tail_mass})
    put(v);
  const bool contraction = !prev_ || r.l2_dist <= prev_->l2_dist + tol_ * (r.t - prev_->t);
  const bool residual = !prev_ || r.dissipation_residual <= tol_;
  out_ << (contraction ? 1 : 0) << ',' << (residual ? 1 : 0) << '\n';
  prev_ = r;
  if (!out_) throw IoError("write failed for " + path_.string());
}

void DiagnosticsCsvWriter::flush() {
  out_.flush();
  if (!out_) throw IoError("write failed for " + path_.string());
}

void write_diagnostics_csv(const std::filesystem::path& path, std::span<const DiagRecord> s, double tol) {
  DiagnosticsCsvWriter w(path, tol);
  for (const auto& r : s) w.append(r);
  w.flush();
}

std::vector<DiagRecord> read_diagnostics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  std::unordered_map<std::string, std::size_t> col;
  {
    std::stringstream ss(line);
    std::string name;
    for (std::size_t k = 0; std::getline(ss, name, ','); ++k) col[name] = k;
  }
  std::vector<std::size_t> idx;
  for (const char* c : kColumns) {
    auto it = col.find(c);
    if (it == col.end()) throw IoError(path.string() + " lacks column " + c);
    idx.push_back(it->second);
  }

  std::vector<DiagRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    double v[13];
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= cells.size()) throw IoError(path.string() + ":" + std::to_string(lineno) + ": short row");
      const char* b = cells[idx[k]].c_str();
      char* e = nullptr;
      v[k] = std::strtod(b, &e);
      if (e == b || *e != '\0')
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cells[idx[k]] + "'");
    }
    DiagRecord r;
    r.step = static_cast<std::int64_t>(v[0]);
    r.t = v[1];
    r.X = v[2];
    r.Xdot = v[3];
    r.l2_dist = v[4];
    r.l2_dist_unshifted = v[5];
    r.l1_dist = v[6];
    r.l1_dist_unshifted = v[7];
    r.grad_sq = v[8];
    r.dissipation_residual = v[9];
    r.linf = v[10];
    r.mass = v[11];
    r.tail_mass = v[12];
    for (std::size_t k = 1; k < 13; ++k)
      if (k != 9 && !std::isfinite(v[k]))
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": non-finite " + kColumns[k]);
    if (!out.empty() && !(r.t > out.back().t))
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": times not strictly increasing");
    out.push_back(r);
  }
  return out;
}

void write_plot_data(const std::filesystem::path& dir, std::span<const DiagRecord> s) {
  std::filesystem::create_directories(dir);
  std::ofstream a(dir / "l2_decay.csv"), b(dir / "loglog.csv"), c(dir / "shift.csv");
  if (!a || !b || !c) throw IoError("cannot write plot data under " + dir.string());
  a << "t,l2_dist,l2_dist_unshifted\n" << std::setprecision(17);
  b << "log_t,log_l2_dist,log_abs_xdot\n" << std::setprecision(17);
  c << "t,X,Xdot\n" << std::setprecision(17);
  for (const auto& r : s) {
    a << r.t << ',' << r.l2_dist << ',' << r.l2_dist_unshifted << '\n';
    c << r.t << ',' << r.X << ',' << r.Xdot << '\n';
    if (r.t > 0.0 && r.l2_dist > 0.0 && r.Xdot != 0.0)
      b << std::log(r.t) << ',' << std::log(r.l2_dist) << ',' << std::log(std::abs(r.Xdot)) << '\n';
  }
}

}  // namespace shocklab
