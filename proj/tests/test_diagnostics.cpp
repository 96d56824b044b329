#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "shocklab/diagnostics.hpp"
#include "shocklab/error.hpp"
#include "shocklab/initial_data.hpp"

using namespace shocklab;

namespace {

std::vector<DiagRecord> power_series(double p, double c = 1.0) {
  std::vector<DiagRecord> s;
  for (int k = 0; k <= 400; ++k) {
    DiagRecord r;
    r.step = k;
    r.t = 0.25 * k;
    r.l2_dist = c * std::pow(1.0 + r.t, p);
    r.Xdot = 0.1 * std::pow(1.0 + r.t, p);
    s.push_back(r);
  }
  return s;
}

std::filesystem::path scratch(const char* name) {
  auto d = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("alpha for the Burgers fixture") {
  // min{2 - 1, 2 (1 - 1/(64 pi^2))} = 1
  CHECK(compute_alpha(FluxSpec::burgers(0.5), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // second branch wins once eps > sqrt(32) pi: a = 1/2, eps = 20 -> 2 (1 - 400/(64 pi^2))
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(compute_alpha(FluxSpec::burgers(0.5), 20.0) == doctest::Approx(2.0 * (1.0 - 400.0 / (64.0 * pi2))));
  auto s = FluxSpec::sine_perturbed(0.5, 0.1);
  CHECK(compute_alpha(s, 1.0) == doctest::Approx(2.0 - 1.1 / 0.9));
  s.g2_bound = 1.0;
  CHECK_THROWS_AS(compute_alpha(s, 1.0), DomainError);
}

TEST_CASE("alpha is positive exactly on admissible data") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> A(0.05, 2.0), G(0.0, 1.0), E(0.01, 40.0);
  int both = 0;
  for (int k = 0; k < 2000; ++k) {
    FluxSpec f = FluxSpec::burgers(A(rng));
    f.g2_bound = G(rng) * 1.9 * f.a;
    const double eps = E(rng);
    const auto rep = check_admissibility(f, ShockData::make(f, eps, 0.0));
    const double alpha = compute_alpha(f, eps);
    CHECK((alpha > 0.0) == (rep.flux_hyp && rep.strength_hyp));
    both += alpha > 0.0;
  }
  CHECK(both > 100);
  CHECK(both < 1900);
}

TEST_CASE("measure on exact data") {
  const auto f = FluxSpec::burgers(0.5);
  const auto p = solve_profile(f, ShockData::make(f, 1.0, 0.0));
  Grid g(40.0, 801, 2, 8);
  SimState s{profile_field(g, p), 0.0, 0.0, 0.0, 0};
  auto r = measure(s, p);
  // only the clamped end nodes differ, by |u~(+-L) - u+-| ~ 2e-9
  CHECK(r.l2_dist < 1e-9);
  CHECK(r.l1_dist < 1e-9);
  CHECK(r.grad_sq < 1e-14);
  CHECK(r.linf == doctest::Approx(1.0));
  CHECK(std::abs(r.Xdot) < 1e-14);

  // Shifted profile: the L1 distance to u~ equals eps * |s| (up to the clamped ends).
  s.u = profile_field(g, p, 1.5);
  r = measure(s, p);
  CHECK(r.l1_dist == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(r.mass == doctest::Approx(1.5).epsilon(1e-8));
  s.X = 1.5;
  r = measure(s, p);
  CHECK(r.l2_dist < 1e-8);
  CHECK(r.l2_dist_unshifted > 0.4);
}

TEST_CASE("dissipation residual formula") {
  DiagRecord a, b;
  a.t = 1.0;
  a.l2_dist = 0.5;
  a.grad_sq = 0.2;
  b.t = 1.5;
  b.l2_dist = 0.4;
  b.grad_sq = 0.1;
  CHECK(dissipation_residual(a, b, 1.0) == doctest::Approx((0.16 - 0.25) / 0.5 + 0.15));
  CHECK(dissipation_residual(a, b, 0.0) == doctest::Approx(-0.18));
}

TEST_CASE("constants and their json round trip") {
  const auto f = FluxSpec::burgers(0.5);
  const auto p = solve_profile(f, ShockData::make(f, 1.0, 0.0));
  Grid g(40.0, 801, 2, 8);
  InitialData d;
  const Field u0 = generate_initial(d, g, p, 10.0);
  const auto c = make_constants(p, u0);
  CHECK(c.alpha == doctest::Approx(1.0));
  CHECK(c.profile_deriv_l2 == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-8));
  CHECK(c.C0 == doctest::Approx(1.0 + c.u0.energy() + c.u0.l1));
  CHECK(c.C0 == doctest::Approx(compute_C0(u0, p)));
  CHECK(c.x_bound() == doctest::Approx((c.u0.energy() + 4.0 * c.u0.l1) / c.beta + 1.0));
  CHECK(c.xdot_factor() == doctest::Approx(0.5 / std::sqrt(12.0)).epsilon(1e-8));
  // constant-in-x' bump of width 4 and height 1 on [-2, 2]: the L1 norm is 4 * int_0^1 exp(1 - 1/(1-r^2)) dr-ish
  CHECK(c.u0.l1 > 0.0);
  const auto back = constants_from_json(to_json(c));
  CHECK(back.C0 == c.C0);
  CHECK(back.beta == c.beta);
  CHECK(back.u0.l1 == c.u0.l1);
  CHECK(back.x_bound() == c.x_bound());
  CHECK_THROWS_AS(constants_from_json(nlohmann::json{{"a", 1.0}}), IoError);
}

TEST_CASE("default residual tolerance") {
  // h is the largest active spacing: 0.1 in xi here, 1/4 across for n_t = 4
  Grid g(40.0, 801, 2, 16);
  CHECK(default_tol_residual(g, 1e-3, 0.5) == doctest::Approx(10.0 * (0.01 + 1e-6) * 0.5));
  Grid g4(40.0, 801, 2, 4);
  CHECK(default_tol_residual(g4, 1e-3, 0.5) == doctest::Approx(10.0 * (0.0625 + 1e-6) * 0.5));
  Grid g1(40.0, 801, 2, 1);
  CHECK(default_tol_residual(g1, 1e-3, 0.5) == doctest::Approx(10.0 * (0.01 + 1e-6) * 0.5));
  CHECK(default_tol_residual(g1, 1e-3, 0.0) > 0.0);
}

TEST_CASE("decay fits recover synthetic slopes") {
  for (double p : {-0.25, -0.5}) {
    std::vector<double> t, v;
    for (int k = 0; k < 200; ++k) {
      t.push_back(0.5 * (k + 1));
      v.push_back(3.0 * std::pow(t.back(), p));
    }
    const auto fit = fit_decay(t, v, 1.0);
    CHECK(fit.slope == doctest::Approx(p).epsilon(1e-6));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(fit.conclusive);
    CHECK(fit.envelope_ok);
    CHECK(fit.max_envelope_ratio == doctest::Approx(1.0).epsilon(1e-9));
  }
  // t^{-1/8} decays too slowly for the t^{-1/4} envelope
  std::vector<double> t, v;
  for (int k = 1; k <= 100; ++k) {
    t.push_back(k);
    v.push_back(std::pow(k, -0.125));
  }
  CHECK_FALSE(fit_decay(t, v, 1.0).envelope_ok);
  // a short window is flagged
  const auto short_fit = fit_decay(std::vector<double>{1, 2, 3}, std::vector<double>{1, 0.8, 0.7}, 1.0);
  CHECK_FALSE(short_fit.conclusive);
  CHECK_FALSE(short_fit.note.empty());
  // samples below the noise floor are left out of the fit
  std::vector<double> tz{1, 2, 4, 8, 16, 32}, vz{1, 0.5, 0.25, 0.125, 1e-20, 1e-20};
  const auto fz = fit_decay(tz, vz, 1.0, 1e-12);
  CHECK(fz.points == 4);
  CHECK(fz.slope == doctest::Approx(-1.0));
  CHECK_THROWS_AS(fit_decay(std::vector<double>{1, 2}, std::vector<double>{1}, 1.0), DomainError);
}

TEST_CASE("sublinear shift check") {
  // X = t^{3/4}, X' = (3/4) t^{-1/4}: consistent, passes
  std::vector<DiagRecord> ok, bad;
  for (int k = 0; k <= 200; ++k) {
    DiagRecord r;
    r.t = 0.5 * k;
    r.X = std::pow(r.t, 0.75);
    r.Xdot = r.t > 0 ? 0.75 * std::pow(r.t, -0.25) : 0.0;
    ok.push_back(r);
    r.X = r.t;  // grows linearly while the recorded X' says t^{-1/4}
    bad.push_back(r);
  }
  CHECK(sublinear_shift_check(ok, 1.0).pass);
  const auto b = sublinear_shift_check(bad, 1.0);
  CHECK_FALSE(b.pass);
  CHECK(b.margin < 0.0);
}

TEST_CASE("contraction, dissipation, max principle and conservation checks") {
  auto dec = power_series(-0.5);
  CHECK(contraction_check(dec, 0.0).pass);
  auto inc = power_series(0.1);
  const auto c = contraction_check(inc, 1e-6);
  CHECK_FALSE(c.pass);
  CHECK(c.margin < 0.0);

  std::vector<DiagRecord> s(3);
  for (int k = 0; k < 3; ++k) s[k].t = k;
  s[0].dissipation_residual = std::nan("");
  s[1].dissipation_residual = -0.3;
  s[2].dissipation_residual = 0.02;
  CHECK(max_positive_residual(s) == doctest::Approx(0.02));
  CHECK(dissipation_check(s, 0.03).pass);
  CHECK_FALSE(dissipation_check(s, 0.01).pass);

  s[0].linf = 1.5;
  s[1].linf = 1.2;
  s[2].linf = 1.5 + 5e-11;
  CHECK(max_principle_check(s, 1.5).pass);
  s[2].linf = 1.5 + 2e-10;
  CHECK_FALSE(max_principle_check(s, 1.5).pass);

  s[0].mass = 0.7;
  s[1].mass = 0.7 + 1e-9;
  s[2].mass = 0.7 - 3e-9;
  CHECK(conservation_check(s, 0.5).pass);
  CHECK_FALSE(conservation_check(s, 0.1).pass);
  s[0].tail_mass = 1e-7;
  CHECK(tail_mass_check(s, 1e-6).pass);
  CHECK_FALSE(tail_mass_check(s, 1e-8).pass);
}

TEST_CASE("shift derivative bound") {
  Constants c;
  c.a = 0.5;
  c.eps = 1.0;
  c.profile_deriv_l2 = 1.0 / std::sqrt(12.0);
  std::vector<DiagRecord> s(2);
  s[0].l2_dist = 0.4;
  s[0].Xdot = c.xdot_factor() * 0.4;  // equality
  s[1].t = 1.0;
  s[1].l2_dist = 0.3;
  s[1].Xdot = -0.01;
  CHECK(xdot_decay_check(s, c, 0.5).cs_bound.pass);
  s[1].Xdot = -c.xdot_factor() * 0.3 * (1.0 + 1e-9);
  CHECK_FALSE(xdot_decay_check(s, c, 0.5).cs_bound.pass);
}

TEST_CASE("time-decay ratio") {
  Constants c;
  c.alpha = 1.0;
  c.C0 = 2.0;
  c.n_dims = 2;
  c.u0.l2 = 0.5;
  DiagRecord r;
  r.t = 16.0;
  r.l2_dist = 0.1;
  const double k = 0.4 * 2.0 * std::pow(2.0, 1.5);
  const double expected = 0.1 * (std::pow(2.0, 0.25) * 2.0 * 0.5 + k) / (2.0 * k * 0.5);
  CHECK(timedecay_ratio(r, c, 0.4) == doctest::Approx(expected));
}

TEST_CASE("diagnostics csv round trip") {
  const auto dir = scratch("shocklab_csv_test");
  auto s = power_series(-0.3);
  s[0].dissipation_residual = std::nan("");
  s[3].X = 1.0 / 3.0;
  s[4].mass = -1e-300;
  write_diagnostics_csv(dir / "d.csv", s, 1e-3);
  const auto back = read_diagnostics_csv(dir / "d.csv");
  REQUIRE(back.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(back[k].t == s[k].t);
    CHECK(back[k].X == s[k].X);
    CHECK(back[k].l2_dist == s[k].l2_dist);
    CHECK(back[k].mass == s[k].mass);
    CHECK(back[k].step == s[k].step);
  }
  CHECK(std::isnan(back[0].dissipation_residual));

  std::ofstream(dir / "bad.csv") << "step,t\n0,0\n";
  CHECK_THROWS_AS(read_diagnostics_csv(dir / "bad.csv"), IoError);
  {
    std::ifstream in(dir / "d.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::ofstream out(dir / "garbled.csv");
    out << header << '\n' << row << '\n' << "1,zz" << row.substr(row.find(',', 2)) << '\n';
  }
  CHECK_THROWS_AS(read_diagnostics_csv(dir / "garbled.csv"), IoError);
  CHECK_THROWS_AS(read_diagnostics_csv(dir / "missing.csv"), IoError);

  write_plot_data(dir / "plot", s);
  CHECK(std::filesystem::exists(dir / "plot" / "loglog.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary is a pure function of its inputs") {
  auto s = power_series(-0.5);
  for (auto& r : s) r.dissipation_residual = -1.0;
  s[0].dissipation_residual = std::nan("");
  Constants c;
  c.a = 0.5;
  c.eps = 1.0;
  c.beta = 0.165;
  c.profile_deriv_l2 = 1.0 / std::sqrt(12.0);
  c.u0.l2 = 1.0;
  c.u0.l1 = 1.0;
  c.u0.linf_u0 = 2.0;
  SummarySettings set;
  set.tol_residual = 1e-3;
  const auto a = build_summary(s, c, set), b = build_summary(s, c, set);
  CHECK(a.dump() == b.dump());
  CHECK(a["contraction"] == "pass");
  CHECK(a["decay"]["l2_dist"]["slope"].get<double>() < -0.3);
  set.enabled = {"contraction"};
  const auto only = build_summary(s, c, set);
  CHECK(only["enabled_checks"].size() == 1);
  set.aborted = true;
  set.abort_message = "boom";
  CHECK(build_summary(s, c, set)["aborted"] == true);
}
