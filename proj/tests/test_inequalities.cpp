#include <cmath>
#include <limits>
#include <numbers>

#include <doctest.h>

#include "shocklab/error.hpp"
#include "shocklab/inequalities.hpp"
#include "shocklab/initial_data.hpp"

using namespace shocklab;

TEST_CASE("weighted Poincare closed-form fixtures") {
  // f = z: both sides are 1/12
  auto aff = poincare_weighted_check(SampledFunction1D::gauss_legendre([](double z) { return 3.0 * z - 1.0; },
                                                                       [](double) { return 3.0; }));
  CHECK(aff.lhs == doctest::Approx(9.0 / 12.0).epsilon(1e-12));
  CHECK(aff.rhs == doctest::Approx(9.0 / 12.0).epsilon(1e-12));
  // f = z^2: lhs = 1/5 - 1/9 = 4/45, rhs = 2 int z^3 (1 - z) = 1/10
  auto sq = poincare_weighted_check(SampledFunction1D::gauss_legendre([](double z) { return z * z; },
                                                                      [](double z) { return 2.0 * z; }));
  CHECK(sq.lhs == doctest::Approx(4.0 / 45.0).epsilon(1e-12));
  CHECK(sq.rhs == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(sq.holds());
  // constants: both sides vanish
  auto c = poincare_weighted_check(SampledFunction1D::gauss_legendre([](double) { return 2.0; },
                                                                     [](double) { return 0.0; }));
  CHECK(std::abs(c.lhs) < 1e-24);
  CHECK(c.rhs == 0.0);
  CHECK(c.holds());
}

TEST_CASE("sampled functions") {
  std::vector<double> z, v;
  for (int k = 0; k <= 2000; ++k) {
    z.push_back(k / 2000.0);
    v.push_back(std::sin(3.0 * z.back()));
  }
  const auto f = SampledFunction1D::from_samples(z, v);
  CHECK_NOTHROW(f.validate());
  const auto g = SampledFunction1D::gauss_legendre([](double x) { return std::sin(3.0 * x); },
                                                   [](double x) { return 3.0 * std::cos(3.0 * x); });
  const auto a = poincare_weighted_check(f), b = poincare_weighted_check(g);
  CHECK(a.lhs == doctest::Approx(b.lhs).epsilon(1e-5));
  CHECK(a.rhs == doctest::Approx(b.rhs).epsilon(1e-5));

  v[7] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SampledFunction1D::from_samples(z, v).validate(), DomainError);
  std::swap(z[3], z[4]);
  v[7] = 0.0;
  CHECK_THROWS_AS(SampledFunction1D::from_samples(z, v).validate(), DomainError);
}

TEST_CASE("Gaussian slab norms") {
  // f = exp(-xi^2 / (2 s^2)) constant across: ||f||_1 = s sqrt(2 pi), ||f||_2^2 = s sqrt(pi),
  // ||grad f||^2 = sqrt(pi) / (2 s)
  const double s = 1.7, rpi = std::sqrt(std::numbers::pi);
  Grid g(40.0, 4001, 2, 8);
  Field f = Field::sample(g, [s](double xi, std::span<const double>) { return std::exp(-xi * xi / (2 * s * s)); });
  const auto r = gn_slab_check(f);
  CHECK(r.l1 == doctest::Approx(s * std::sqrt(2 * std::numbers::pi)).epsilon(1e-10));
  CHECK(r.lhs * r.lhs == doctest::Approx(s * rpi).epsilon(1e-10));
  CHECK(r.grad_l2 * r.grad_l2 == doctest::Approx(rpi / (2 * s)).epsilon(1e-4));
  REQUIRE(r.theta.size() == 2);
  CHECK(r.theta[0] == doctest::Approx(1.0 / 3.0));
  CHECK(r.theta[1] == doctest::Approx(0.5));
  CHECK(r.rhs == doctest::Approx(r.theta_terms[0] + r.theta_terms[1]));
  CHECK(gn_slab_check(Field(g, 0.0)).zero);
}

TEST_CASE("GN ratio is invariant under amplitude scaling") {
  const auto corpus = gn_corpus(2);
  REQUIRE(corpus.size() >= 12);
  for (const auto& fx : corpus) {
    const double r1 = gn_slab_check(fx.field).ratio();
    const double r3 = gn_slab_check(3.0 * fx.field).ratio();
    CHECK(r1 == doctest::Approx(r3).epsilon(1e-12));
    CHECK(r1 > 0.0);
  }
  const auto est = estimate_gn_constant(corpus);
  CHECK(est.constant > 0.0);
  CHECK(est.constant <= 1.0);
  CHECK_FALSE(est.argmax.empty());
}

TEST_CASE("dz/dxi sandwich") {
  const auto b = FluxSpec::burgers(0.5);
  const auto pb = solve_profile(b, ShockData::make(b, 1.0, 0.0));
  const auto rb = dzdxi_sandwich_check(pb, b);
  CHECK(rb.pass);
  CHECK(rb.max_identity_error < 1e-10);

  const auto s = FluxSpec::sine_perturbed(0.5, 0.2, 1.5);
  const auto ps = solve_profile(s, ShockData::make(s, 1.0, -0.5));
  const auto rs = dzdxi_sandwich_check(ps, s);
  CHECK(rs.pass);
  CHECK_FALSE(rs.degenerate);
  CHECK(rs.min_lower_margin >= -1e-12);
  CHECK(rs.min_upper_margin >= -1e-12);
}

TEST_CASE("paired runs contract in L1") {
  const auto f = FluxSpec::burgers(0.5);
  const auto p = solve_profile(f, ShockData::make(f, 1.0, 0.0));
  Grid g(30.0, 601, 2, 8);
  InitialData d;
  d.width_t = 0.5;
  RunSetup a;
  a.profile = &p;
  a.u0 = generate_initial(d, g, p, 2.0);
  a.t_final = 2.0;
  a.diag_every = 20;
  RunSetup bs = a;
  d.family = InitialFamily::ShiftedProfile;
  d.shift = 0.7;
  bs.u0 = generate_initial(d, g, p, 2.0);
  const auto tr = run_paired(a, bs);
  CHECK(tr.t.size() == tr.l1_diff.size());
  CHECK(tr.t.back() == doctest::Approx(2.0));
  CHECK(l1_contraction_paired_check(tr, 1e-6).pass);

  RunSetup other = bs;
  other.t_final = 3.0;
  CHECK_THROWS_AS(run_paired(a, other), DomainError);

  // a growing series fails
  PairedTrajectory grow{{0.0, 1.0}, {1.0, 1.1}, 0.1};
  CHECK_FALSE(l1_contraction_paired_check(grow, 1e-6).pass);
}

TEST_CASE("lemma suite") {
  const auto rep = run_lemma_suite();
  CHECK(rep.pass());
  CHECK(rep.failures().empty());
  std::size_t trig = 0;
  for (const auto& e : rep.entries) trig += e.fixture.rfind("trig", 0) == 0;
  CHECK(trig == 1000);
  const auto j = rep.to_json();
  CHECK(j["pass"] == true);

  LemmaSuiteOptions broken;
  broken.inject_broken = true;
  broken.trig_cases = 10;
  const auto bad = run_lemma_suite(broken);
  CHECK_FALSE(bad.pass());
  REQUIRE(bad.failures().size() == 1);

  LemmaSuiteOptions empty;
  empty.empty_corpus = true;
  CHECK_THROWS_AS(run_lemma_suite(empty), ConfigError);
}
