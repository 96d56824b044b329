#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "shocklab/error.hpp"
#include "shocklab/profile.hpp"

using namespace shocklab;

namespace {

ShockProfile burgers_profile(bool numeric = false) {
  const auto f = FluxSpec::burgers(0.5);
  ProfileOptions o;
  o.force_numeric = numeric;
  return solve_profile(f, ShockData::make(f, 1.0, 0.0), o);
}

// Composite Simpson on [lo, hi] with n (even) intervals.
template <class F>
double simpson(F&& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double acc = f(lo) + f(hi);
  for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("closed form profile") {
  const auto p = burgers_profile();
  CHECK(p.closed_form());
  CHECK(p.value(0.0) == doctest::Approx(0.5));
  CHECK(p.value(-200.0) == doctest::Approx(1.0));
  CHECK(p.value(200.0) == doctest::Approx(0.0));
  // u~ = 1/2 - tanh(xi/4)/2, so u~' = -(1/8) sech^2(xi/4) for a = 1/2, eps = 1
  for (double xi : {-7.0, -1.0, 0.0, 2.5, 9.0}) {
    const double c = std::cosh(0.25 * xi);
    CHECK(p.derivative(xi) == doctest::Approx(-0.125 / (c * c)).epsilon(1e-14));
    CHECK(p.ode_residual(xi) < 1e-15);
  }
}

TEST_CASE("derivative L2 norm is 12^{-1/2}") {
  // int (1/64) sech^4(xi/4) dxi = (1/64) * 4 * 4/3 = 1/12
  CHECK(profile_l2_of_derivative(burgers_profile()) == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-8));
  CHECK(profile_l2_of_derivative(burgers_profile(true)) == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-7));
}

TEST_CASE("numeric integration matches the closed form") {
  const auto exact = burgers_profile();
  const auto num = burgers_profile(true);
  CHECK_FALSE(num.closed_form());
  double worst = 0.0, worst_d = 0.0;
  for (double xi = -50.0; xi <= 50.0; xi += 0.137) {
    worst = std::max(worst, std::abs(num.value(xi) - exact.value(xi)));
    worst_d = std::max(worst_d, std::abs(num.derivative(xi) - exact.derivative(xi)));
  }
  CHECK(worst < 1e-9);
  CHECK(worst_d < 1e-8);
}

TEST_CASE("perturbed profile solves its ODE and is monotone") {
  const auto f = FluxSpec::sine_perturbed(0.5, 0.1, 1.0);
  const auto sh = ShockData::make(f, 1.0, 0.0);
  const auto p = solve_profile(f, sh);
  CHECK_FALSE(p.closed_form());
  CHECK(p.value(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  double prev = p.value(-p.half_width());
  double worst = 0.0;
  for (double xi = -p.half_width(); xi <= p.half_width(); xi += 0.05) {
    const double v = p.value(xi);
    CHECK(v <= prev + 1e-15);
    prev = v;
    worst = std::max(worst, p.ode_residual(xi));
  }
  CHECK(worst < 1e-7);
  CHECK(p.value(p.half_width() + 5.0) == 0.0);
  CHECK(p.value(-p.half_width() - 5.0) == 1.0);
}

TEST_CASE("beta constants against direct double quadrature") {
  const auto p = burgers_profile();
  const auto b = beta_constants(p);
  // Inner integral of u~' by Simpson instead of the exact difference.
  auto beta = [&](int side) {
    auto outer = [&](double x) {
      const double lo = side < 0 ? x - 1.0 : x, hi = side < 0 ? x : x + 1.0;
      return p.derivative(x) * simpson([&](double z) { return p.derivative(z); }, lo, hi, 40);
    };
    return 2.0 * simpson(outer, -60.0, 60.0, 4000);
  };
  CHECK(b.beta1 == doctest::Approx(beta(-1)).epsilon(1e-7));
  CHECK(b.beta2 == doctest::Approx(beta(+1)).epsilon(1e-7));
  CHECK(b.beta() > 0.0);
  // the profile is odd about its midpoint, so both sides agree
  CHECK(b.beta1 == doctest::Approx(b.beta2).epsilon(1e-10));
}

TEST_CASE("profile errors") {
  const auto f = FluxSpec::burgers(0.5);
  CHECK_THROWS_AS(solve_profile(f, ShockData::make(f, 0.0, 1.0)), AdmissibilityError);
  ProfileOptions o;
  o.half_width = 5.0;
  CHECK_THROWS_AS(solve_profile(f, ShockData::make(f, 1.0, 0.0), o), DomainError);
  o.force_numeric = true;
  CHECK_THROWS_AS(solve_profile(f, ShockData::make(f, 1.0, 0.0), o), DomainError);
}

TEST_CASE("profile tables") {
  const auto p = burgers_profile();
  const auto dir = std::filesystem::temp_directory_path() / "shocklab_profile_test";
  std::filesystem::create_directories(dir);
  write_profile_csv(p, dir / "prof");
  std::ifstream in(dir / "prof_value.csv");
  std::string line;
  std::size_t n = 0;
  std::getline(in, line);
  CHECK(line == "xi,u");
  while (std::getline(in, line)) ++n;
  CHECK(n == p.nodes().size());
  std::filesystem::remove_all(dir);
}
