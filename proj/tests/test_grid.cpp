#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "shocklab/error.hpp"
#include "shocklab/field_io.hpp"
#include "shocklab/grid.hpp"
#include "shocklab/initial_data.hpp"
#include "shocklab/profile.hpp"

using namespace shocklab;

namespace {
constexpr double kPi = std::numbers::pi;

double max_interior(const Field& f, std::size_t skip) {
  const auto& g = f.grid();
  double m = 0.0;
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t i = skip; i + skip < static_cast<std::size_t>(g.n_xi()); ++i) m = std::max(m, std::abs(f(i, r)));
  return m;
}
}  // namespace

TEST_CASE("grid geometry") {
  Grid g(10.0, 101, 3, 8);
  CHECK(g.rows() == 64);
  CHECK(g.size() == 101 * 64);
  CHECK(g.h_xi() == doctest::Approx(0.2));
  CHECK(g.xi(0) == -10.0);
  CHECK(g.xi(100) == doctest::Approx(10.0));
  CHECK(g.torus_weight() == doctest::Approx(1.0 / 64));
  const std::size_t row = 3 + 8 * 5;
  CHECK(g.torus_index(row, 0) == 3);
  CHECK(g.torus_index(row, 1) == 5);
  CHECK(g.torus_coord(row, 1) == doctest::Approx(5.0 / 8));
  CHECK(g.torus_index(g.torus_neighbor(row, 0, -4), 0) == 7);
  CHECK(g.torus_index(g.torus_neighbor(row, 1, 3), 1) == 0);
  CHECK_THROWS_AS(Grid(0.0, 11), DomainError);
  CHECK_THROWS_AS(Grid(1.0, 3), DomainError);
  CHECK_THROWS_AS(Grid(1.0, 11, 1), DomainError);
}

TEST_CASE("fields reject non-finite values") {
  Grid g(1.0, 11, 2, 2);
  CHECK_THROWS_AS(Field(g, std::numeric_limits<double>::quiet_NaN()), DomainError);
  std::vector<double> v(g.size(), 1.0);
  v[5] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Field(g, v), DomainError);
  CHECK_THROWS_AS(Field(g, std::vector<double>(3, 0.0)), DomainError);
  Field a(g, 1.0), b(Grid(1.0, 13, 2, 2), 1.0);
  CHECK_THROWS_AS(a -= b, DomainError);
}

TEST_CASE("quadrature") {
  Grid g(2.0, 41, 2, 16);
  CHECK(integrate(Field(g, 3.0)) == doctest::Approx(12.0).epsilon(1e-14));
  // exact torus rule for trigonometric polynomials of low degree
  Field f = Field::sample(g, [](double, std::span<const double> x) { return std::sin(2 * kPi * x[0]) + 1.0; });
  CHECK(integrate(f) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(integrate_abs_pow(Field(g, -2.0), 2.0) == doctest::Approx(16.0).epsilon(1e-14));
  CHECK_THROWS_AS(integrate(Grid(2.0, 43, 2, 16), f), DomainError);
}

TEST_CASE("gradient energy") {
  // f = sin(2 pi x') on [-L, L]: |grad f|^2 integrates to 2L * (2 pi)^2 / 2
  Grid g(1.0, 21, 2, 64);
  Field f = Field::sample(g, [](double, std::span<const double> x) { return std::sin(2 * kPi * x[0]); });
  const double exact = 2.0 * 4 * kPi * kPi / 2;
  CHECK(gradient_sq_integral(f) == doctest::Approx(exact).epsilon(2e-2));
  // xi-linear field: exact for every stencil in use
  Field lin = Field::sample(g, [](double xi, std::span<const double>) { return 3.0 * xi; });
  CHECK(gradient_sq_integral(lin) == doctest::Approx(9.0 * 2.0).epsilon(1e-12));
}

TEST_CASE("laplacian accuracy") {
  auto err = [](int n, SpatialOrder o) {
    Grid g(1.0, n, 2, 1);
    Field f = Field::sample(g, [](double xi, std::span<const double>) { return std::sin(2.0 * xi); });
    Field lap = laplacian(f, o);
    Field exact = Field::sample(g, [](double xi, std::span<const double>) { return -4.0 * std::sin(2.0 * xi); });
    // keep away from the ghost-value rows
    return max_interior(lap - exact, 3);
  };
  const double r2 = err(41, SpatialOrder::Second) / err(81, SpatialOrder::Second);
  const double r4 = err(41, SpatialOrder::Fourth) / err(81, SpatialOrder::Fourth);
  CHECK(r2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(r4 == doctest::Approx(16.0).epsilon(0.15));

  // quadratics are reproduced exactly inside
  Grid g(1.0, 21, 2, 8);
  Field q = Field::sample(g, [](double xi, std::span<const double> x) { return xi * xi + x[0]; });
  Field lap = laplacian(q, SpatialOrder::Fourth);
  CHECK(lap(10, 3) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("divergence is conservative") {
  // Telescoping: the weighted sum of div over interior nodes only sees the end interfaces.
  const auto flux = FluxSpec::burgers(0.5);
  Grid g(5.0, 101, 2, 8);
  Field u = Field::sample(g, [](double xi, std::span<const double> x) {
    return 0.5 - 0.5 * std::tanh(xi) + 0.2 * std::exp(-xi * xi) * std::cos(2 * kPi * x[0]);
  });
  for (auto o : {SpatialOrder::Second, SpatialOrder::Fourth}) {
    Field d = divergence_flux(flux, u, 0.5, o);
    double s = 0.0;
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (int i = 1; i + 1 < g.n_xi(); ++i) s += d(i, r) * g.h_xi() * g.torus_weight();
    // h(u) = a u^2 - sigma u equals 0 at u = 0 and u = 1 (sigma = 0.5), so the total is ~0
    CHECK(std::abs(s) < 1e-6);
  }
}

TEST_CASE("steady profile residual converges at fourth order") {
  const auto flux = FluxSpec::burgers(0.5);
  const auto shock = ShockData::make(flux, 1.0, 0.0);
  const auto prof = solve_profile(flux, shock);
  auto resid = [&](int n, SpatialOrder o) {
    Grid g(20.0, n, 2, 1);
    Field u = profile_field(g, prof);
    SpatialOperator op(g, flux, shock.sigma, o, {1.0, 0.0});
    Field out(g);
    op.apply(u.values(), out.values());
    return max_interior(out, 4);
  };
  CHECK(resid(201, SpatialOrder::Fourth) / resid(401, SpatialOrder::Fourth) > 12.0);
  CHECK(resid(201, SpatialOrder::Second) / resid(401, SpatialOrder::Second) > 3.5);
  CHECK(resid(801, SpatialOrder::Fourth) < 1e-7);
}

TEST_CASE("spatial operator leaves the ends fixed and commutes with torus translation") {
  const auto flux = FluxSpec::burgers(0.5);
  Grid g(4.0, 41, 2, 8);
  Field u = Field::sample(g, [](double xi, std::span<const double> x) {
    return 0.5 - 0.5 * std::tanh(xi) + 0.3 * std::exp(-xi * xi) * std::sin(2 * kPi * x[0]);
  });
  SpatialOperator op(g, flux, 0.5, SpatialOrder::Fourth, {u(0, 0), u(40, 0)});
  Field out(g);
  op.apply(u.values(), out.values());
  for (std::size_t r = 0; r < g.rows(); ++r) {
    CHECK(out(0, r) == 0.0);
    CHECK(out(40, r) == 0.0);
  }
  Field v(g), out_v(g);
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (int i = 0; i < 41; ++i) v(i, g.torus_neighbor(r, 0, 2)) = u(i, r);
  op.apply(v.values(), out_v.values());
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (int i = 0; i < 41; ++i) CHECK(out_v(i, g.torus_neighbor(r, 0, 2)) == doctest::Approx(out(i, r)).epsilon(1e-13));
}

TEST_CASE("snapshot round trip") {
  Grid g(3.0, 17, 3, 6);
  Field f = Field::sample(g, [](double xi, std::span<const double> x) { return xi + 10 * x[0] - x[1]; });
  const auto dir = std::filesystem::temp_directory_path() / "shocklab_snap_test";
  std::filesystem::create_directories(dir);
  write_snapshot(f, dir / "s", {{"t", 1.5}});
  const auto s = read_snapshot(dir / "s");
  CHECK(s.field.grid() == g);
  CHECK(s.field.data() == f.data());
  CHECK(s.meta["t"].get<double>() == 1.5);
  CHECK(grid_from_metadata(grid_metadata(g)) == g);
  std::filesystem::resize_file(dir / "s.bin", 8);
  CHECK_THROWS_AS(read_snapshot(dir / "s"), IoError);
  std::filesystem::remove_all(dir);
}
