#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "shocklab/flux.hpp"

namespace shocklab {

/// Threads used by the stencil sweeps (no-op without OpenMP; n <= 0 keeps the default).
void set_thread_count(int n);
int thread_count();

/// Truncated slab [-L, L] x T^{n-1}, torus period 1 in every transverse direction.
///
/// Storage is row-major with xi fastest: node (i, row) lives at i + n_xi * row, where
/// row enumerates the torus multi-index (c_0 + n_t c_1 + ...).
class Grid {
 public:
  Grid() = default;
  Grid(double half_width, int n_xi, int n_dims = 2, int n_t = 16);

  double half_width() const { return L_; }
  int n_xi() const { return n_xi_; }
  int n_dims() const { return n_dims_; }
  int n_t() const { return n_t_; }
  int torus_dirs() const { return n_dims_ - 1; }
  std::size_t rows() const { return rows_; }
  std::size_t size() const { return static_cast<std::size_t>(n_xi_) * rows_; }

  double h_xi() const { return h_xi_; }
  double h_t() const { return 1.0 / n_t_; }
  double xi(std::size_t i) const { return -L_ + static_cast<double>(i) * h_xi_; }
  /// Coordinate of `row` along torus direction `dir`, in [0, 1).
  double torus_coord(std::size_t row, int dir) const;
  std::size_t torus_index(std::size_t row, int dir) const;
  /// Row reached from `row` by moving `offset` nodes (periodically) along torus direction `dir`.
  std::size_t torus_neighbor(std::size_t row, int dir, int offset) const;

  /// Trapezoid weight in xi (without the torus factor).
  double xi_weight(std::size_t i) const {
    return (i == 0 || i + 1 == static_cast<std::size_t>(n_xi_)) ? 0.5 * h_xi_ : h_xi_;
  }
  /// Uniform torus cell volume h_t^{n-1}.
  double torus_weight() const { return torus_weight_; }

  bool operator==(const Grid& o) const {
    return L_ == o.L_ && n_xi_ == o.n_xi_ && n_dims_ == o.n_dims_ && n_t_ == o.n_t_;
  }

 private:
  double L_ = 1.0;
  int n_xi_ = 2;
  int n_dims_ = 2;
  int n_t_ = 1;
  std::size_t rows_ = 1;
  double h_xi_ = 1.0;
  double torus_weight_ = 1.0;
  std::vector<std::size_t> pow_;  // n_t^d
};

/// Real values on every node of a Grid. Non-finite entries are rejected on construction.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& grid, double fill = 0.0);
  Field(const Grid& grid, std::vector<double> values);

  /// Samples f(xi, x') with x' the torus coordinates of the node.
  static Field sample(const Grid& grid, const std::function<double(double, std::span<const double>)>& f);

  const Grid& grid() const { return grid_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }
  double& operator()(std::size_t i, std::size_t row) { return values_[i + grid_.n_xi() * row]; }
  double operator()(std::size_t i, std::size_t row) const { return values_[i + grid_.n_xi() * row]; }

  Field& operator-=(const Field& o);
  Field& operator+=(const Field& o);
  Field& operator*=(double s);
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  double max_abs() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// max |v_j| (0 for an empty span).
double max_abs_of(std::span<const double> v);

/// Trapezoid in xi times the exact uniform rule on the torus.
double integrate(const Field& f);
/// Same, after checking that f lives on `grid` (DomainError otherwise).
double integrate(const Grid& grid, const Field& f);
/// Integral of |f|^p with the same quadrature (p = 1 or 2 most often).
double integrate_abs_pow(const Field& f, double p);

/// Quadrature of |grad f|^2: centered differences inside, second-order one-sided at the
/// xi ends, periodic wrap on the torus.
double gradient_sq_integral(const Field& f);

/// Values used for stencil points beyond the xi ends.
struct XiBoundary {
  double left = 0.0;
  double right = 0.0;
};

/// Spatial accuracy of the xi discretization. Second order pairs the 3-point Laplacian with
/// a third-order upwind-biased flux split; fourth order pairs the 5-point Laplacian with a
/// fifth-order split. Transverse diffusion is always the 3-point stencil.
enum class SpatialOrder { Second = 2, Fourth = 4 };

/// Semi-discrete right-hand side  Lap u - div(F(u) - frame_speed u e_1)  in flux form.
///
/// Every direction uses the local Lax-Friedrichs flux split
/// F^{+-} = (F(u) +- lambda u)/2 with lambda = max(|F'(u_i)|, |F'(u_{i+1})|) at each
/// interface, reconstructed upwind-biased. The Dirichlet end nodes get a zero tendency.
class SpatialOperator {
 public:
  struct Terms {
    bool diffusion = true;
    bool convection = true;
  };

  SpatialOperator(const Grid& grid, const FluxSpec& flux, double frame_speed, SpatialOrder order,
                  XiBoundary boundary, Terms terms);
  SpatialOperator(const Grid& grid, const FluxSpec& flux, double frame_speed, SpatialOrder order,
                  XiBoundary boundary)
      : SpatialOperator(grid, flux, frame_speed, order, boundary, Terms{}) {}

  void apply(std::span<const double> u, std::span<double> out) const;

  /// Largest eigenvalue magnitude of the diffusion stencils (sum over directions).
  double diffusion_spectral_radius() const;
  /// sum_d max|F_d'| / h_d over the value range [lo, hi].
  double advection_rate(double lo, double hi) const;

  const Grid& grid() const { return grid_; }
  SpatialOrder order() const { return order_; }

 private:
  void xi_pass(std::span<const double> u, std::span<double> out) const;
  void torus_pass(int dir, std::span<const double> u, std::span<double> out) const;

  Grid grid_;
  FluxSpec flux_;
  double frame_speed_;
  SpatialOrder order_;
  XiBoundary boundary_;
  Terms terms_;
};

/// Standard centered Laplacian (order 2 by default) with ghost values from `boundary`
/// (defaults to the end values of the first row); zero at the xi end nodes.
Field laplacian(const Field& f, SpatialOrder order = SpatialOrder::Second,
                std::optional<XiBoundary> boundary = std::nullopt);

/// Conservative div(F(u) - frame_speed u e_1) via local Lax-Friedrichs; zero at the xi end nodes.
Field divergence_flux(const FluxSpec& flux, const Field& f, double frame_speed = 0.0,
                      SpatialOrder order = SpatialOrder::Second, std::optional<XiBoundary> boundary = std::nullopt);

}  // namespace shocklab
