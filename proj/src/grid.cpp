#include "shocklab/grid.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <string>

#include "shocklab/error.hpp"

namespace shocklab {

void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Grid::Grid(double half_width, int n_xi, int n_dims, int n_t)
    : L_(half_width), n_xi_(n_xi), n_dims_(n_dims), n_t_(n_t) {
  if (!(half_width > 0.0)) throw DomainError("grid half width must be positive");
  if (n_xi < 5) throw DomainError("grid needs at least 5 nodes in xi");
  if (n_dims < 2) throw DomainError("grid dimension n must be at least 2");
  if (n_t < 1) throw DomainError("grid needs at least one node per torus direction");
  h_xi_ = 2.0 * L_ / (n_xi_ - 1);
  rows_ = 1;
  pow_.clear();
  for (int d = 0; d < torus_dirs(); ++d) {
    pow_.push_back(rows_);
    rows_ *= static_cast<std::size_t>(n_t_);
  }
  torus_weight_ = std::pow(1.0 / n_t_, torus_dirs());
}

std::size_t Grid::torus_index(std::size_t row, int dir) const {
  return (row / pow_[static_cast<std::size_t>(dir)]) % static_cast<std::size_t>(n_t_);
}

double Grid::torus_coord(std::size_t row, int dir) const {
  return static_cast<double>(torus_index(row, dir)) * h_t();
}

std::size_t Grid::torus_neighbor(std::size_t row, int dir, int offset) const {
  const auto nt = static_cast<long>(n_t_);
  const auto c = static_cast<long>(torus_index(row, dir));
  const long moved = ((c + offset) % nt + nt) % nt;
  const auto p = static_cast<long>(pow_[static_cast<std::size_t>(dir)]);
  return static_cast<std::size_t>(static_cast<long>(row) + (moved - c) * p);
}

Field::Field(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {
  if (!std::isfinite(fill)) throw DomainError("field fill value is not finite");
}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DomainError("field size does not match its grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("field contains non-finite values");
}

Field Field::sample(const Grid& grid, const std::function<double(double, std::span<const double>)>& f) {
  std::vector<double> v(grid.size());
  std::vector<double> xt(static_cast<std::size_t>(grid.torus_dirs()));
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (int d = 0; d < grid.torus_dirs(); ++d) xt[static_cast<std::size_t>(d)] = grid.torus_coord(r, d);
    for (std::size_t i = 0; i < static_cast<std::size_t>(grid.n_xi()); ++i)
      v[i + grid.n_xi() * r] = f(grid.xi(i), xt);
  }
  return Field(grid, std::move(v));
}

Field& Field::operator-=(const Field& o) {
  if (!(grid_ == o.grid_)) throw DomainError("field grids do not match");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

Field& Field::operator+=(const Field& o) {
  if (!(grid_ == o.grid_)) throw DomainError("field grids do not match");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

double Field::max_abs() const { return max_abs_of(values_); }

double max_abs_of(std::span<const double> v) {
  // Independent lanes let the compiler vectorize the reduction.
  double m[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t j = 0;
  for (; j + 4 <= v.size(); j += 4)
    for (std::size_t l = 0; l < 4; ++l) m[l] = std::abs(v[j + l]) > m[l] ? std::abs(v[j + l]) : m[l];
  for (; j < v.size(); ++j) m[0] = std::max(m[0], std::abs(v[j]));
  return std::max(std::max(m[0], m[1]), std::max(m[2], m[3]));
}

namespace {

// Rows are summed in a fixed order so the result does not depend on threading.
template <class F>
double quadrature(const Grid& g, F&& integrand) {
  const auto nx = static_cast<std::size_t>(g.n_xi());
  double total = 0.0;
  for (std::size_t r = 0; r < g.rows(); ++r) {
    double row = 0.0;
    for (std::size_t i = 0; i < nx; ++i) row += g.xi_weight(i) * integrand(i, r);
    total += row;
  }
  return total * g.torus_weight();
}

}  // namespace

double integrate(const Field& f) {
  const auto& v = f.data();
  const auto nx = static_cast<std::size_t>(f.grid().n_xi());
  return quadrature(f.grid(), [&](std::size_t i, std::size_t r) { return v[i + nx * r]; });
}

double integrate(const Grid& grid, const Field& f) {
  if (!(grid == f.grid())) throw DomainError("field does not live on the requested grid");
  return integrate(f);
}

double integrate_abs_pow(const Field& f, double p) {
  const auto& v = f.data();
  const auto nx = static_cast<std::size_t>(f.grid().n_xi());
  if (p == 1.0) return quadrature(f.grid(), [&](std::size_t i, std::size_t r) { return std::abs(v[i + nx * r]); });
  if (p == 2.0)
    return quadrature(f.grid(), [&](std::size_t i, std::size_t r) { return v[i + nx * r] * v[i + nx * r]; });
  return quadrature(f.grid(), [&](std::size_t i, std::size_t r) { return std::pow(std::abs(v[i + nx * r]), p); });
}

double gradient_sq_integral(const Field& f) {
  const Grid& g = f.grid();
  const auto& v = f.data();
  const auto nx = static_cast<std::size_t>(g.n_xi());
  const double hx = g.h_xi(), ht = g.h_t();
  return quadrature(g, [&](std::size_t i, std::size_t r) {
    const double* row = v.data() + nx * r;
    double dx;
    if (i == 0)
      dx = (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * hx);
    else if (i + 1 == nx)
      dx = (3.0 * row[nx - 1] - 4.0 * row[nx - 2] + row[nx - 3]) / (2.0 * hx);
    else
      dx = (row[i + 1] - row[i - 1]) / (2.0 * hx);
    double s = dx * dx;
    for (int d = 0; d < g.torus_dirs(); ++d) {
      if (g.n_t() < 2) continue;
      const double up = v[i + nx * g.torus_neighbor(r, d, +1)];
      const double dn = v[i + nx * g.torus_neighbor(r, d, -1)];
      const double dt = (up - dn) / (2.0 * ht);
      s += dt * dt;
    }
    return s;
  });
}

// ---------------------------------------------------------------------------
// Flux-form stencils. For an interface between nodes i and i+1 the arrays are
// addressed relative to node i.

namespace {

constexpr int kGhost = 3;

// Split LLF flux with upwind-biased reconstruction; h = flux values, u = states.
inline double split_flux_o3(const double* h, const double* u, double lambda) {
  const double central = (-h[-1] + 7.0 * h[0] + 7.0 * h[1] - h[2]) * (1.0 / 12.0);
  const double diss = (u[-1] - 3.0 * u[0] + 3.0 * u[1] - u[2]) * (1.0 / 12.0);
  return central - lambda * diss;
}

inline double split_flux_o5(const double* h, const double* u, double lambda) {
  const double central = (h[-2] - 8.0 * h[-1] + 37.0 * h[0] + 37.0 * h[1] - 8.0 * h[2] + h[3]) * (1.0 / 60.0);
  const double diss = (-u[-2] + 5.0 * u[-1] - 10.0 * u[0] + 10.0 * u[1] - 5.0 * u[2] + u[3]) * (1.0 / 60.0);
  return central - lambda * diss;
}

// Diffusive flux u_x at the interface (times h).
inline double grad_o2(const double* u) { return u[1] - u[0]; }
inline double grad_o4(const double* u) { return (-u[2] + 15.0 * u[1] - 15.0 * u[0] + u[-1]) * (1.0 / 12.0); }

}  // namespace

SpatialOperator::SpatialOperator(const Grid& grid, const FluxSpec& flux, double frame_speed, SpatialOrder order,
                                 XiBoundary boundary, Terms terms)
    : grid_(grid), flux_(flux), frame_speed_(frame_speed), order_(order), boundary_(boundary), terms_(terms) {
  const int need = order_ == SpatialOrder::Fourth ? 6 : 4;
  if (grid_.n_t() > 1 && grid_.n_t() < need && terms_.convection)
    throw DomainError("torus resolution too coarse for the convective stencil (need n_t >= " +
                      std::to_string(need) + " or n_t == 1)");
}

double SpatialOperator::diffusion_spectral_radius() const {
  const double s_xi = order_ == SpatialOrder::Fourth ? 16.0 / 3.0 : 4.0;
  double rho = s_xi / (grid_.h_xi() * grid_.h_xi());
  if (grid_.n_t() > 1) rho += grid_.torus_dirs() * 4.0 / (grid_.h_t() * grid_.h_t());
  return rho;
}

double SpatialOperator::advection_rate(double lo, double hi) const {
  double s1 = 0.0, st = 0.0;
  const int samples = 2001;
  for (int k = 0; k < samples; ++k) {
    const double u = lo + (hi - lo) * k / (samples - 1);
    s1 = std::max(s1, std::abs(flux_.df1(u) - frame_speed_));
    for (int d = 0; d < grid_.torus_dirs(); ++d)
      st = std::max(st, std::abs(flux_.dft(static_cast<std::size_t>(d), u)));
  }
  double rate = s1 / grid_.h_xi();
  if (grid_.n_t() > 1) rate += grid_.torus_dirs() * st / grid_.h_t();
  return rate;
}

void SpatialOperator::apply(std::span<const double> u, std::span<double> out) const {
  if (u.size() != grid_.size() || out.size() != grid_.size())
    throw DomainError("operator input does not match its grid");
  xi_pass(u, out);
  if (grid_.n_t() > 1)
    for (int d = 0; d < grid_.torus_dirs(); ++d) torus_pass(d, u, out);
}

namespace {

// h = f1(u) - sigma u and s = |f1'(u) - sigma| for n states.
void eval_normal(const FluxSpec& f, double sigma, const double* u, double* h, double* s, std::size_t n) {
  if (f.g.is_zero()) {
    const double a = f.a;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = u[j];
      h[j] = (a * v - sigma) * v;
      s[j] = std::abs(2.0 * a * v - sigma);
    }
    return;
  }
  for (std::size_t j = 0; j < n; ++j) {
    h[j] = f.f1(u[j]) - sigma * u[j];
    s[j] = std::abs(f.df1(u[j]) - sigma);
  }
}

// Total flux (convective minus diffusive) through the interfaces i | i+1, i = 0..m-1.
// Arrays are addressed relative to node i; `cdiff` is 1/h or 0.
template <bool Fourth, bool Conv>
void interface_fluxes(const double* U, const double* H, const double* S, double cdiff, double* tf, int m) {
  for (int i = 0; i < m; ++i) {
    double t = 0.0;
    if constexpr (Conv) {
      const double lambda = std::max(S[i], S[i + 1]);
      t = Fourth ? split_flux_o5(H + i, U + i, lambda) : split_flux_o3(H + i, U + i, lambda);
    }
    t -= cdiff * (Fourth ? grad_o4(U + i) : grad_o2(U + i));
    tf[i] = t;
  }
}

// Same for f1 = a u^2 with the flux and speed evaluated on the fly.
template <bool Fourth>
void interface_fluxes_quad(const double* U, double a, double sigma, double cdiff, double* tf, int m) {
  auto h = [=](double v) { return (a * v - sigma) * v; };
  for (int i = 0; i < m; ++i) {
    const double* u = U + i;
    const double lambda = std::max(std::abs(2.0 * a * u[0] - sigma), std::abs(2.0 * a * u[1] - sigma));
    double t;
    if constexpr (Fourth) {
      t = (h(u[-2]) - 8.0 * h(u[-1]) + 37.0 * h(u[0]) + 37.0 * h(u[1]) - 8.0 * h(u[2]) + h(u[3])) * (1.0 / 60.0) -
          lambda * (-u[-2] + 5.0 * u[-1] - 10.0 * u[0] + 10.0 * u[1] - 5.0 * u[2] + u[3]) * (1.0 / 60.0);
      t -= cdiff * grad_o4(u);
    } else {
      t = (-h(u[-1]) + 7.0 * h(u[0]) + 7.0 * h(u[1]) - h(u[2])) * (1.0 / 12.0) -
          lambda * (u[-1] - 3.0 * u[0] + 3.0 * u[1] - u[2]) * (1.0 / 12.0);
      t -= cdiff * grad_o2(u);
    }
    tf[i] = t;
  }
}

template <bool Fourth, bool Conv>
void xi_rows(const Grid& g, const FluxSpec& flux, double sigma, XiBoundary b, double cdiff,
             std::span<const double> u, std::span<double> out) {
  const int nx = g.n_xi();
  const double inv_h = 1.0 / g.h_xi();
  const auto rows = static_cast<long>(g.rows());
#pragma omp parallel
  {
    std::vector<double> pu(static_cast<std::size_t>(nx + 2 * kGhost));
    std::vector<double> ph(pu.size()), ps(pu.size()), tf(static_cast<std::size_t>(nx));
#pragma omp for schedule(static)
    for (long r = 0; r < rows; ++r) {
      const double* row = u.data() + static_cast<std::size_t>(nx) * static_cast<std::size_t>(r);
      double* o = out.data() + static_cast<std::size_t>(nx) * static_cast<std::size_t>(r);
      for (int k = 0; k < kGhost; ++k) {
        pu[static_cast<std::size_t>(k)] = b.left;
        pu[static_cast<std::size_t>(nx + kGhost + k)] = b.right;
      }
      std::copy(row, row + nx, pu.begin() + kGhost);
      if (Conv && flux.g.is_zero()) {
        interface_fluxes_quad<Fourth>(pu.data() + kGhost, flux.a, sigma, cdiff, tf.data(), nx - 1);
      } else {
        if constexpr (Conv) eval_normal(flux, sigma, pu.data(), ph.data(), ps.data(), pu.size());
        interface_fluxes<Fourth, Conv>(pu.data() + kGhost, ph.data() + kGhost, ps.data() + kGhost, cdiff, tf.data(),
                                       nx - 1);
      }
      o[0] = 0.0;
      o[nx - 1] = 0.0;
      for (int i = 1; i + 1 < nx; ++i) o[i] = -(tf[static_cast<std::size_t>(i)] - tf[static_cast<std::size_t>(i - 1)]) * inv_h;
    }
  }
}

// Flux through the interface between a row and its +1 torus neighbor for `len` nodes;
// p[k] points at the row with offset k - 2 (k = 0..5). `Quad` selects the a u^2 fast path.
template <bool Fourth, bool Conv, bool Quad>
void torus_interface(const double* const* p, const FluxSpec& flux, std::size_t dir, double cdiff, double* t,
                     std::size_t len) {
  const double a = flux.a;
  auto h = [&](double v) { return Quad ? a * v * v : flux.ft(dir, v); };
  auto s = [&](double v) { return Quad ? std::abs(2.0 * a * v) : std::abs(flux.dft(dir, v)); };
  for (std::size_t i = 0; i < len; ++i) {
    const double u0 = p[0][i], u1 = p[1][i], u2 = p[2][i], u3 = p[3][i], u4 = p[4][i], u5 = p[5][i];
    double acc = 0.0;
    if constexpr (Conv) {
      const double lambda = std::max(s(u2), s(u3));
      if constexpr (Fourth) {
        acc = (h(u0) - 8.0 * h(u1) + 37.0 * h(u2) + 37.0 * h(u3) - 8.0 * h(u4) + h(u5)) * (1.0 / 60.0) -
              lambda * (-u0 + 5.0 * u1 - 10.0 * u2 + 10.0 * u3 - 5.0 * u4 + u5) * (1.0 / 60.0);
      } else {
        acc = (-h(u1) + 7.0 * h(u2) + 7.0 * h(u3) - h(u4)) * (1.0 / 12.0) -
              lambda * (u1 - 3.0 * u2 + 3.0 * u3 - u4) * (1.0 / 12.0);
      }
    }
    t[i] = acc - cdiff * (u3 - u2);
  }
}

using TorusKernel = void (*)(const double* const*, const FluxSpec&, std::size_t, double, double*, std::size_t);

TorusKernel pick_torus_kernel(bool fourth, bool conv, bool quad) {
  if (!conv) return torus_interface<false, false, false>;
  if (fourth) return quad ? torus_interface<true, true, true> : torus_interface<true, true, false>;
  return quad ? torus_interface<false, true, true> : torus_interface<false, true, false>;
}

constexpr std::size_t kChunk = 512;

}  // namespace

void SpatialOperator::xi_pass(std::span<const double> u, std::span<double> out) const {
  const double cdiff = terms_.diffusion ? 1.0 / grid_.h_xi() : 0.0;
  const bool fourth = order_ == SpatialOrder::Fourth;
  if (terms_.convection) {
    if (fourth)
      xi_rows<true, true>(grid_, flux_, frame_speed_, boundary_, cdiff, u, out);
    else
      xi_rows<false, true>(grid_, flux_, frame_speed_, boundary_, cdiff, u, out);
  } else {
    if (fourth)
      xi_rows<true, false>(grid_, flux_, frame_speed_, boundary_, cdiff, u, out);
    else
      xi_rows<false, false>(grid_, flux_, frame_speed_, boundary_, cdiff, u, out);
  }
}

void SpatialOperator::torus_pass(int dir, std::span<const double> u, std::span<double> out) const {
  const auto nx = static_cast<std::size_t>(grid_.n_xi());
  const int nt = grid_.n_t();
  const double inv_h = 1.0 / grid_.h_t();
  const double cdiff = terms_.diffusion ? inv_h : 0.0;
  const auto kernel = pick_torus_kernel(order_ == SpatialOrder::Fourth, terms_.convection, flux_.transverse.empty());
  const auto d = static_cast<std::size_t>(dir);

  // Walk each torus line (rows differing only along `dir`) in chunks of interior xi nodes,
  // carrying the flux of the previous interface.
  std::vector<std::size_t> starts;
  for (std::size_t r = 0; r < grid_.rows(); ++r)
    if (grid_.torus_index(r, dir) == 0) starts.push_back(r);
  const std::size_t interior = nx - 2;
  const std::size_t chunks = (interior + kChunk - 1) / kChunk;
  const auto jobs = static_cast<long>(starts.size() * chunks);

#pragma omp parallel
  {
    std::vector<double> prev(kChunk), cur(kChunk);
#pragma omp for schedule(static)
    for (long job = 0; job < jobs; ++job) {
      const std::size_t start = starts[static_cast<std::size_t>(job) / chunks];
      const std::size_t i0 = 1 + (static_cast<std::size_t>(job) % chunks) * kChunk;
      const std::size_t len = std::min(kChunk, nx - 1 - i0);
      auto flux_at = [&](int c, double* t) {
        const double* p[6];
        for (int k = 0; k < 6; ++k) p[k] = u.data() + grid_.torus_neighbor(start, dir, c + k - 2) * nx + i0;
        kernel(p, flux_, d, cdiff, t, len);
      };
      flux_at(-1, prev.data());
      for (int c = 0; c < nt; ++c) {
        flux_at(c, cur.data());
        double* o = out.data() + grid_.torus_neighbor(start, dir, c) * nx + i0;
        for (std::size_t i = 0; i < len; ++i) o[i] -= (cur[i] - prev[i]) * inv_h;
        std::swap(prev, cur);
      }
    }
  }
}

Field laplacian(const Field& f, SpatialOrder order, std::optional<XiBoundary> boundary) {
  const Grid& g = f.grid();
  const XiBoundary b = boundary.value_or(XiBoundary{f.data().front(), f.data()[static_cast<std::size_t>(g.n_xi() - 1)]});
  SpatialOperator op(g, FluxSpec::burgers(), 0.0, order, b, {true, false});
  std::vector<double> out(g.size());
  op.apply(f.values(), out);
  return Field(g, std::move(out));
}

Field divergence_flux(const FluxSpec& flux, const Field& f, double frame_speed, SpatialOrder order,
                      std::optional<XiBoundary> boundary) {
  const Grid& g = f.grid();
  const XiBoundary b = boundary.value_or(XiBoundary{f.data().front(), f.data()[static_cast<std::size_t>(g.n_xi() - 1)]});
  SpatialOperator op(g, flux, frame_speed, order, b, {false, true});
  std::vector<double> out(g.size());
  op.apply(f.values(), out);
  for (double& v : out) v = -v;
  return Field(g, std::move(out));
}

}  // namespace shocklab
