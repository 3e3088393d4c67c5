#include <fftw3.h>

#include <boost/math/interpolators/cardinal_trigonometric.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>

#include "chmr/numerics/numerics.hpp"

namespace chmr::numerics {

namespace {

// FFTW planning is not thread safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void require_periodic(const GridField& f) {
  if (f.grid.boundary != Boundary::kPeriodic) throw DomainError("transport needs a periodic grid");
  if (f.values.size() != f.grid.points) throw DomainError("field does not match its grid");
}

// Newton iteration for g(s) = target with g' > 0, started at s0.
template <typename Real, typename G>
Real newton(G&& g, Real target, Real s0) {
  Real s = s0;
  for (int it = 0; it < 60; ++it) {
    const auto [value, slope] = g(s);
    if (!(slope > 0.0)) throw NumericError("reciprocal map lost monotonicity during the inverse solve");
    const Real step = (value - target) / slope;
    s -= step;
    if (std::abs(step) <= 4 * std::numeric_limits<Real>::epsilon() * std::max(Real{1}, std::abs(s))) return s;
  }
  throw NumericError("Newton iteration for the reciprocal map did not converge");
}

// Extended precision: the Qiao residual applies a third difference to the result,
// so evaluation roundoff is amplified by h^-3.
using Real = long double;
using Trig = boost::math::interpolators::cardinal_trigonometric<std::vector<Real>>;

Trig make_trig(const std::vector<double>& values, double x_min, double h) {
  const std::vector<Real> wide(values.begin(), values.end());
  std::lock_guard lock(fftw_planner_mutex());
  return Trig(wide, x_min, h);
}

std::vector<double> spectral_transport(const GridField& U, const TransportOptions& options) {
  const Grid1D& g = U.grid;
  const Trig trig = make_trig(U.values, g.x_min, g.h());
  const auto x_of_X = [&](Real X) {
    const Real u = trig(X), ux = trig.prime(X);
    if (!(u > options.floor)) throw NumericError("U fell below the positivity floor between nodes");
    return std::pair<Real, Real>{X - std::log(u) / 2, 1 - ux / (2 * u)};
  };
  std::vector<double> out(g.points);
  for (std::size_t j = 0; j < g.points; ++j) {
    const Real xj = g.x_min + static_cast<Real>(j) * g.length() / static_cast<Real>(g.points);
    const Real X = newton(x_of_X, xj, xj + std::log(trig(xj)) / 2);
    const Real u = trig(X), ux = trig.prime(X);
    const Real root = std::sqrt(u);
    out[j] = static_cast<double>(options.drop_ux_term ? root : root / (1 - ux / (2 * u)));
  }
  return out;
}

std::vector<double> pchip_transport(const GridField& U, const TransportOptions& options) {
  const Grid1D& g = U.grid;
  const std::size_t n = g.points;
  const double L = g.length();
  const std::vector<double> ux = d1(U.values, g.h());
  std::vector<double> xs(n), us(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = U.values[i];
    xs[i] = g.x(i) - 0.5 * std::log(v);
    const double root = std::sqrt(v);
    us[i] = options.drop_ux_term ? root : root / (1.0 - ux[i] / (2.0 * v));
  }
  // Periodic padding so every uniform node lies strictly inside the data.
  constexpr std::size_t pad = 4;
  std::vector<double> px, pu;
  px.reserve(n + 2 * pad);
  pu.reserve(n + 2 * pad);
  for (std::size_t i = n - pad; i < n; ++i) px.push_back(xs[i] - L), pu.push_back(us[i]);
  for (std::size_t i = 0; i < n; ++i) px.push_back(xs[i]), pu.push_back(us[i]);
  for (std::size_t i = 0; i < pad; ++i) px.push_back(xs[i] + L), pu.push_back(us[i]);
  const double lo = px.front(), hi = px.back();
  boost::math::interpolators::pchip<std::vector<double>> spline(std::move(px), std::move(pu));
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double x = g.x(j);
    while (x <= lo) x += L;
    while (x >= hi) x -= L;
    if (x <= lo || x >= hi) throw NumericError("uniform x-node falls outside the interpolation range");
    out[j] = spline(x);
  }
  return out;
}

}  // namespace

struct SpectralInterpolant::Impl {
  explicit Impl(const GridField& f)
      : interp([&] {
          std::lock_guard lock(fftw_planner_mutex());
          return boost::math::interpolators::cardinal_trigonometric<std::vector<double>>(f.values, f.grid.x_min,
                                                                                          f.grid.h());
        }()) {}
  boost::math::interpolators::cardinal_trigonometric<std::vector<double>> interp;
};

SpectralInterpolant::SpectralInterpolant(const GridField& f) {
  require_periodic(f);
  impl_ = std::make_shared<const Impl>(f);
}

std::pair<double, double> SpectralInterpolant::operator()(double x) const {
  return {impl_->interp(x), impl_->interp.prime(x)};
}

std::vector<GridField> transport_dym_to_qiao(const std::vector<GridField>& frames, const TransportOptions& options) {
  std::vector<GridField> out;
  out.reserve(frames.size());
  for (const GridField& U : frames) {
    require_periodic(U);
    const double h = U.grid.h();
    const std::vector<double> ux = d1(U.values, h);
    for (std::size_t i = 0; i < U.values.size(); ++i) {
      const double v = U.values[i];
      if (!(v > options.floor))
        throw NumericError("U = " + std::to_string(v) + " at node " + std::to_string(i) + " is below the floor");
      const double slope = 1.0 - ux[i] / (2.0 * v);
      if (!(slope > 0.0))
        throw NumericError("x(X) = X - ln(U)/2 is not monotone at node " + std::to_string(i) +
                           ": 1 - U_X/(2U) = " + std::to_string(slope));
    }
    GridField u{U.grid, {}, U.time};
    u.values = options.interpolation == Interpolation::kSpectral ? spectral_transport(U, options)
                                                                 : pchip_transport(U, options);
    for (std::size_t j = 0; j < u.values.size(); ++j)
      if (!(u.values[j] > options.floor) || !std::isfinite(u.values[j]))
        throw NumericError("transported u is below the floor at node " + std::to_string(j));
    out.push_back(std::move(u));
  }
  return out;
}

GridField transport_qiao_to_dym(const GridField& u) {
  require_periodic(u);
  const std::size_t n = u.grid.points;
  const double kappa = 2.0 * M_PI / u.grid.length();
  std::vector<std::complex<double>> spec(n / 2 + 1);
  std::vector<double> data = u.values, p(n);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), data.data(),
                                         reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
  }
  // P_x + P = u mode by mode; the Nyquist mode has no well-defined derivative and is left as is.
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const bool nyquist = n % 2 == 0 && k == n / 2;
    const double w = nyquist ? 0.0 : kappa * static_cast<double>(k);
    spec[k] /= std::complex<double>(1.0, w) * static_cast<double>(n);
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_plan inv =
        fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(spec.data()), p.data(), FFTW_ESTIMATE);
    fftw_execute(inv);
    fftw_destroy_plan(inv);
  }
  const GridField P{u.grid, p, u.time};
  for (std::size_t i = 0; i < n; ++i)
    if (!(p[i] > 0.0)) throw NumericError("recovered P is not positive at node " + std::to_string(i));
  const SpectralInterpolant interp(P);
  const auto X_of_x = [&](double x) {
    const auto [v, vx] = interp(x);
    if (!(v > 0.0)) throw NumericError("recovered P is not positive between nodes");
    return std::pair{x + std::log(v), 1.0 + vx / v};
  };
  GridField U{u.grid, std::vector<double>(n), u.time};
  for (std::size_t i = 0; i < n; ++i) {
    const double Xi = u.grid.x(i);
    const double x = newton(X_of_x, Xi, Xi - std::log(interp(Xi).first));
    const double v = interp(x).first;
    U.values[i] = v * v;
  }
  return U;
}

}  // namespace chmr::numerics
