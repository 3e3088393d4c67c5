#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "chmr/numerics/numerics.hpp"

namespace chmr::numerics {

namespace {

using State = std::array<double, 2>;  // w, w'
namespace odeint = boost::numeric::odeint;

struct WaveOde {
  double c;
  void operator()(const State& s, State& ds, double /*xi*/) const {
    ds[0] = s[1];
    ds[1] = c * s[0] + 0.5 * s[0] * s[0] * s[0];
  }
};

constexpr double kTol = 1e-14;

auto dense_stepper() {
  return odeint::make_dense_output(kTol, kTol, odeint::runge_kutta_dopri5<State>());
}

// Potential mKdV residual x_2 + x_000 - x_0^3/2 with x_2 = -c w, w = x_0.
std::vector<double> mkdv_residual(const std::vector<double>& w, double c, double h) {
  const auto w2 = d2(w, h);
  std::vector<double> r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) r[i] = -c * w[i] + w2[i] - 0.5 * w[i] * w[i] * w[i];
  return r;
}

// (M_2 + M_000 + 6 M_0^2)_0 with q = M_0 and M_2 = -c q, q from 4M = x_0 -+ m, m_0 = x_0^2/2.
std::vector<double> kdv_residual(const std::vector<double>& w, double c, double h, bool flip_sign) {
  const auto w1 = d1(w, h);
  std::vector<double> q(w.size());
  const double s = flip_sign ? 1.0 : -1.0;
  for (std::size_t i = 0; i < w.size(); ++i) q[i] = (w1[i] + s * 0.5 * w[i] * w[i]) / 4.0;
  const auto q1 = d1(q, h), q3 = d3(q, h);
  std::vector<double> r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) r[i] = -c * q1[i] + q3[i] + 12.0 * q[i] * q1[i];
  return r;
}

}  // namespace

MkdvWave mkdv_wave(double speed, double amplitude) {
  if (!(speed < 0.0)) throw DomainError("a periodic mKdV wave needs a negative speed");
  if (!(amplitude > 0.0) || !(amplitude < std::sqrt(-2.0 * speed)))
    throw DomainError("amplitude must lie in (0, sqrt(-2c)) for a closed orbit");
  const WaveOde ode{speed};
  auto stepper = dense_stepper();
  stepper.initialize(State{amplitude, 0.0}, 0.0, 1e-3);
  // w' < 0 on the first half period; march until it turns positive.
  double lo = 0.0, hi = 0.0;
  for (int guard = 0;; ++guard) {
    if (guard > 1000000) throw NumericError("shooting oracle found no turning point");
    const auto [t0, t1] = stepper.do_step(ode);
    if (stepper.current_state()[1] >= 0.0 && t1 > 0.0) {
      lo = t0;
      hi = t1;
      break;
    }
  }
  State s;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    stepper.calc_state(mid, s);
    (s[1] < 0.0 ? lo : hi) = mid;
  }
  stepper.calc_state(0.5 * (lo + hi), s);
  if (std::abs(s[0] + amplitude) > 1e-9 * amplitude)
    throw NumericError("shooting oracle did not reach the symmetric turning point");
  return {speed, amplitude, lo + hi};
}

GridField MkdvWave::sample(std::size_t points) const {
  if (!(period > 0.0)) throw DomainError("wave has no period; build it with mkdv_wave");
  const Grid1D grid = Grid1D::periodic(0.0, period, points);
  std::vector<double> times(points);
  for (std::size_t i = 0; i < points; ++i) times[i] = grid.x(i);
  GridField out{grid, std::vector<double>(points), 0.0};
  State s{amplitude, 0.0};
  std::size_t i = 0;
  odeint::integrate_times(dense_stepper(), WaveOde{speed}, s, times.begin(), times.end(), 1e-3,
                          [&](const State& st, double) { out.values[i++] = st[0]; });
  return out;
}

MiuraResiduals miura_residuals(const MkdvWave& wave, std::size_t points, bool flip_sign) {
  const GridField w = wave.sample(points);
  const double h = w.grid.h();
  return {mkdv_residual(w.values, wave.speed, h), kdv_residual(w.values, wave.speed, h, flip_sign), h};
}

MiuraResiduals miura_residuals_zero(std::size_t points) {
  const Grid1D grid = Grid1D::periodic(0.0, 2.0 * M_PI, points);
  const std::vector<double> w(points, 0.0);
  return {mkdv_residual(w, -1.0, grid.h()), kdv_residual(w, -1.0, grid.h(), false), grid.h()};
}

}  // namespace chmr::numerics
