#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "chmr/numerics/numerics.hpp"

namespace chmr::numerics {

namespace {

// Extended precision keeps the roundoff random walk of ~1e5 steps well below the
// h^-4 amplification that the transported Qiao residual applies to it.
using Real = long double;
using State = std::vector<Real>;

struct DymRhs {
  Real h;
  Real k;
  void operator()(const State& u, State& dudt, double /*t*/) const {
    const std::size_t n = u.size();
    State g(n);
    // A stage below zero yields NaN, which the floor test after the step catches.
    for (std::size_t i = 0; i < n; ++i) g[i] = 1 / std::sqrt(u[i]);
    dudt.resize(n);
    const Real h3 = 2 * h * h * h, h1 = 2 * h;
    for (std::size_t i = 0; i < n; ++i) {
      const auto at = [&](std::size_t ahead, std::size_t behind) { return g[(i + n + ahead - behind) % n]; };
      const Real third = (at(2, 0) - 2 * at(1, 0) + 2 * at(0, 1) - at(0, 2)) / h3;
      const Real first = (at(1, 0) - at(0, 1)) / h1;
      dudt[i] = k * (third - first);
    }
  }
};

bool above_floor(const State& u, double floor) {
  return std::all_of(u.begin(), u.end(), [&](Real v) { return v > floor; });  // false on NaN
}

State widen(const std::vector<double>& v) { return State(v.begin(), v.end()); }
std::vector<double> narrow(const State& v) { return std::vector<double>(v.begin(), v.end()); }

}  // namespace

Trajectory integrate_dym(const GridField& u0, double dt, double t_end, const DymOptions& options) {
  const Grid1D& grid = u0.grid;
  if (grid.boundary != Boundary::kPeriodic) throw DomainError("the Dym integrator needs a periodic grid");
  if (u0.values.size() != grid.points) throw DomainError("initial field does not match its grid");
  const double h = grid.h();
  const double limit = options.stability_c * h * h * h;
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    throw DomainError("time step " + std::to_string(dt) + " breaks dt <= c h^3 = " + std::to_string(limit));
  if (t_end < 0.0) throw DomainError("negative end time");
  if (!above_floor(widen(u0.values), options.floor)) throw NumericError("initial field is below the positivity floor");

  std::vector<double> samples = options.sample_times.empty() ? std::vector<double>{t_end} : options.sample_times;
  std::sort(samples.begin(), samples.end());
  if (samples.front() < 0.0 || samples.back() > t_end * (1.0 + 1e-12))
    throw DomainError("sample times must lie in [0, t_end]");

  boost::numeric::odeint::runge_kutta4<State> stepper;
  const DymRhs rhs{h, options.k};
  Trajectory out;
  State u = widen(u0.values), previous;
  double t = u0.time;
  const double t0 = u0.time;
  for (double target : samples) {
    target += t0;
    while (t < target - 1e-12 * std::max(1.0, std::abs(target))) {
      const double step = std::min(dt, target - t);
      previous = u;
      stepper.do_step(rhs, u, t, step);
      t += step;
      ++out.steps;
      if (!above_floor(u, options.floor)) {
        out.floor_violated = true;
        out.frames.push_back({grid, narrow(previous), t - step});
        return out;
      }
    }
    out.frames.push_back({grid, narrow(u), t});
  }
  return out;
}

double dym_step_doubling_error(const GridField& u, double dt, double k) {
  boost::numeric::odeint::runge_kutta4<State> stepper;
  const DymRhs rhs{u.grid.h(), k};
  State one = widen(u.values), two = one;
  stepper.do_step(rhs, one, u.time, dt);
  stepper.do_step(rhs, two, u.time, dt / 2);
  stepper.do_step(rhs, two, u.time + dt / 2, dt / 2);
  double m = 0.0;
  for (std::size_t i = 0; i < one.size(); ++i) m = std::max(m, static_cast<double>(std::abs(one[i] - two[i])));
  return m;
}

}  // namespace chmr::numerics
