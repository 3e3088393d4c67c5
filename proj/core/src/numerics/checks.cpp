#include <cmath>
#include <future>
#include <sstream>

#include "chmr/jet/expression.hpp"
#include "chmr/numerics/numerics.hpp"

namespace chmr::numerics {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double perturbed(double X) { return 4.0 + 0.5 * std::sin(X); }

struct Level {
  double h = 0.0, linf = 0.0, l2 = 0.0;
};

// Runs one job per resolution concurrently and keeps ladder order.
template <typename F>
std::vector<Level> run_ladder(const std::vector<std::size_t>& ladder, F&& job) {
  std::vector<std::future<Level>> futures;
  futures.reserve(ladder.size());
  for (std::size_t n : ladder) futures.push_back(std::async(std::launch::async, job, n));
  std::vector<Level> out;
  out.reserve(ladder.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

Level level_of(const std::vector<double>& r, double h) { return {h, norm_linf(r), norm_l2(r, h)}; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

NumericMeasure measure(std::string label, const std::vector<std::size_t>& ladder, const std::vector<Level>& levels) {
  if (ladder.size() < 3) throw DomainError("a convergence study needs at least 3 resolutions");
  NumericMeasure m;
  m.label = std::move(label);
  m.resolutions = ladder;
  std::vector<double> hs;
  for (const Level& l : levels) {
    hs.push_back(l.h);
    m.linf.push_back(l.linf);
    m.l2.push_back(l.l2);
  }
  m.order = fit_order(hs, m.linf);
  return m;
}

void order_at_least(NumericMeasure& m, double min_order) {
  m.criterion = "order >= " + fmt(min_order);
  m.passed = std::isfinite(m.order) && m.order >= min_order;
}

void order_near(NumericMeasure& m, double order, double slack) {
  m.criterion = "|order - " + fmt(order) + "| <= " + fmt(slack);
  m.passed = std::isfinite(m.order) && std::abs(m.order - order) <= slack;
}

// A mutation is caught when refinement leaves at least half the coarse residual.
void plateaus(NumericMeasure& m) {
  m.criterion = "plateau: finest >= 0.5 * coarsest";
  m.passed = m.linf.back() >= 0.5 * m.linf.front() && m.linf.back() > 0.0;
}

std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

Trajectory dym_run(std::size_t n, double t_end, std::vector<double> samples = {}, double c = 0.1) {
  const Grid1D g = Grid1D::periodic(0.0, kTwoPi, n);
  const double h = g.h();
  DymOptions opts;
  opts.stability_c = c;
  opts.sample_times = std::move(samples);
  Trajectory tr = integrate_dym(GridField::sample(g, perturbed), c * h * h * h, t_end, opts);
  if (tr.floor_violated) throw NumericError("Dym trajectory hit the positivity floor");
  return tr;
}

ResidualOutcome exact_zero(std::string label, double value, double tolerance) {
  ResidualOutcome o;
  o.label = std::move(label);
  o.reduced_to_zero = std::abs(value) <= tolerance;
  o.remainder_text = fmt(value);
  return o;
}

}  // namespace

NumericMeasure manufactured_check(Pde pde, const std::vector<std::size_t>& ladder) {
  const bool dym = pde == Pde::kDym;
  const jet::SpacePtr sp = jet::parse_catalog(dym ? "var X, T\nfield U(X, T)\next r : r^2 = U\nnonzero U\n"
                                                  : "var x, t\nfield u(x, t)\nnonzero u\n");
  const double k = dym ? 2.0 : 1.0;
  const std::string var = dym ? "X" : "x";
  const jet::Expression g = jet::parse_expression(dym ? "1/r" : "1/(2*u^2)", sp);
  const jet::Expression rhs = k * (jet::differentiate(g, {var, var, var}) - jet::differentiate(g, var));
  const jet::FieldId field = sp->field_id(dym ? "U" : "u");
  const auto exact = [&](double x) {
    return jet::evaluate(rhs, [&](jet::JetVar j) {
      const double base = 2.0 + std::sin(x);
      if (j.field() != field) return std::sqrt(base);  // the extension r = sqrt(U)
      const unsigned order = j.order(0);
      return order == 0 ? base : std::sin(x + order * M_PI / 2.0);
    });
  };
  const auto levels = run_ladder(ladder, [&](std::size_t n) {
    const Grid1D grid = Grid1D::periodic(0.0, kTwoPi, n);
    const GridField f = GridField::sample(grid, [](double x) { return 2.0 + std::sin(x); });
    const GridField ft = GridField::sample(grid, exact);
    return level_of(fd_residual(pde, k, f, ft).residual.values, grid.h());
  });
  NumericMeasure m = measure(dym ? "manufactured Dym: U = 2 + sin X, U_T = 2((U^-1/2)_XXX - (U^-1/2)_X) exact"
                                 : "manufactured Qiao: u = 2 + sin x, u_t = (1/(2u^2))_xxx - (1/(2u^2))_x exact",
                             ladder, levels);
  order_near(m, 2.0, 0.3);
  return m;
}

NumericMeasure dym_manufactured_check(const std::vector<std::size_t>& ladder) {
  return manufactured_check(Pde::kDym, ladder);
}

NumericMeasure dym_refinement_check(const std::vector<std::size_t>& ladder, std::size_t reference, double t_end) {
  for (std::size_t n : ladder)
    if (reference % n != 0 || reference <= n) throw DomainError("reference grid must refine every ladder grid");
  const auto final_state = [&](std::size_t n) { return dym_run(n, t_end).frames.back(); };
  auto ref = std::async(std::launch::async, final_state, reference);
  std::vector<std::future<GridField>> coarse;
  for (std::size_t n : ladder) coarse.push_back(std::async(std::launch::async, final_state, n));
  const GridField fine = ref.get();
  std::vector<Level> levels;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const GridField f = coarse[i].get();
    const std::size_t stride = reference / ladder[i];
    std::vector<double> e(ladder[i]);
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = f.values[j] - fine.values[j * stride];
    levels.push_back(level_of(e, f.grid.h()));
  }
  NumericMeasure m = measure("Dym trajectory from 4 + sin(X)/2 against a " + std::to_string(reference) +
                                 "-point reference at t = " + fmt(t_end),
                             ladder, levels);
  order_near(m, 2.0, 0.3);
  return m;
}

NumericMeasure dym_step_doubling_check(const std::vector<std::size_t>& ladder, double t_end, double tolerance) {
  const auto levels = run_ladder(ladder, [&](std::size_t n) {
    std::vector<double> samples;
    for (int i = 1; i <= 20; ++i) samples.push_back(t_end * i / 20.0);
    const Trajectory tr = dym_run(n, t_end, samples);
    const double h = tr.frames.front().grid.h();
    double worst = 0.0;
    for (const GridField& f : tr.frames) worst = std::max(worst, dym_step_doubling_error(f, 0.1 * h * h * h));
    return Level{h, worst, worst};
  });
  NumericMeasure m = measure("RK4 step-doubling estimate along Dym trajectories to t = " + fmt(t_end), ladder, levels);
  m.criterion = "max estimate <= 10 * " + fmt(tolerance);
  m.passed = true;
  for (double v : m.linf) m.passed = m.passed && v <= 10.0 * tolerance;
  return m;
}

NumericMeasure transport_round_trip_check(const std::vector<std::size_t>& ladder) {
  const auto levels = run_ladder(ladder, [](std::size_t n) {
    const GridField U = GridField::sample(Grid1D::periodic(0.0, kTwoPi, n), perturbed);
    const GridField back = transport_qiao_to_dym(transport_dym_to_qiao({U}).front());
    return level_of(diff(back.values, U.values), U.grid.h());
  });
  NumericMeasure m = measure("transport then inverse transport of U = 4 + sin(X)/2", ladder, levels);
  m.criterion = "max |U_back - U| <= h^3 at every resolution";
  m.passed = true;
  for (const Level& l : levels) m.passed = m.passed && l.linf <= l.h * l.h * l.h;
  return m;
}

namespace {

// Qiao residual levels for each transport variant, sharing one Dym trajectory per resolution.
std::vector<std::vector<Level>> transport_levels(const TransportCheckOptions& options,
                                                 const std::vector<TransportOptions>& variants) {
  std::vector<std::future<std::vector<Level>>> futures;
  for (std::size_t n : options.ladder)
    futures.push_back(std::async(std::launch::async, [&options, &variants, n] {
      const double h = kTwoPi / static_cast<double>(n);
      const double dt = options.stability_c * h * h * h;
      // Wide enough that roundoff divided by tau stays below the truncation error.
      const double tau = 64.0 * dt;
      const double t = options.t_end;
      if (t - tau <= 0.0) throw DomainError("t_end is too short for the centered time difference");
      const Trajectory tr = dym_run(n, t + tau, {t - tau, t, t + tau}, options.stability_c);
      std::vector<Level> out;
      for (const TransportOptions& topts : variants) {
        const auto u = transport_dym_to_qiao(tr.frames, topts);
        GridField ut{u[1].grid, diff(u[2].values, u[0].values), u[1].time};
        const double span = u[2].time - u[0].time;
        for (double& v : ut.values) v /= span;
        out.push_back(level_of(fd_residual(Pde::kQiao, 1.0, u[1], ut).residual.values, h));
      }
      return out;
    }));
  std::vector<std::vector<Level>> by_variant(variants.size());
  for (auto& f : futures) {
    const std::vector<Level> row = f.get();
    for (std::size_t v = 0; v < row.size(); ++v) by_variant[v].push_back(row[v]);
  }
  return by_variant;
}

NumericMeasure transport_measure(const TransportCheckOptions& options, const TransportOptions& variant,
                                 const std::vector<Level>& levels) {
  std::string label = "Qiao residual (k2 = 1) of Dym (k1 = 2) transported by x = X - ln(U)/2";
  if (variant.interpolation == Interpolation::kMonotoneCubic) label += ", monotone cubic interpolation";
  if (variant.drop_ux_term) label = "mutation control: " + label + " with 1/u = 1/sqrt(U)";
  NumericMeasure m = measure(label, options.ladder, levels);
  if (variant.drop_ux_term)
    plateaus(m);
  else
    order_at_least(m, 1.7);
  return m;
}

TransportOptions variant_of(const TransportCheckOptions& options) {
  TransportOptions t;
  t.drop_ux_term = options.drop_ux_term;
  t.interpolation = options.interpolation;
  return t;
}

}  // namespace

NumericMeasure transport_check(const TransportCheckOptions& options) {
  const TransportOptions variant = variant_of(options);
  return transport_measure(options, variant, transport_levels(options, {variant}).front());
}

NumericMeasure mkdv_wave_check(const MiuraOptions& options) {
  const MkdvWave wave = mkdv_wave(options.speed, options.amplitude);
  const auto levels = run_ladder(options.ladder, [&](std::size_t n) {
    const MiuraResiduals r = miura_residuals(wave, n);
    return level_of(r.mkdv, r.h);
  });
  NumericMeasure m = measure("potential mKdV x_2 + x_000 - x_0^3/2 on the shooting wave (c = " + fmt(wave.speed) +
                                 ", A = " + fmt(wave.amplitude) + ")",
                             options.ladder, levels);
  order_at_least(m, 1.7);
  return m;
}

NumericMeasure miura_soliton_check(const MiuraOptions& options) {
  const MkdvWave wave = mkdv_wave(options.speed, options.amplitude);
  const auto levels = run_ladder(options.ladder, [&](std::size_t n) {
    const MiuraResiduals r = miura_residuals(wave, n, options.flip_sign);
    return level_of(r.kdv, r.h);
  });
  const std::string map = options.flip_sign ? "4M = x_0 + m" : "4M = x_0 - m";
  std::string label = "potential KdV (M_2 + M_000 + 6M_0^2)_0 with " + map + " on the mKdV wave";
  if (options.flip_sign) label = "mutation control: " + label;
  NumericMeasure m = measure(label, options.ladder, levels);
  if (options.flip_sign)
    plateaus(m);
  else
    order_at_least(m, 1.7);
  return m;
}

Report numeric_check() {
  Report rep;
  rep.task = "numeric-check";
  rep.n = 1;
  rep.add_assumption("periodic grids on [0, 2pi) for Dym and Qiao, one period for the mKdV wave");
  rep.add_assumption("positivity floor 1e-6 on U and u");
  rep.add_assumption("dt = 0.1 h^3 for the Dym flow");
  rep.add_assumption("k1 = 2, k2 = 1");

  const TransportCheckOptions transport_options;
  TransportOptions mutated;
  mutated.drop_ux_term = true;
  const std::vector<TransportOptions> variants{TransportOptions{}, mutated};
  auto transport = std::async(std::launch::async, [&] { return transport_levels(transport_options, variants); });

  {
    const Grid1D g = Grid1D::periodic(0.0, kTwoPi, 64);
    const GridField four = GridField::sample(g, [](double) { return 4.0; });
    const GridField zero = GridField::sample(g, [](double) { return 0.0; });
    const GridField one = GridField::sample(g, [](double) { return 1.0; });
    rep.residuals.push_back(exact_zero("Dym residual at U = 4, U_T = 0",
                                       norm_linf(fd_residual(Pde::kDym, 2.0, four, zero).residual.values), 0.0));
    rep.residuals.push_back(exact_zero("Qiao residual at u = 1, u_t = 0",
                                       norm_linf(fd_residual(Pde::kQiao, 1.0, one, zero).residual.values), 0.0));
    const double h = g.h();
    const Trajectory tr = integrate_dym(four, 0.1 * h * h * h, 0.01);
    rep.residuals.push_back(
        exact_zero("Dym flow from U = 4 stays at 4 up to t = 0.01", norm_linf(diff(tr.frames.back().values, four.values)), 0.0));
    const GridField u = transport_dym_to_qiao({four}).front();
    rep.residuals.push_back(exact_zero("u - 2 after transporting U = 4 (tolerance 1e-12)",
                                       norm_linf(diff(u.values, std::vector<double>(64, 2.0))), 1e-12));
    const MiuraResiduals z = miura_residuals_zero(64);
    rep.residuals.push_back(exact_zero("potential mKdV residual of x = const", norm_linf(z.mkdv), 0.0));
    rep.residuals.push_back(exact_zero("potential KdV residual of 4M = x_0 - m at x = const", norm_linf(z.kdv), 0.0));
  }

  rep.measures.push_back(manufactured_check(Pde::kDym));
  rep.measures.push_back(manufactured_check(Pde::kQiao));
  rep.measures.push_back(dym_refinement_check());
  rep.measures.push_back(dym_step_doubling_check());
  rep.measures.push_back(transport_round_trip_check());
  const auto transported = transport.get();
  rep.measures.push_back(transport_measure(transport_options, variants[0], transported[0]));
  rep.measures.push_back(transport_measure(transport_options, variants[1], transported[1]));
  rep.measures.push_back(mkdv_wave_check());
  rep.measures.push_back(miura_soliton_check());
  MiuraOptions flip;
  flip.flip_sign = true;
  rep.measures.push_back(miura_soliton_check(flip));
  return rep;
}

}  // namespace chmr::numerics
