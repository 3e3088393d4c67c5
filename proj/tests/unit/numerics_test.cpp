#include <gtest/gtest.h>

#include <cmath>

#include "chmr/numerics/numerics.hpp"

namespace chmr::numerics {
namespace {

constexpr double kTwoPi = 2.0 * M_PI;

GridField sine_field(std::size_t n, double base, double amp) {
  return GridField::sample(Grid1D::periodic(0.0, kTwoPi, n), [=](double x) { return base + amp * std::sin(x); });
}

TEST(Grid, PeriodicSpacingLeavesOutRightEnd) {
  const Grid1D g = Grid1D::periodic(0.0, kTwoPi, 16);
  EXPECT_DOUBLE_EQ(g.h(), kTwoPi / 16.0);
  EXPECT_DOUBLE_EQ(g.x(15), 15.0 * kTwoPi / 16.0);
  EXPECT_THROW(Grid1D::periodic(0.0, kTwoPi, 8), DomainError);
}

TEST(Grid, FitOrderRecoversPowerLaw) {
  const std::vector<double> h{0.1, 0.05, 0.025}, e{3e-2, 7.5e-3, 1.875e-3};
  EXPECT_NEAR(fit_order(h, e), 2.0, 1e-12);
}

TEST(Stencils, ThirdDerivativeOfSineIsSecondOrder) {
  std::vector<double> errors, hs;
  for (std::size_t n : {32, 64, 128}) {
    const GridField f = sine_field(n, 0.0, 1.0);
    const auto d = d3(f.values, f.grid.h());
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(d[i] + std::cos(f.grid.x(i))));
    errors.push_back(e);
    hs.push_back(f.grid.h());
  }
  EXPECT_NEAR(fit_order(hs, errors), 2.0, 0.1);
}

TEST(Residuals, ConstantStatesAreExactZeros) {
  const Grid1D g = Grid1D::periodic(0.0, kTwoPi, 32);
  const GridField four = GridField::sample(g, [](double) { return 4.0; });
  const GridField zero = GridField::sample(g, [](double) { return 0.0; });
  EXPECT_EQ(norm_linf(fd_residual(Pde::kDym, 2.0, four, zero).residual.values), 0.0);
  EXPECT_EQ(norm_linf(fd_residual(Pde::kQiao, 1.0, four, zero).residual.values), 0.0);
}

TEST(Residuals, FloorViolationIsReported) {
  const GridField f = sine_field(32, 0.0, 1.0);
  EXPECT_THROW(fd_residual(Pde::kDym, 2.0, f, f), NumericError);
}

TEST(Manufactured, DymAndQiaoConvergeAtSecondOrder) {
  for (Pde pde : {Pde::kDym, Pde::kQiao}) {
    const NumericMeasure m = manufactured_check(pde);
    EXPECT_TRUE(m.passed) << m.label << " order " << m.order;
  }
}

TEST(Dym, RejectsUnstableStep) {
  const GridField u = sine_field(32, 4.0, 0.5);
  const double h = u.grid.h();
  EXPECT_THROW(integrate_dym(u, 0.2 * h * h * h, 0.01), DomainError);
}

TEST(Dym, ConstantStateIsStationary) {
  const GridField u = sine_field(32, 4.0, 0.0);
  const double h = u.grid.h();
  const Trajectory tr = integrate_dym(u, 0.1 * h * h * h, 0.01);
  EXPECT_EQ(norm_linf(tr.frames.back().values), 4.0);
  EXPECT_FALSE(tr.floor_violated);
}

TEST(Dym, SamplesLandOnRequestedTimes) {
  const GridField u = sine_field(32, 4.0, 0.5);
  const double h = u.grid.h();
  DymOptions o;
  o.sample_times = {0.001, 0.0025};
  const Trajectory tr = integrate_dym(u, 0.1 * h * h * h, 0.0025, o);
  ASSERT_EQ(tr.frames.size(), 2u);
  EXPECT_NEAR(tr.frames[0].time, 0.001, 1e-15);
  EXPECT_NEAR(tr.frames[1].time, 0.0025, 1e-15);
}

TEST(Dym, FloorViolationStopsTheRun) {
  const GridField u = sine_field(32, 1.0, 0.999);
  const double h = u.grid.h();
  DymOptions o;
  o.floor = 1e-3;
  const Trajectory tr = integrate_dym(u, 0.1 * h * h * h, 1.0, o);
  EXPECT_TRUE(tr.floor_violated);
}

TEST(Dym, StepDoublingAndRefinement) {
  const NumericMeasure sd = dym_step_doubling_check({16, 32, 64}, 0.005);
  EXPECT_TRUE(sd.passed) << sd.linf.back();
  const NumericMeasure rf = dym_refinement_check({16, 32, 64}, 256, 0.005);
  EXPECT_TRUE(rf.passed) << rf.order;
}

TEST(Transport, ConstantMapsToConstant) {
  const GridField U = sine_field(16, 4.0, 0.0);
  const GridField u = transport_dym_to_qiao({U}).front();
  for (double v : u.values) EXPECT_NEAR(v, 2.0, 1e-14);
}

TEST(Transport, RoundTripIsSpectrallyAccurate) {
  const NumericMeasure m = transport_round_trip_check();
  EXPECT_TRUE(m.passed);
  EXPECT_LT(m.linf.back(), 1e-12);
}

TEST(Transport, NonMonotoneMapIsRejected) {
  // U_X/(2U) exceeds 1 where U = 1 + 0.9 sin(10 X) climbs.
  const GridField U = GridField::sample(Grid1D::periodic(0.0, kTwoPi, 256),
                                        [](double x) { return 1.0 + 0.9 * std::sin(10.0 * x); });
  EXPECT_THROW(transport_dym_to_qiao({U}), NumericError);
}

TEST(Transport, NonPeriodicGridIsRejected) {
  const GridField U = GridField::sample(Grid1D::compact(0.0, 1.0, 16), [](double) { return 1.0; });
  EXPECT_THROW(transport_dym_to_qiao({U}), DomainError);
}

TransportCheckOptions coarse_transport() {
  TransportCheckOptions o;
  o.ladder = {64, 128, 256};
  o.t_end = 0.02;
  return o;
}

TEST(Transport, QiaoResidualConvergesOnCoarseLadder) {
  const NumericMeasure m = transport_check(coarse_transport());
  EXPECT_TRUE(m.passed) << m.order;
}

TEST(Transport, DroppingTheDerivativeTermPlateaus) {
  TransportCheckOptions o = coarse_transport();
  o.drop_ux_term = true;
  const NumericMeasure m = transport_check(o);
  EXPECT_TRUE(m.passed) << m.linf.front() << " " << m.linf.back();
}

TEST(Transport, MonotoneCubicInterpolationDoesNotConverge) {
  TransportCheckOptions o = coarse_transport();
  o.interpolation = Interpolation::kMonotoneCubic;
  const NumericMeasure m = transport_check(o);
  EXPECT_FALSE(m.passed) << m.order;
}

TEST(Wave, ShootingRejectsOpenOrbits) {
  EXPECT_THROW(mkdv_wave(1.0, 1.0), DomainError);
  EXPECT_THROW(mkdv_wave(-1.0, 2.0), DomainError);
}

TEST(Wave, SampledWaveIsEvenAndPeriodic) {
  const MkdvWave wave = mkdv_wave(-1.0, 1.0);
  EXPECT_GT(wave.period, kTwoPi);
  const GridField w = wave.sample(64);
  EXPECT_DOUBLE_EQ(w.values[0], 1.0);
  for (std::size_t i = 1; i < 32; ++i) EXPECT_NEAR(w.values[i], w.values[64 - i], 1e-10);
  EXPECT_NEAR(w.values[32], -1.0, 1e-10);
}

TEST(Wave, MiuraMapAndItsMutation) {
  MiuraOptions o;
  o.ladder = {64, 128, 256};
  EXPECT_TRUE(mkdv_wave_check(o).passed);
  EXPECT_TRUE(miura_soliton_check(o).passed);
  o.flip_sign = true;
  EXPECT_TRUE(miura_soliton_check(o).passed);
}

TEST(Wave, ZeroWaveGivesZeroResiduals) {
  const MiuraResiduals z = miura_residuals_zero(32);
  EXPECT_EQ(norm_linf(z.mkdv), 0.0);
  EXPECT_EQ(norm_linf(z.kdv), 0.0);
}

}  // namespace
}  // namespace chmr::numerics
