#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "chmr/errors.hpp"
#include "chmr/report.hpp"

namespace chmr::numerics {

/// Raised when a numeric precondition fails at run time (positivity floor,
/// monotone reciprocal map, ODE oracle).
class NumericError : public Error {
 public:
  using Error::Error;
};

enum class Boundary { kPeriodic, kCompactSupport };

struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t points = 16;
  Boundary boundary = Boundary::kPeriodic;

  /// Periodic grids leave out the right end point: h = (x_max - x_min)/points.
  static Grid1D periodic(double x_min, double x_max, std::size_t points);
  static Grid1D compact(double x_min, double x_max, std::size_t points);
  double h() const;
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * h(); }
  double length() const { return x_max - x_min; }
};

struct GridField {
  Grid1D grid;
  std::vector<double> values;
  double time = 0.0;

  static GridField sample(const Grid1D& grid, const std::function<double(double)>& f, double time = 0.0);
};

double norm_linf(const std::vector<double>& v);
/// Discrete L2 norm sqrt(h sum v^2).
double norm_l2(const std::vector<double>& v, double h);
/// Least-squares slope of log(error) against log(h); positive for converging errors.
double fit_order(const std::vector<double>& h, const std::vector<double>& error);

/// Second-order centered differences on a periodic grid.
std::vector<double> d1(const std::vector<double>& f, double h);
std::vector<double> d2(const std::vector<double>& f, double h);
/// Five-point stencil (f[i+2] - 2f[i+1] + 2f[i-1] - f[i-2]) / (2h^3).
std::vector<double> d3(const std::vector<double>& f, double h);

enum class Pde {
  kDym,   // U_T = k[(U^-1/2)_XXX - (U^-1/2)_X]
  kQiao,  // u_t = k[(1/(2u^2))_xxx - (1/(2u^2))_x]
};

struct FdResidual {
  GridField residual;
  /// Points at each end left out on compact-support grids, where the stencil would leave the grid.
  std::size_t trimmed = 0;
};

/// Pointwise residual time_derivative - right side of the PDE.
FdResidual fd_residual(Pde pde, double k, const GridField& field, const GridField& time_derivative,
                       double floor = 1e-6);
/// Semi-discrete right side of the PDE.
std::vector<double> fd_right_side(Pde pde, double k, const GridField& field);

struct DymOptions {
  double k = 2.0;
  double stability_c = 0.1;  // dt <= c h^3
  double floor = 1e-6;
  std::vector<double> sample_times;  // defaults to {t_end}
};

struct Trajectory {
  std::vector<GridField> frames;
  std::size_t steps = 0;
  bool floor_violated = false;  // frames end at the last valid state
};

/// Classical RK4 in time on the periodic order-2 semi-discretization.
Trajectory integrate_dym(const GridField& u0, double dt, double t_end, const DymOptions& options = {});
/// Max-norm difference between one step of size dt and two steps of dt/2.
double dym_step_doubling_error(const GridField& u, double dt, double k = 2.0);

enum class Interpolation {
  /// Trigonometric interpolant of U in X, Newton solve for the X of each uniform x-node.
  kSpectral,
  /// Monotone piecewise cubic Hermite through the nonuniform (x_i, u_i) samples.
  kMonotoneCubic,
};

struct TransportOptions {
  /// Mutation control: drop the U_X term from 1/u = (1/sqrt(U))(1 - U_X/(2U)).
  bool drop_ux_term = false;
  double floor = 1e-6;
  Interpolation interpolation = Interpolation::kSpectral;
};

/// Sends each Dym frame through x = X - ln(U)/2, 1/u = (1/sqrt(U))(1 - U_X/(2U))
/// onto the uniform x-grid with the same nodes as the X-grid.
std::vector<GridField> transport_dym_to_qiao(const std::vector<GridField>& frames, const TransportOptions& options = {});
/// Inverse map: P from P_x + P = u, X = x + ln P, U = P^2 back on the uniform X-grid.
GridField transport_qiao_to_dym(const GridField& u);

/// Trigonometric interpolant of a periodic grid field, evaluated with its derivative.
class SpectralInterpolant {
 public:
  explicit SpectralInterpolant(const GridField& f);
  /// Value and first derivative at an arbitrary point.
  std::pair<double, double> operator()(double x) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Periodic traveling wave x(z0 - c z2) of x_z2 + x_z0z0z0 - x_z0^3/2 = 0, w = x_z0.
struct MkdvWave {
  double speed = -1.0;
  double amplitude = 1.0;
  double period = 0.0;
  /// w sampled on a periodic grid over one period.
  GridField sample(std::size_t points) const;
};
/// Shoots w'' = c w + w^3/2 from w = amplitude, w' = 0 to the next turning point.
MkdvWave mkdv_wave(double speed, double amplitude);

struct MiuraOptions {
  double speed = -1.0;
  double amplitude = 1.0;
  std::vector<std::size_t> ladder{256, 512, 1024};
  /// Mutation control: 4M = x_z0 + m.
  bool flip_sign = false;
};

/// Potential mKdV and potential KdV residuals on the wave at one resolution.
struct MiuraResiduals {
  std::vector<double> mkdv, kdv;
  double h = 0.0;
};
MiuraResiduals miura_residuals(const MkdvWave& wave, std::size_t points, bool flip_sign = false);
/// Evaluates the KdV residual with 4M = x_z0 - m from a zero wave.
MiuraResiduals miura_residuals_zero(std::size_t points);

/// Potential KdV residual order on the wave; with flip_sign the measure passes when the residual plateaus.
NumericMeasure miura_soliton_check(const MiuraOptions& options = {});
/// Potential mKdV residual order of the sampled wave itself.
NumericMeasure mkdv_wave_check(const MiuraOptions& options = {});
/// Manufactured test: field 2 + sin on [0, 2pi), time derivative set to the exact right side
/// computed by the jet kernel; the residual is the pure stencil error.
NumericMeasure manufactured_check(Pde pde, const std::vector<std::size_t>& ladder = {64, 128, 256});
NumericMeasure dym_manufactured_check(const std::vector<std::size_t>& ladder = {64, 128, 256});
/// Dym trajectories from 4 + sin(X)/2 to t_end compared with a fine-grid reference at the coarse nodes.
NumericMeasure dym_refinement_check(const std::vector<std::size_t>& ladder = {32, 64, 128},
                                    std::size_t reference = 512, double t_end = 0.01);
/// Largest RK4 step-doubling estimate along trajectories to t_end, against 10x the per-step tolerance.
NumericMeasure dym_step_doubling_check(const std::vector<std::size_t>& ladder = {32, 64, 128}, double t_end = 0.01,
                                       double tolerance = 1e-12);
/// Transport then its inverse on U = 4 + sin(X)/2; passes when the error stays below h^3.
NumericMeasure transport_round_trip_check(const std::vector<std::size_t>& ladder = {64, 128, 256});

struct TransportCheckOptions {
  std::vector<std::size_t> ladder{256, 512, 1024};
  double t_end = 2e-3;
  double stability_c = 0.1;
  bool drop_ux_term = false;
  Interpolation interpolation = Interpolation::kSpectral;
};
/// Integrates Dym from 4 + sin(X)/2, transports, and measures the Qiao residual at t_end.
/// With drop_ux_term the measure passes when the residual plateaus.
NumericMeasure transport_check(const TransportCheckOptions& options = {});

/// The full numeric suite as one report.
Report numeric_check();

}  // namespace chmr::numerics
