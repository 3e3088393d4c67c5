#include <algorithm>
#include <cmath>

#include "chmr/numerics/numerics.hpp"

namespace chmr::numerics {

namespace {

void require_points(std::size_t points) {
  if (points < 16) throw DomainError("a grid needs at least 16 points, got " + std::to_string(points));
}

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

template <typename F>
std::vector<double> stencil(const std::vector<double>& f, F&& at) {
  const std::size_t n = f.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = [&](std::ptrdiff_t k) { return f[wrap(static_cast<std::ptrdiff_t>(i) + k, n)]; };
    out[i] = at(v);
  }
  return out;
}

std::vector<double> transformed(const GridField& field, Pde pde, double floor) {
  std::vector<double> g(field.values.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = field.values[i];
    if (!(v > floor))
      throw NumericError("field value " + std::to_string(v) + " at node " + std::to_string(i) +
                         " is below the positivity floor");
    g[i] = pde == Pde::kDym ? 1.0 / std::sqrt(v) : 1.0 / (2.0 * v * v);
  }
  return g;
}

}  // namespace

Grid1D Grid1D::periodic(double x_min, double x_max, std::size_t points) {
  require_points(points);
  if (!(x_max > x_min)) throw DomainError("grid interval is empty");
  return {x_min, x_max, points, Boundary::kPeriodic};
}

Grid1D Grid1D::compact(double x_min, double x_max, std::size_t points) {
  require_points(points);
  if (!(x_max > x_min)) throw DomainError("grid interval is empty");
  return {x_min, x_max, points, Boundary::kCompactSupport};
}

double Grid1D::h() const {
  const double n = static_cast<double>(boundary == Boundary::kPeriodic ? points : points - 1);
  return (x_max - x_min) / n;
}

GridField GridField::sample(const Grid1D& grid, const std::function<double(double)>& f, double time) {
  GridField out{grid, std::vector<double>(grid.points), time};
  for (std::size_t i = 0; i < grid.points; ++i) out.values[i] = f(grid.x(i));
  return out;
}

double norm_linf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm_l2(const std::vector<double>& v, double h) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(h * s);
}

double fit_order(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size() || h.size() < 2) throw DomainError("order fit needs matching samples");
  const double n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(std::max(error[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> d1(const std::vector<double>& f, double h) {
  return stencil(f, [&](auto v) { return (v(1) - v(-1)) / (2.0 * h); });
}

std::vector<double> d2(const std::vector<double>& f, double h) {
  return stencil(f, [&](auto v) { return (v(1) - 2.0 * v(0) + v(-1)) / (h * h); });
}

std::vector<double> d3(const std::vector<double>& f, double h) {
  return stencil(f, [&](auto v) { return (v(2) - 2.0 * v(1) + 2.0 * v(-1) - v(-2)) / (2.0 * h * h * h); });
}

std::vector<double> fd_right_side(Pde pde, double k, const GridField& field) {
  const std::vector<double> g = transformed(field, pde, 0.0);
  const double h = field.grid.h();
  const auto g3 = d3(g, h), g1 = d1(g, h);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = k * (g3[i] - g1[i]);
  return out;
}

FdResidual fd_residual(Pde pde, double k, const GridField& field, const GridField& time_derivative, double floor) {
  if (field.values.size() != field.grid.points || time_derivative.values.size() != field.grid.points)
    throw DomainError("fields are not sampled on the same grid");
  transformed(field, pde, floor);
  const std::vector<double> rhs = fd_right_side(pde, k, field);
  FdResidual out{{field.grid, std::vector<double>(rhs.size()), field.time}, 0};
  for (std::size_t i = 0; i < rhs.size(); ++i) out.residual.values[i] = time_derivative.values[i] - rhs[i];
  if (field.grid.boundary == Boundary::kCompactSupport) {
    out.trimmed = 2;
    for (std::size_t i = 0; i < 2; ++i) {
      out.residual.values[i] = 0.0;
      out.residual.values[rhs.size() - 1 - i] = 0.0;
    }
  }
  return out;
}

}  // namespace chmr::numerics
