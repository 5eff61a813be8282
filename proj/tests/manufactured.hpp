#pragma once

// Smooth manufactured solution of u_t - lap u = f on the unit disc.

#include "fluxsense/heat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

namespace mms {

// u* = e^t [ cos(k r) + (r^2/2) cos(k r) cos(2 theta) ], k = pi/2; vanishes
// on r = 1 and is smooth through the pole.
constexpr double kw = std::numbers::pi / 2;

inline double mms_exact(double r, double th, double t) {
  return std::exp(t) * (std::cos(kw * r) + 0.5 * r * r * std::cos(kw * r) * std::cos(2 * th));
}

inline double mms_laplacian(double r, double th, double t) {
  const double c = std::cos(kw * r), s = std::sin(kw * r);
  const double radial = -kw * kw * c - kw * s / r;
  const double angular = -2.5 * kw * r * s - 0.5 * kw * kw * r * r * c;
  return std::exp(t) * (radial + angular * std::cos(2 * th));
}

inline fluxsense::SourceFunction mms_source(const fluxsense::PolarGrid &grid) {
  return [grid](double t, std::span<double> f) {
    for (int j = 0; j < grid.n_r(); ++j)
      for (int k = 0; k < grid.n_theta(); ++k) {
        const double r = grid.r(j), th = grid.theta(k);
        f[grid.index(j, k)] = mms_exact(r, th, t) - mms_laplacian(r, th, t);
      }
  };
}

inline fluxsense::HeatState mms_initial(const fluxsense::PolarGrid &grid) {
  auto s = fluxsense::HeatState::zero(grid);
  for (int j = 0; j < grid.n_r(); ++j)
    for (int k = 0; k < grid.n_theta(); ++k)
      s.u[grid.index(j, k)] = mms_exact(grid.r(j), grid.theta(k), 0.0);
  return s;
}

inline double mms_error(const fluxsense::HeatState &s) {
  double e = 0.0;
  const auto &g = s.grid;
  for (int j = 0; j < g.n_r(); ++j)
    for (int k = 0; k < g.n_theta(); ++k)
      e = std::max(e, std::abs(s.at(j, k) - mms_exact(g.r(j), g.theta(k), s.t)));
  return e;
}

} // namespace mms
