#pragma once

#include "fluxsense/geometry.hpp"
#include "fluxsense/grid.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <vector>

namespace fluxsense {

// Temperature over every grid node (including the Dirichlet ring) at time t.
struct HeatState {
  PolarGrid grid;
  std::vector<double> u;
  double t = 0.0;

  static HeatState zero(const PolarGrid &grid, double t = 0.0);

  double at(int j, int k) const { return u[grid.index(j, k)]; }
};

struct SolverConfig {
  double dt = 0.01;
  double b = 1.0; // source strength
};

// Outward normal derivative on r = 1 at every angular node.
struct FluxRing {
  std::vector<double> values;
  double t = 0.0;
};

// Fills the right-hand side at every grid node for time t.
using SourceFunction = std::function<void(double t, std::span<double> f)>;

// Backward-Euler integrator for u_t = (1/r)(r u_r)_r + (1/r^2) u_thth + f on
// the unit disc with u = 0 on r = 1.
//
// The innermost ring uses the conservative stencil with zero flux through
// r = 0. Each step solves the r-weighted (hence symmetric positive
// definite) system with a sparse LDL^T factorization, cached per step size.
// evolve() is const and safe to call from several threads.
class HeatSolver {
public:
  explicit HeatSolver(PolarGrid grid);
  ~HeatSolver();

  const PolarGrid &grid() const { return grid_; }

  // Steps of size cfg.dt, the last one shortened to land on t_end.
  HeatState evolve(HeatState state, const IndicatorField &chi,
                   const SolverConfig &cfg, double t_end) const;

  HeatState evolve(HeatState state, const SourceFunction &source, double dt,
                   double t_end) const;

  // Discrete spatial operator applied to a field (boundary ring ignored,
  // output is zero there). Used by the consistency tests.
  std::vector<double> apply_operator(std::span<const double> u) const;

private:
  struct Factorization;

  std::shared_ptr<const Factorization> factorization(double dt) const;
  void step(HeatState &state, std::span<const double> f, double dt) const;

  PolarGrid grid_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const Factorization>> cache_;
};

// Convenience wrapper building a one-shot solver.
HeatState evolve(const HeatState &state, const IndicatorField &chi,
                 const SolverConfig &cfg, double t_end);

// Second-order one-sided difference (3u(1) - 4u(1-h) + u(1-2h)) / (2h).
FluxRing boundary_flux(const HeatState &state);

// Ring entry at an angular node index; the sensor angle is index * h_theta.
double flux_at(const FluxRing &ring, int sensor_index);

// Debug dump with columns r,theta,u.
void write_field_csv(std::ostream &out, const HeatState &state);

} // namespace fluxsense
