#include "fluxsense/heat.hpp"

#include "fluxsense/errors.hpp"
#include "fluxsense/output.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <string>

namespace fluxsense {

PolarGrid::PolarGrid(int n_r, int n_theta)
    : n_r_(n_r), n_theta_(n_theta), h_r_(0.0), h_theta_(0.0) {
  if (n_r < 3)
    throw InvalidParameter("PolarGrid: n_r must be >= 3");
  if (n_theta < 4)
    throw InvalidParameter("PolarGrid: n_theta must be >= 4");
  h_r_ = 1.0 / (n_r - 0.5);
  h_theta_ = 2.0 * std::numbers::pi / n_theta;
}

HeatState HeatState::zero(const PolarGrid &grid, double t) {
  return HeatState{grid, std::vector<double>(grid.size(), 0.0), t};
}

struct HeatSolver::Factorization {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::VectorXd weight; // r_j per unknown
};

HeatSolver::HeatSolver(PolarGrid grid) : grid_(grid) {}

HeatSolver::~HeatSolver() = default;

std::shared_ptr<const HeatSolver::Factorization>
HeatSolver::factorization(double dt) const {
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(dt); it != cache_.end())
    return it->second;

  const int nr = grid_.n_r() - 1; // unknown rings
  const int nt = grid_.n_theta();
  const double hr = grid_.h_r();
  const double ht = grid_.h_theta();
  const auto n = static_cast<Eigen::Index>(grid_.interior_size());

  // Rows are scaled by r_j, which makes I - dt L symmetric.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 5);
  auto factor = std::make_shared<Factorization>();
  factor->weight.resize(n);
  for (int j = 0; j < nr; ++j) {
    const double r = grid_.r(j);
    const double r_in = j == 0 ? 0.0 : r - 0.5 * hr;
    const double r_out = r + 0.5 * hr;
    const double radial_in = dt * r_in / (hr * hr);
    const double radial_out = dt * r_out / (hr * hr);
    const double angular = dt / (r * ht * ht);
    for (int k = 0; k < nt; ++k) {
      const auto row = static_cast<Eigen::Index>(grid_.index(j, k));
      factor->weight(row) = r;
      triplets.emplace_back(row, row, r + radial_in + radial_out + 2.0 * angular);
      if (j > 0)
        triplets.emplace_back(row, grid_.index(j - 1, k), -radial_in);
      if (j + 1 < nr)
        triplets.emplace_back(row, grid_.index(j + 1, k), -radial_out);
      triplets.emplace_back(row, grid_.index(j, (k + 1) % nt), -angular);
      triplets.emplace_back(row, grid_.index(j, (k + nt - 1) % nt), -angular);
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  factor->ldlt.compute(a);
  if (factor->ldlt.info() != Eigen::Success)
    throw DivergenceError("HeatSolver: factorization failed");

  cache_.emplace(dt, factor);
  return factor;
}

void HeatSolver::step(HeatState &state, std::span<const double> f,
                      double dt) const {
  const auto factor = factorization(dt);
  const auto n = static_cast<Eigen::Index>(grid_.interior_size());
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i)
    rhs(i) = factor->weight(i) * (state.u[i] + dt * f[i]);
  const Eigen::VectorXd next = factor->ldlt.solve(rhs);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(next(i)))
      throw DivergenceError("HeatSolver: non-finite value at t=" +
                            std::to_string(state.t + dt));
    state.u[i] = next(i);
  }
  for (std::size_t i = grid_.interior_size(); i < grid_.size(); ++i)
    state.u[i] = 0.0;
  state.t += dt;
}

HeatState HeatSolver::evolve(HeatState state, const SourceFunction &source,
                             double dt, double t_end) const {
  if (!(state.grid == grid_))
    throw InvalidParameter("HeatSolver::evolve: state on a different grid");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw InvalidParameter("HeatSolver::evolve: dt must be positive");
  const double span = t_end - state.t;
  if (span < 0.0)
    throw InvalidParameter("HeatSolver::evolve: t_end before current time");
  if (span == 0.0)
    return state;

  const auto steps =
      std::max<long>(1, static_cast<long>(std::ceil(span / dt - 1e-9)));
  std::vector<double> f(grid_.size());
  for (long s = 0; s < steps; ++s) {
    double h = dt;
    if (s + 1 == steps) {
      h = t_end - state.t;
      // Rounding noise on the final step should not trigger a new factorization.
      if (std::abs(h - dt) <= 1e-9 * dt)
        h = dt;
    }
    source(state.t + h, f);
    step(state, f, h);
  }
  state.t = t_end;
  return state;
}

HeatState HeatSolver::evolve(HeatState state, const IndicatorField &chi,
                             const SolverConfig &cfg, double t_end) const {
  if (chi.n_r != grid_.n_r() || chi.n_theta != grid_.n_theta())
    throw InvalidParameter("HeatSolver::evolve: indicator on a different grid");
  if (!std::isfinite(cfg.b))
    throw InvalidParameter("HeatSolver::evolve: source strength not finite");
  std::vector<double> f(grid_.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = cfg.b * chi.values[i];
  return evolve(
      std::move(state),
      [&f](double, std::span<double> out) {
        std::copy(f.begin(), f.end(), out.begin());
      },
      cfg.dt, t_end);
}

std::vector<double> HeatSolver::apply_operator(std::span<const double> u) const {
  const int nr = grid_.n_r() - 1;
  const int nt = grid_.n_theta();
  const double hr = grid_.h_r();
  const double ht = grid_.h_theta();
  std::vector<double> out(grid_.size(), 0.0);
  for (int j = 0; j < nr; ++j) {
    const double r = grid_.r(j);
    const double r_in = j == 0 ? 0.0 : r - 0.5 * hr;
    const double r_out = r + 0.5 * hr;
    for (int k = 0; k < nt; ++k) {
      const double c = u[grid_.index(j, k)];
      const double in = j == 0 ? 0.0 : u[grid_.index(j - 1, k)];
      const double outer = u[grid_.index(j + 1, k)];
      const double radial = (r_out * (outer - c) - r_in * (c - in)) / (r * hr * hr);
      const double angular = (u[grid_.index(j, (k + 1) % nt)] - 2.0 * c +
                              u[grid_.index(j, (k + nt - 1) % nt)]) /
                             (r * r * ht * ht);
      out[grid_.index(j, k)] = radial + angular;
    }
  }
  return out;
}

HeatState evolve(const HeatState &state, const IndicatorField &chi,
                 const SolverConfig &cfg, double t_end) {
  return HeatSolver(state.grid).evolve(state, chi, cfg, t_end);
}

FluxRing boundary_flux(const HeatState &state) {
  const auto &grid = state.grid;
  if (grid.n_r() < 3)
    throw InvalidParameter("boundary_flux: need at least 3 radial nodes");
  const int jb = grid.n_r() - 1;
  FluxRing ring{std::vector<double>(grid.n_theta()), state.t};
  for (int k = 0; k < grid.n_theta(); ++k)
    ring.values[k] = (3.0 * state.at(jb, k) - 4.0 * state.at(jb - 1, k) +
                      state.at(jb - 2, k)) /
                     (2.0 * grid.h_r());
  return ring;
}

double flux_at(const FluxRing &ring, int sensor_index) {
  if (sensor_index < 0 ||
      sensor_index >= static_cast<int>(ring.values.size()))
    throw InvalidParameter("flux_at: sensor index " +
                           std::to_string(sensor_index) + " out of range");
  return ring.values[sensor_index];
}

void write_field_csv(std::ostream &out, const HeatState &state) {
  out << "r,theta,u\n";
  const auto &grid = state.grid;
  for (int j = 0; j < grid.n_r(); ++j)
    for (int k = 0; k < grid.n_theta(); ++k)
      out << format_double(grid.r(j)) << ',' << format_double(grid.theta(k))
          << ',' << format_double(state.at(j, k)) << '\n';
}

} // namespace fluxsense
