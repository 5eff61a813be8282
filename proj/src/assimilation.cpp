#include "fluxsense/assimilation.hpp"

#include "fluxsense/errors.hpp"

#include <chrono>
#include <cmath>

namespace fluxsense {

Observation SyntheticData::observe(std::size_t time_index,
                                   int sensor_index) const {
  if (time_index >= noisy.size())
    throw InvalidParameter("SyntheticData::observe: time index out of range");
  return {times[time_index], sensor_index,
          flux_at(noisy[time_index], sensor_index)};
}

double window_dt(const std::vector<double> &times, std::size_t i,
                 int steps_per_window) {
  const double t0 = i == 0 ? 0.0 : times[i - 1];
  return (times[i] - t0) / steps_per_window;
}

namespace {

IndicatorField indicator_or_throw(SourceKind kind, const UnconstrainedParams &xi,
                                  const PolarGrid &grid) {
  auto chi = rasterize(make_source(kind, xi), grid);
  if (!chi)
    throw InvalidParameter("true source is not admissible");
  return *chi;
}

} // namespace

SyntheticData synthesize_observations(const TruthSpec &truth,
                                      const std::vector<double> &times,
                                      const HeatSolver &solver,
                                      int steps_per_window) {
  const auto &grid = solver.grid();
  const auto chi = indicator_or_throw(truth.kind, truth.xi, grid);
  SyntheticData data;
  data.times = times;
  data.sigma = truth.sigma;
  auto state = HeatState::zero(grid);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const SolverConfig cfg{window_dt(times, i, steps_per_window), truth.b};
    state = solver.evolve(std::move(state), chi, cfg, times[i]);
    auto exact = boundary_flux(state);
    auto noisy = exact;
    for (int a = 0; a < grid.n_theta(); ++a) {
      auto rng = substream(truth.seed, "data-noise",
                           {static_cast<std::uint64_t>(i),
                            static_cast<std::uint64_t>(a)});
      noisy.values[a] += truth.sigma * standard_normal(rng);
    }
    data.exact.push_back(std::move(exact));
    data.noisy.push_back(std::move(noisy));
  }
  return data;
}

PdeForwardModel::PdeForwardModel(std::shared_ptr<const HeatSolver> solver,
                                 SourceKind kind, double b, HeatState start,
                                 std::vector<Checkpoint> checkpoints,
                                 std::vector<Probe> probes)
    : solver_(std::move(solver)), kind_(kind), b_(b), start_(std::move(start)),
      checkpoints_(std::move(checkpoints)), probes_(std::move(probes)) {
  if (checkpoints_.empty())
    throw InvalidParameter("PdeForwardModel: no checkpoints");
  for (const auto &p : probes_)
    if (p.checkpoint >= checkpoints_.size() || p.sensor_index < 0 ||
        p.sensor_index >= solver_->grid().n_theta())
      throw InvalidParameter("PdeForwardModel: probe out of range");
}

std::optional<ForwardResult>
PdeForwardModel::evaluate(const UnconstrainedParams &xi) const {
  const auto chi = rasterize(make_source(kind_, xi), solver_->grid());
  if (!chi)
    return std::nullopt;
  ForwardResult out;
  out.predictions.resize(static_cast<Eigen::Index>(probes_.size()));
  HeatState state = start_;
  for (std::size_t c = 0; c < checkpoints_.size(); ++c) {
    state = solver_->evolve(std::move(state), *chi,
                            SolverConfig{checkpoints_[c].dt, b_},
                            checkpoints_[c].time);
    const auto ring = boundary_flux(state);
    for (std::size_t i = 0; i < probes_.size(); ++i)
      if (probes_[i].checkpoint == c)
        out.predictions(static_cast<Eigen::Index>(i)) =
            flux_at(ring, probes_[i].sensor_index);
    if (c + 1 == checkpoints_.size())
      out.ring = ring.values;
  }
  out.field = std::move(state.u);
  return out;
}

HeatState mean_field(const PosteriorEnsemble &ensemble, double burn_fraction,
                     const PolarGrid &grid, double t) {
  if (ensemble.fields.empty())
    throw InvalidParameter("mean_field: ensemble stores no fields");
  const auto first = ensemble.burn_in_index(burn_fraction);
  HeatState out = HeatState::zero(grid, t);
  std::size_t used = 0;
  for (std::size_t i = 0; i < ensemble.fields.size(); ++i) {
    if (ensemble.field_sample_index[i] < first)
      continue;
    for (std::size_t n = 0; n < out.u.size(); ++n)
      out.u[n] += ensemble.fields[i][n];
    ++used;
  }
  if (used == 0) {
    // Very short chains: average everything that was stored.
    for (const auto &f : ensemble.fields)
      for (std::size_t n = 0; n < out.u.size(); ++n)
        out.u[n] += f[n];
    used = ensemble.fields.size();
  }
  for (auto &v : out.u)
    v /= static_cast<double>(used);
  return out;
}

AssimilationDriver::AssimilationDriver(ExperimentConfig config)
    : config_(std::move(config)) {
  config_.validate();
  solver_ = std::make_shared<const HeatSolver>(
      PolarGrid(config_.n_r, config_.n_theta));
}

SyntheticData AssimilationDriver::synthesize() const {
  const TruthSpec truth{config_.source_kind, config_.truth, config_.b,
                        config_.sigma, config_.seed};
  return synthesize_observations(truth, config_.times, *solver_,
                                 config_.steps_per_window);
}

RoundRecord AssimilationDriver::run_round(int k, const HeatState &restart,
                                          const ObservationSet &obs,
                                          const std::vector<Probe> &probes,
                                          const SensorPair &sensors,
                                          const UnconstrainedParams &initial_xi,
                                          Rng &rng) const {
  const auto start_clock = std::chrono::steady_clock::now();
  const auto &times = config_.times;
  const auto idx = static_cast<std::size_t>(k);
  const double t0 = k == 0 ? 0.0 : times[idx - 1];
  obs.validate(config_.n_theta);

  std::vector<Checkpoint> checkpoints;
  HeatState start = restart;
  if (config_.data_mode == DataMode::PerRound) {
    checkpoints.push_back(
        {times[idx], window_dt(times, idx, config_.steps_per_window)});
  } else {
    start = HeatState::zero(grid());
    for (std::size_t j = 0; j <= idx; ++j)
      checkpoints.push_back({times[j], window_dt(times, j, config_.steps_per_window)});
  }
  const PdeForwardModel forward(solver_, config_.source_kind, config_.b,
                                std::move(start), std::move(checkpoints), probes);

  auto ensemble = run_chain(initial_xi, obs, config_.prior(), config_.sampler,
                            forward, rng);
  auto restart_field = mean_field(ensemble, config_.burn_in, grid(), times[idx]);
  RoundRecord rec{.round = k,
                  .t0 = t0,
                  .t_end = times[idx],
                  .sensors = sensors,
                  .observations = obs,
                  .ensemble = std::move(ensemble),
                  .summary = {},
                  .eta_mean = std::nullopt,
                  .flux_variance = {},
                  .restart_field = std::move(restart_field)};
  rec.summary = summarize(rec.ensemble, config_.burn_in);

  const auto first = rec.ensemble.burn_in_index(config_.burn_in);
  if (config_.source_kind == SourceKind::Circle) {
    Eigen::Vector2d eta = Eigen::Vector2d::Zero();
    for (auto i = first; i < rec.ensemble.size(); ++i)
      eta += circle_from_unconstrained(rec.ensemble.samples[i]).eta;
    rec.eta_mean = eta / static_cast<double>(rec.ensemble.size() - first);
  }
  rec.flux_variance = flux_variance_map(
      std::span<const std::vector<double>>(rec.ensemble.flux_rings).subspan(first));
  rec.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start_clock)
                         .count();
  return rec;
}

SensorPair AssimilationDriver::next_sensors(const RoundRecord &record,
                                            int k) const {
  switch (config_.strategy) {
  case StrategyKind::Fixed:
    return record.sensors;
  case StrategyKind::RandomEachRound: {
    auto rng = substream(config_.seed, "strategy-round",
                         {static_cast<std::uint64_t>(k)});
    return random_rule(config_.n_theta, rng);
  }
  case StrategyKind::PosteriorAngle: {
    const auto first = record.ensemble.burn_in_index(config_.burn_in);
    std::vector<double> omegas;
    for (auto i = first; i < record.ensemble.size(); ++i)
      omegas.push_back(circle_from_unconstrained(record.ensemble.samples[i]).omega);
    return posterior_angle_rule(omegas, config_.n_theta, config_.angle_mean);
  }
  case StrategyKind::MaxFluxVariance:
    return top_two(record.flux_variance);
  }
  throw InvalidParameter("next_sensors: unknown strategy");
}

ExperimentResult AssimilationDriver::run() const {
  ExperimentResult result;
  result.config = config_;
  const auto data = synthesize();
  const auto p = config_.parameter_count();

  HeatState restart = HeatState::zero(grid());
  UnconstrainedParams initial = UnconstrainedParams::Zero(p);
  SensorPair sensors = config_.initial_sensors;
  std::vector<SensorPair> history;
  bool stop_after = false;

  for (std::size_t k = 0; k < config_.times.size(); ++k) {
    ObservationSet obs;
    obs.sigma = config_.sigma;
    std::vector<Probe> probes;
    history.push_back(sensors);
    if (config_.data_mode == DataMode::PerRound) {
      for (int s : {sensors.first, sensors.second}) {
        obs.entries.push_back(data.observe(k, s));
        probes.push_back({0, s});
      }
    } else {
      for (std::size_t j = 0; j <= k; ++j)
        for (int s : {history[j].first, history[j].second}) {
          obs.entries.push_back(data.observe(j, s));
          probes.push_back({j, s});
        }
    }

    auto rng = substream(config_.seed, "chain-round",
                         {static_cast<std::uint64_t>(k)});
    std::optional<RoundRecord> round;
    try {
      round = run_round(static_cast<int>(k), restart, obs, probes, sensors,
                      initial, rng);
    } catch (const std::exception &e) {
      result.error = "round " + std::to_string(k + 1) + ": " + e.what();
      return result;
    }
    auto &rec = *round;
    rec.stopped = stop_after;
    restart = rec.restart_field;
    initial = rec.summary.mean;
    result.rounds.push_back(std::move(rec));
    if (stop_after) {
      result.stopped_by_cycle = true;
      break;
    }
    if (k + 1 < config_.times.size()) {
      const auto next = next_sensors(result.rounds.back(), static_cast<int>(k));
      if (config_.strategy == StrategyKind::MaxFluxVariance &&
          should_stop(history, next))
        stop_after = true;
      sensors = next;
    }
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig &config) {
  return AssimilationDriver(config).run();
}

ForwardDump run_forward(const ExperimentConfig &config) {
  config.validate();
  const HeatSolver solver(PolarGrid(config.n_r, config.n_theta));
  const auto chi =
      indicator_or_throw(config.source_kind, config.truth, solver.grid());
  std::vector<FluxRing> rings;
  auto state = HeatState::zero(solver.grid());
  for (std::size_t i = 0; i < config.times.size(); ++i) {
    const double dt = window_dt(config.times, i, config.steps_per_window);
    const double t0 = state.t;
    for (int s = 1; s <= config.steps_per_window; ++s) {
      const double target =
          s == config.steps_per_window ? config.times[i] : t0 + s * dt;
      state = solver.evolve(std::move(state), chi, SolverConfig{dt, config.b},
                            target);
      rings.push_back(boundary_flux(state));
    }
  }
  return ForwardDump{std::move(rings), std::move(state)};
}

} // namespace fluxsense
