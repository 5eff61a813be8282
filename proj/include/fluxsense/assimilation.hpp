#pragma once

#include "fluxsense/bayes.hpp"
#include "fluxsense/config.hpp"
#include "fluxsense/heat.hpp"
#include "fluxsense/sensors.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fluxsense {

struct TruthSpec {
  SourceKind kind = SourceKind::Circle;
  UnconstrainedParams xi;
  double b = 1.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Exact and noisy boundary flux rings of the true source at every
// observation time. The noise on node a at time index i is a function of
// (seed, i, a) only, so any two strategies observing the same node at the
// same time see the same value.
struct SyntheticData {
  std::vector<double> times;
  std::vector<FluxRing> exact;
  std::vector<FluxRing> noisy;
  double sigma = 0.0;

  Observation observe(std::size_t time_index, int sensor_index) const;
};

// Time step used inside the window ending at times[i].
double window_dt(const std::vector<double> &times, std::size_t i,
                 int steps_per_window);

SyntheticData synthesize_observations(const TruthSpec &truth,
                                      const std::vector<double> &times,
                                      const HeatSolver &solver,
                                      int steps_per_window);

// Where each observation entry comes from in the forward solve.
struct Probe {
  std::size_t checkpoint = 0;
  int sensor_index = 0;
};

struct Checkpoint {
  double time = 0.0;
  double dt = 0.0;
};

// Forward map xi -> boundary flux: rasterize the source, run the heat
// solver from a frozen start state through the checkpoints, and read the
// probed ring entries. Ring and field are those at the last checkpoint.
class PdeForwardModel : public ForwardModel {
public:
  PdeForwardModel(std::shared_ptr<const HeatSolver> solver, SourceKind kind,
                  double b, HeatState start, std::vector<Checkpoint> checkpoints,
                  std::vector<Probe> probes);

  std::optional<ForwardResult>
  evaluate(const UnconstrainedParams &xi) const override;

private:
  std::shared_ptr<const HeatSolver> solver_;
  SourceKind kind_;
  double b_;
  HeatState start_;
  std::vector<Checkpoint> checkpoints_;
  std::vector<Probe> probes_;
};

struct RoundRecord {
  int round = 0; // 0-based
  double t0 = 0.0;
  double t_end = 0.0;
  SensorPair sensors;
  ObservationSet observations;
  PosteriorEnsemble ensemble;
  PosteriorSummary summary;
  std::optional<Eigen::Vector2d> eta_mean; // circle sources only
  FluxVarianceMap flux_variance;
  HeatState restart_field;
  bool stopped = false;
  double wall_seconds = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RoundRecord> rounds;
  bool stopped_by_cycle = false;
  std::optional<std::string> error; // set when a round failed; rounds holds the completed ones
};

// One Bayesian update of the sequential loop.
class AssimilationDriver {
public:
  explicit AssimilationDriver(ExperimentConfig config);

  const ExperimentConfig &config() const { return config_; }
  const PolarGrid &grid() const { return solver_->grid(); }

  SyntheticData synthesize() const;

  // Runs the chain for round k over (t0, times[k]] from the frozen restart
  // field and summarizes it.
  RoundRecord run_round(int k, const HeatState &restart,
                        const ObservationSet &obs,
                        const std::vector<Probe> &probes,
                        const SensorPair &sensors,
                        const UnconstrainedParams &initial_xi, Rng &rng) const;

  // The full sequential loop: observe, sample, restart from the mean field,
  // move the sensors, and stop early when the variance rule starts cycling.
  ExperimentResult run() const;

  // Next sensor pair according to the configured strategy.
  SensorPair next_sensors(const RoundRecord &record, int k) const;

private:
  ExperimentConfig config_;
  std::shared_ptr<const HeatSolver> solver_;
};

ExperimentResult run_experiment(const ExperimentConfig &config);

// Mean of the post-burn-in stored fields of an ensemble.
HeatState mean_field(const PosteriorEnsemble &ensemble, double burn_fraction,
                     const PolarGrid &grid, double t);

// Noise-free forward solve of the true source with the ring recorded after
// every time step.
struct ForwardDump {
  std::vector<FluxRing> rings;
  HeatState final_state;
};

ForwardDump run_forward(const ExperimentConfig &config);

} // namespace fluxsense
