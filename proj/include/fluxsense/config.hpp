#pragma once

#include "fluxsense/bayes.hpp"
#include "fluxsense/geometry.hpp"
#include "fluxsense/sensors.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fluxsense {

// Which observations enter a round's likelihood.
enum class DataMode {
  PerRound,   // the two values observed at the end of the current window
  Cumulative  // every observation up to the end of the current window
};

std::string_view to_string(DataMode mode);
DataMode data_mode_from_string(std::string_view name);

struct ConfigError : std::runtime_error {
  ConfigError(int line, const std::string &message);
  int line; // 0 when not tied to a line
};

struct ExperimentConfig {
  SourceKind source_kind = SourceKind::Circle;
  int harmonics = 2;
  Eigen::VectorXd truth = Eigen::Vector2d(0.0, -1.0);

  int n_r = 33;
  int n_theta = 36;

  double b = 50.0;
  int steps_per_window = 50;

  double sigma = 0.05;

  ProposalConfig sampler;
  double burn_in = 0.2;

  std::vector<double> times{0.5, 1.0, 1.5};
  SensorPair initial_sensors{22, 30};
  StrategyKind strategy = StrategyKind::PosteriorAngle;
  AngleMean angle_mean = AngleMean::Arithmetic;
  DataMode data_mode = DataMode::PerRound;

  std::uint64_t seed = 1;
  std::string output_dir = "out";

  int parameter_count() const;
  PriorSpec prior() const;
  // Checks every invariant of the modules the configuration feeds.
  void validate() const;

  bool operator==(const ExperimentConfig &other) const;
};

// Flat "section.key = value" text; '#' starts a comment. Unknown or
// duplicate keys are errors. Missing keys keep their defaults.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);

// Canonical text form: every key, fixed order, shortest round-trip numbers.
std::string serialize_config(const ExperimentConfig &config);

std::vector<std::string> preset_names();
ExperimentConfig preset(std::string_view name);

} // namespace fluxsense
