#pragma once

#include "fluxsense/bayes.hpp"
#include "fluxsense/rng.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace fluxsense {

// Two boundary sensors given as angular node indices.
struct SensorPair {
  int first = 0;
  int second = 1;

  bool operator==(const SensorPair &) const = default;
  bool same_locations(const SensorPair &other) const {
    return (first == other.first && second == other.second) ||
           (first == other.second && second == other.first);
  }
};

enum class StrategyKind { Fixed, RandomEachRound, PosteriorAngle, MaxFluxVariance };

std::string_view to_string(StrategyKind kind);
StrategyKind strategy_from_string(std::string_view name);

enum class AngleMean { Arithmetic, Circular };

std::string_view to_string(AngleMean mean);
AngleMean angle_mean_from_string(std::string_view name);

// Mean of angle samples; circular means are reported in [0, 2 pi).
double mean_angle(std::span<const double> omega_samples, AngleMean mean);

// (floor(w/h), ceil(w/h)) mod n_theta for the mean angle w; an exact
// multiple k of h gives (k, k+1).
SensorPair posterior_angle_rule(std::span<const double> omega_samples,
                                int n_theta,
                                AngleMean mean = AngleMean::Arithmetic);

// Per-node sample variance of the flux over a set of rings.
struct FluxVarianceMap {
  std::vector<double> variances;
};

FluxVarianceMap flux_variance_map(std::span<const std::vector<double>> rings);

// Indices of the largest and second largest entries; ties go to the lower
// index.
SensorPair top_two(const FluxVarianceMap &map);

// Uses the rings retained after burn-in.
SensorPair flux_variance_rule(const PosteriorEnsemble &ensemble,
                              double burn_fraction);

// Two distinct indices drawn uniformly without replacement.
SensorPair random_rule(int n_theta, Rng &rng);

// True when the proposed pair (unordered) has already been used.
bool should_stop(std::span<const SensorPair> history, const SensorPair &proposed);

} // namespace fluxsense
