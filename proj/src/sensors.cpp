#include "fluxsense/sensors.hpp"

#include "fluxsense/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fluxsense {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
  case StrategyKind::Fixed:
    return "fixed";
  case StrategyKind::RandomEachRound:
    return "random";
  case StrategyKind::PosteriorAngle:
    return "posterior-angle";
  case StrategyKind::MaxFluxVariance:
    return "max-flux-variance";
  }
  return "unknown";
}

StrategyKind strategy_from_string(std::string_view name) {
  for (auto kind : {StrategyKind::Fixed, StrategyKind::RandomEachRound,
                    StrategyKind::PosteriorAngle, StrategyKind::MaxFluxVariance})
    if (name == to_string(kind))
      return kind;
  throw InvalidParameter("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(AngleMean mean) {
  return mean == AngleMean::Arithmetic ? "arithmetic" : "circular";
}

AngleMean angle_mean_from_string(std::string_view name) {
  if (name == "arithmetic")
    return AngleMean::Arithmetic;
  if (name == "circular")
    return AngleMean::Circular;
  throw InvalidParameter("unknown angle mean '" + std::string(name) + "'");
}

double mean_angle(std::span<const double> omega_samples, AngleMean mean) {
  if (omega_samples.empty())
    throw InvalidParameter("mean_angle: no samples");
  if (mean == AngleMean::Arithmetic) {
    double s = 0.0;
    for (double w : omega_samples)
      s += w;
    return s / static_cast<double>(omega_samples.size());
  }
  double c = 0.0, s = 0.0;
  for (double w : omega_samples) {
    c += std::cos(w);
    s += std::sin(w);
  }
  double a = std::atan2(s, c);
  if (a < 0.0)
    a += 2.0 * std::numbers::pi;
  return a;
}

SensorPair posterior_angle_rule(std::span<const double> omega_samples,
                                int n_theta, AngleMean mean) {
  if (n_theta < 2)
    throw InvalidParameter("posterior_angle_rule: n_theta must be >= 2");
  const double h = 2.0 * std::numbers::pi / n_theta;
  const double x = mean_angle(omega_samples, mean) / h;
  const auto wrap = [n_theta](long i) {
    return static_cast<int>(((i % n_theta) + n_theta) % n_theta);
  };
  const long lo = static_cast<long>(std::floor(x));
  const long hi = static_cast<long>(std::ceil(x));
  if (lo == hi)
    return {wrap(lo), wrap(lo + 1)};
  return {wrap(lo), wrap(hi)};
}

FluxVarianceMap flux_variance_map(std::span<const std::vector<double>> rings) {
  if (rings.size() < 2)
    throw InvalidParameter("flux_variance_map: need at least two rings");
  const auto n = rings.front().size();
  std::vector<double> mean(n, 0.0), var(n, 0.0);
  for (const auto &ring : rings) {
    if (ring.size() != n)
      throw InvalidParameter("flux_variance_map: ring length mismatch");
    for (std::size_t a = 0; a < n; ++a)
      mean[a] += ring[a];
  }
  for (auto &m : mean)
    m /= static_cast<double>(rings.size());
  for (const auto &ring : rings)
    for (std::size_t a = 0; a < n; ++a) {
      const double d = ring[a] - mean[a];
      var[a] += d * d;
    }
  for (auto &v : var)
    v /= static_cast<double>(rings.size() - 1);
  return {var};
}

SensorPair top_two(const FluxVarianceMap &map) {
  const auto &v = map.variances;
  if (v.size() < 2)
    throw InvalidParameter("top_two: need at least two nodes");
  int best = 0;
  for (int a = 1; a < static_cast<int>(v.size()); ++a)
    if (v[a] > v[best])
      best = a;
  int second = best == 0 ? 1 : 0;
  for (int a = 0; a < static_cast<int>(v.size()); ++a)
    if (a != best && v[a] > v[second])
      second = a;
  return {best, second};
}

SensorPair flux_variance_rule(const PosteriorEnsemble &ensemble,
                              double burn_fraction) {
  if (ensemble.flux_rings.size() < 2)
    throw InvalidParameter("flux_variance_rule: need at least two samples");
  auto first = ensemble.burn_in_index(burn_fraction);
  if (ensemble.flux_rings.size() - first < 2)
    first = ensemble.flux_rings.size() - 2;
  const std::span<const std::vector<double>> rings(ensemble.flux_rings);
  return top_two(flux_variance_map(rings.subspan(first)));
}

SensorPair random_rule(int n_theta, Rng &rng) {
  if (n_theta < 2)
    throw InvalidParameter("random_rule: n_theta must be >= 2");
  std::uniform_int_distribution<int> pick_first(0, n_theta - 1);
  std::uniform_int_distribution<int> pick_second(0, n_theta - 2);
  const int a = pick_first(rng);
  int b = pick_second(rng);
  if (b >= a)
    ++b;
  return {a, b};
}

bool should_stop(std::span<const SensorPair> history, const SensorPair &proposed) {
  for (const auto &used : history)
    if (used.same_locations(proposed))
      return true;
  return false;
}

} // namespace fluxsense
