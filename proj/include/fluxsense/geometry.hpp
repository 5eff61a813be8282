#pragma once

#include "fluxsense/grid.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace fluxsense {

// Sampler-space parameter vector. Length 2 for a circle, 2M+1 for a star.
using UnconstrainedParams = Eigen::VectorXd;

enum class SourceKind { Circle, Star };

std::string_view to_string(SourceKind kind);
SourceKind source_kind_from_string(std::string_view name);

// Number of unconstrained parameters for the given kind (harmonics only
// matters for stars).
int parameter_count(SourceKind kind, int harmonics);

// Disc of fixed radius 0.2 whose centre is (rho cos omega, rho sin omega).
struct CircleSource {
  static constexpr double radius = 0.2;

  double rho = 0.0;
  double omega = 0.0;
  Eigen::Vector2d eta = Eigen::Vector2d::Zero();

  bool contains(double x, double y) const;
};

// Star-shaped domain r < q(theta; xi) with a truncated Fourier profile.
struct StarSource {
  int harmonics = 0;
  Eigen::VectorXd xi;

  double radius(double theta) const;
};

using SourceModel = std::variant<CircleSource, StarSource>;

// rho = atan(xi_1)/pi + 1/2, omega = 2 atan(xi_2) + pi.
CircleSource circle_from_unconstrained(const UnconstrainedParams &xi);

// Inverse of the two arctan bijections; rho in (0,1), omega in (0, 2 pi).
Eigen::Vector2d circle_to_unconstrained(double rho, double omega);

// q(theta; xi) = xi_1/2 + sum_i ( xi_{i+1} cos(i theta) + xi_{i+M+1} sin(i theta) )
// using 1-based xi indices, M = (len(xi) - 1) / 2.
double star_radius(double theta, const UnconstrainedParams &xi);

StarSource star_from_unconstrained(const UnconstrainedParams &xi);

SourceModel make_source(SourceKind kind, const UnconstrainedParams &xi);

struct StarBounds {
  double q_min = 0.01;
  double q_max = 0.99;
};

// Characteristic function of the source sampled at the grid nodes.
struct IndicatorField {
  int n_r = 0;
  int n_theta = 0;
  std::vector<std::uint8_t> values;

  std::uint8_t at(int j, int k) const {
    return values[static_cast<std::size_t>(j) * n_theta + k];
  }
  std::size_t count() const;
};

// A star profile leaving [q_min, q_max] on any angular node yields nullopt;
// callers treat that as zero prior mass.
std::optional<IndicatorField> rasterize(const SourceModel &source,
                                        const PolarGrid &grid,
                                        StarBounds bounds = {});

bool star_admissible(const UnconstrainedParams &xi, const PolarGrid &grid,
                     StarBounds bounds = {});

} // namespace fluxsense
