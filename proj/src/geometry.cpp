#include "fluxsense/geometry.hpp"

#include "fluxsense/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fluxsense {

namespace {

void require_finite(const UnconstrainedParams &xi, const char *what) {
  if (!xi.allFinite())
    throw InvalidParameter(std::string(what) + ": non-finite parameter");
}

} // namespace

std::string_view to_string(SourceKind kind) {
  return kind == SourceKind::Circle ? "circle" : "star";
}

SourceKind source_kind_from_string(std::string_view name) {
  if (name == "circle")
    return SourceKind::Circle;
  if (name == "star")
    return SourceKind::Star;
  throw InvalidParameter("unknown source kind '" + std::string(name) + "'");
}

int parameter_count(SourceKind kind, int harmonics) {
  if (kind == SourceKind::Circle)
    return 2;
  if (harmonics < 1)
    throw InvalidParameter("star source needs at least one harmonic");
  return 2 * harmonics + 1;
}

bool CircleSource::contains(double x, double y) const {
  const double dx = x - eta.x();
  const double dy = y - eta.y();
  return dx * dx + dy * dy < radius * radius;
}

CircleSource circle_from_unconstrained(const UnconstrainedParams &xi) {
  if (xi.size() != 2)
    throw InvalidParameter("circle source expects 2 parameters");
  require_finite(xi, "circle_from_unconstrained");
  CircleSource c;
  c.rho = std::atan(xi(0)) / std::numbers::pi + 0.5;
  c.omega = 2.0 * std::atan(xi(1)) + std::numbers::pi;
  c.eta = {c.rho * std::cos(c.omega), c.rho * std::sin(c.omega)};
  return c;
}

Eigen::Vector2d circle_to_unconstrained(double rho, double omega) {
  if (!(rho > 0.0 && rho < 1.0) ||
      !(omega > 0.0 && omega < 2.0 * std::numbers::pi))
    throw InvalidParameter("circle_to_unconstrained: out of range");
  return {std::tan((rho - 0.5) * std::numbers::pi),
          std::tan((omega - std::numbers::pi) / 2.0)};
}

double star_radius(double theta, const UnconstrainedParams &xi) {
  if (xi.size() < 3 || xi.size() % 2 == 0)
    throw InvalidParameter("star profile expects 2M+1 parameters");
  require_finite(xi, "star_radius");
  if (!std::isfinite(theta))
    throw InvalidParameter("star_radius: non-finite angle");
  const int m = static_cast<int>((xi.size() - 1) / 2);
  const double t = std::remainder(theta, 2.0 * std::numbers::pi);
  double q = 0.5 * xi(0);
  for (int i = 1; i <= m; ++i)
    q += xi(i) * std::cos(i * t) + xi(i + m) * std::sin(i * t);
  return q;
}

double StarSource::radius(double theta) const {
  return star_radius(theta, xi);
}

StarSource star_from_unconstrained(const UnconstrainedParams &xi) {
  if (xi.size() < 3 || xi.size() % 2 == 0)
    throw InvalidParameter("star source expects 2M+1 parameters");
  require_finite(xi, "star_from_unconstrained");
  return StarSource{static_cast<int>((xi.size() - 1) / 2), xi};
}

SourceModel make_source(SourceKind kind, const UnconstrainedParams &xi) {
  if (kind == SourceKind::Circle)
    return circle_from_unconstrained(xi);
  return star_from_unconstrained(xi);
}

std::size_t IndicatorField::count() const {
  std::size_t n = 0;
  for (auto v : values)
    n += v;
  return n;
}

bool star_admissible(const UnconstrainedParams &xi, const PolarGrid &grid,
                     StarBounds bounds) {
  for (int k = 0; k < grid.n_theta(); ++k) {
    const double q = star_radius(grid.theta(k), xi);
    if (q < bounds.q_min || q > bounds.q_max)
      return false;
  }
  return true;
}

std::optional<IndicatorField> rasterize(const SourceModel &source,
                                        const PolarGrid &grid,
                                        StarBounds bounds) {
  IndicatorField chi{grid.n_r(), grid.n_theta(),
                     std::vector<std::uint8_t>(grid.size(), 0)};

  if (const auto *circle = std::get_if<CircleSource>(&source)) {
    for (int k = 0; k < grid.n_theta(); ++k) {
      const double c = std::cos(grid.theta(k));
      const double s = std::sin(grid.theta(k));
      for (int j = 0; j < grid.n_r(); ++j)
        chi.values[grid.index(j, k)] =
            circle->contains(grid.r(j) * c, grid.r(j) * s) ? 1 : 0;
    }
    return chi;
  }

  const auto &star = std::get<StarSource>(source);
  for (int k = 0; k < grid.n_theta(); ++k) {
    const double q = star.radius(grid.theta(k));
    if (q < bounds.q_min || q > bounds.q_max)
      return std::nullopt;
    for (int j = 0; j < grid.n_r(); ++j)
      chi.values[grid.index(j, k)] = grid.r(j) < q ? 1 : 0;
  }
  return chi;
}

} // namespace fluxsense
