#include "fluxsense/errors.hpp"
#include "fluxsense/geometry.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace fluxsense;
using std::numbers::pi;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs)
    v(i++) = x;
  return v;
}

} // namespace

TEST(CircleSource, TruthFromExperimentMapsToUpperCentre) {
  const auto c = circle_from_unconstrained(vec({0.0, -1.0}));
  EXPECT_DOUBLE_EQ(c.rho, 0.5);
  EXPECT_NEAR(c.omega, pi / 2, 1e-15);
  EXPECT_NEAR(c.eta.x(), 0.0, 1e-15);
  EXPECT_NEAR(c.eta.y(), 0.5, 1e-15);
}

TEST(CircleSource, OriginOfParameterSpace) {
  const auto c = circle_from_unconstrained(vec({0.0, 0.0}));
  EXPECT_DOUBLE_EQ(c.rho, 0.5);
  EXPECT_DOUBLE_EQ(c.omega, pi);
  EXPECT_NEAR(c.eta.x(), -0.5, 1e-15);
  EXPECT_NEAR(c.eta.y(), 0.0, 1e-15);
}

TEST(CircleSource, LargeArgumentApproachesUnitRadius) {
  const auto c = circle_from_unconstrained(vec({1e6, 0.0}));
  EXPECT_NEAR(c.rho, 1.0, 1e-5);
  EXPECT_LT(c.rho, 1.0);
  EXPECT_DOUBLE_EQ(c.omega, pi);
}

TEST(CircleSource, RejectsNonFiniteAndWrongLength) {
  EXPECT_THROW(circle_from_unconstrained(vec({std::nan(""), 0.0})), InvalidParameter);
  EXPECT_THROW(circle_from_unconstrained(
                   vec({std::numeric_limits<double>::infinity(), 0.0})),
               InvalidParameter);
  EXPECT_THROW(circle_from_unconstrained(vec({0.0, 0.0, 0.0})), InvalidParameter);
}

TEST(CircleSource, BijectionsStayInRangeAndAreMonotone) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 30.0);
  std::vector<double> xs(500);
  for (auto &x : xs)
    x = n(rng);
  std::sort(xs.begin(), xs.end());
  double prev_rho = -1.0, prev_omega = -1.0;
  for (double x : xs) {
    const auto c = circle_from_unconstrained(vec({x, x}));
    EXPECT_GT(c.rho, 0.0);
    EXPECT_LT(c.rho, 1.0);
    EXPECT_GT(c.omega, 0.0);
    EXPECT_LT(c.omega, 2 * pi);
    EXPECT_GE(c.rho, prev_rho);
    EXPECT_GE(c.omega, prev_omega);
    prev_rho = c.rho;
    prev_omega = c.omega;
  }
}

TEST(CircleSource, InverseRecoversParameters) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_real_distribution<double> small(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector2d xi = i % 2 ? Eigen::Vector2d(u(rng), u(rng))
                                     : Eigen::Vector2d(small(rng), small(rng));
    const auto c = circle_from_unconstrained(xi);
    const auto back = circle_to_unconstrained(c.rho, c.omega);
    // The arctan maps compress |xi| ~ 1e3 into ~1e-3 of the interval, so the
    // attainable accuracy is relative there.
    for (int k = 0; k < 2; ++k)
      EXPECT_NEAR(back(k), xi(k), 1e-10 * std::max(1.0, xi(k) * xi(k) / 1e3));
  }
}

TEST(CircleSource, ContainsCentreNotOrigin) {
  const auto c = circle_from_unconstrained(vec({0.0, -1.0}));
  EXPECT_TRUE(c.contains(0.0, 0.5));
  EXPECT_FALSE(c.contains(0.0, 0.0));
  EXPECT_FALSE(c.contains(0.0, 0.71));
  EXPECT_TRUE(c.contains(0.0, 0.69));
}

TEST(StarRadius, HandEvaluatedPeanutProfile) {
  const auto xi = vec({1.0, 0.0, 0.0, 0.0, 0.3});
  EXPECT_DOUBLE_EQ(star_radius(0.0, xi), 0.5);
  EXPECT_NEAR(star_radius(pi / 4, xi), 0.8, 1e-15);
  EXPECT_NEAR(star_radius(3 * pi / 4, xi), 0.2, 1e-15);
}

TEST(StarRadius, ConstantTermOnly) {
  const auto xi = vec({1.0, 0.0, 0.0, 0.0, 0.0});
  for (double th : {0.0, 0.3, 1.0, 2.5, 6.0, -4.0})
    EXPECT_DOUBLE_EQ(star_radius(th, xi), 0.5);
}

TEST(StarRadius, CoefficientLayoutCosThenSin) {
  // M = 2: xi_2, xi_3 multiply cos(theta), cos(2 theta); xi_4, xi_5 sin.
  EXPECT_NEAR(star_radius(0.0, vec({0, 1, 0, 0, 0})), 1.0, 1e-15);
  EXPECT_NEAR(star_radius(0.0, vec({0, 0, 1, 0, 0})), 1.0, 1e-15);
  EXPECT_NEAR(star_radius(pi / 2, vec({0, 0, 0, 1, 0})), 1.0, 1e-15);
  EXPECT_NEAR(star_radius(pi / 4, vec({0, 0, 0, 0, 1})), 1.0, 1e-15);
}

TEST(StarRadius, PeriodicInTheta) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-20.0, 20.0);
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd xi(7);
    for (Eigen::Index k = 0; k < xi.size(); ++k)
      xi(k) = n(rng);
    const double th = angle(rng);
    EXPECT_NEAR(star_radius(th, xi), star_radius(th + 2 * pi, xi), 1e-13);
  }
  EXPECT_DOUBLE_EQ(star_radius(0.0, vec({1, 0.1, 0.2, 0.3, 0.4})),
                   star_radius(2 * pi, vec({1, 0.1, 0.2, 0.3, 0.4})));
}

TEST(StarRadius, RejectsEvenLength) {
  EXPECT_THROW(star_radius(0.0, vec({1.0, 0.0})), InvalidParameter);
}

TEST(Rasterize, CircleMarksNodesNearCentreOnly) {
  const PolarGrid grid(33, 36);
  const auto chi = rasterize(circle_from_unconstrained(vec({0.0, -1.0})), grid);
  ASSERT_TRUE(chi);
  // Node closest to (0, 0.5): theta index 9 (pi/2), radius 16.5 h_r.
  EXPECT_EQ(chi->at(16, 9), 1);
  EXPECT_EQ(chi->at(0, 9), 0);
  EXPECT_EQ(chi->at(0, 27), 0);
  for (int j = 0; j < grid.n_r(); ++j)
    for (int k = 0; k < grid.n_theta(); ++k) {
      const double x = grid.r(j) * std::cos(grid.theta(k));
      const double y = grid.r(j) * std::sin(grid.theta(k));
      EXPECT_EQ(chi->at(j, k), std::hypot(x, y - 0.5) < 0.2 ? 1 : 0);
    }
  EXPECT_GT(chi->count(), 0u);
}

TEST(Rasterize, StarRadialThreshold) {
  const PolarGrid grid(33, 36);
  const auto chi = rasterize(star_from_unconstrained(vec({1, 0, 0, 0, 0})), grid);
  ASSERT_TRUE(chi);
  for (int j = 0; j < grid.n_r(); ++j)
    for (int k = 0; k < grid.n_theta(); ++k)
      EXPECT_EQ(chi->at(j, k), grid.r(j) < 0.5 ? 1 : 0);
  // r = 0.4 lies between nodes 12 and 13; nodes either side of 0.5 too.
  EXPECT_EQ(chi->at(12, 0), 1);
  EXPECT_EQ(chi->at(19, 0), 0);
}

TEST(Rasterize, InadmissibleStarIsRejected) {
  const PolarGrid grid(33, 36);
  EXPECT_FALSE(rasterize(star_from_unconstrained(vec({0, 0, 0, 0, 0})), grid));
  EXPECT_FALSE(rasterize(star_from_unconstrained(vec({2.5, 0, 0, 0, 0})), grid));
  EXPECT_FALSE(rasterize(star_from_unconstrained(vec({1, 0, 0, 0, 0.6})), grid));
  EXPECT_TRUE(rasterize(star_from_unconstrained(vec({1, 0, 0, 0, 0.3})), grid));
  EXPECT_FALSE(star_admissible(vec({0, 0, 0, 0, 0}), grid));
}

TEST(Rasterize, EnlargingStarNeverRemovesCells) {
  const PolarGrid grid(33, 36);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.1);
  std::uniform_real_distribution<double> grow(0.0, 0.3);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    Eigen::VectorXd xi(5);
    xi << 0.8 + n(rng), n(rng), n(rng), n(rng), n(rng);
    Eigen::VectorXd bigger = xi;
    bigger(0) += grow(rng); // q' = q + delta/2
    const auto a = rasterize(star_from_unconstrained(xi), grid);
    const auto b = rasterize(star_from_unconstrained(bigger), grid);
    if (!a || !b)
      continue;
    ++checked;
    for (std::size_t c = 0; c < a->values.size(); ++c)
      EXPECT_GE(b->values[c], a->values[c]);
  }
  EXPECT_GT(checked, 100);
}

TEST(Rasterize, Deterministic) {
  const PolarGrid grid(17, 20);
  const auto xi = vec({0.3, -0.7});
  EXPECT_EQ(rasterize(make_source(SourceKind::Circle, xi), grid)->values,
            rasterize(make_source(SourceKind::Circle, xi), grid)->values);
}
