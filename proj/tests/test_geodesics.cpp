#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "radcomp/geodesics.hpp"
#include "test_support.hpp"

using namespace radcomp;

namespace {

constexpr double pi = std::numbers::pi;

const ModelSurface& flat() {
  static const ModelSurface s(RadialCurvature::zero(), 40.0);
  return s;
}
const ModelSurface& hyperbolic() {
  static const ModelSurface s(RadialCurvature::constant(-1.0), 40.0);
  return s;
}
const ModelSurface& bumpy() {
  static const ModelSurface s(test::bump(1.0, 2.0), 40.0);
  return s;
}

double planar(double r1, double r2, double th) { return std::sqrt(r1 * r1 + r2 * r2 - 2 * r1 * r2 * std::cos(th)); }

double hyperbolic_law(double r1, double r2, double th) {
  return std::acosh(std::cosh(r1) * std::cosh(r2) - std::sinh(r1) * std::sinh(r2) * std::cos(th));
}

// Interior angle at the pole from the three side lengths (hyperbolic law of cosines).
double hyperbolic_pole_angle(double a, double b, double c) {
  return std::acos((std::cosh(a) * std::cosh(b) - std::cosh(c)) / (std::sinh(a) * std::sinh(b)));
}

}  // namespace

TEST(Shoot, FlatStraightLine) {
  const auto p = shoot(flat(), {1.0, 0.0}, pi / 2, 2.0);
  const auto e = p.end();
  // Plane: from (1,0) heading in +y, after length 2 reach (1,2).
  EXPECT_NEAR(e.t, std::sqrt(5.0), 1e-8);
  EXPECT_NEAR(e.theta, std::atan2(2.0, 1.0), 1e-8);
}

TEST(Shoot, RadialShotIsMeridian) {
  const auto p = shoot(flat(), {1.0, 0.0}, 0.0, 2.0);
  EXPECT_TRUE(p.is_meridian());
  EXPECT_DOUBLE_EQ(p.end().t, 3.0);
  EXPECT_EQ(p.end().theta, 0.0);
}

TEST(Shoot, ZeroLength) {
  const auto p = shoot(hyperbolic(), {1.0, 0.5}, 1.0, 0.0);
  EXPECT_EQ(p.end().t, 1.0);
  EXPECT_EQ(p.end().theta, 0.5);
}

TEST(Shoot, HyperbolicClairautConservation) {
  const auto p = shoot(hyperbolic(), {1.0, 0.0}, 1.2, 5.0);
  EXPECT_LE(p.max_clairaut_drift(), 1e-8);
  EXPECT_LE(p.max_speed_defect(), 1e-8);
}

TEST(Shoot, ClairautPropertyOverRandomShots) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> r(0.2, 4.0), a(-pi, pi), len(0.5, 6.0);
  for (int i = 0; i < 40; ++i) {
    const auto& s = i % 2 ? hyperbolic() : bumpy();
    const double r0 = r(rng), a0 = a(rng), l0 = len(rng);
    const auto p = shoot(s, {r0, 0.3}, a0, l0);
    SCOPED_TRACE(std::to_string(r0) + " " + std::to_string(a0) + " " + std::to_string(l0) + " " + std::to_string(i));
    EXPECT_LE(p.max_clairaut_drift(), 1e-8);
    EXPECT_LE(p.max_speed_defect(), 1e-8);
  }
}

TEST(Shoot, RejectsPositiveCurvature) {
  const ModelSurface s(RadialCurvature::linear({0.0, 1.0}, {0.1, 0.0}));
  EXPECT_THROW(shoot(s, {1.0, 0.0}, 1.0, 1.0), DomainError);
}

TEST(Distance, Flat345) { EXPECT_NEAR(distance(flat(), {3.0, 0.0}, {4.0, pi / 2}), 5.0, 1e-9); }

TEST(Distance, SamePoint) { EXPECT_EQ(distance(hyperbolic(), {2.0, 0.4}, {2.0, 0.4}), 0.0); }

TEST(Distance, ThroughPole) {
  EXPECT_DOUBLE_EQ(distance(bumpy(), {2.0, 0.0}, {1.5, pi}), 3.5);
  EXPECT_DOUBLE_EQ(distance(bumpy(), SurfacePoint::pole(), {1.5, 1.0}), 1.5);
}

TEST(Distance, AngleWrapsAround) {
  EXPECT_NEAR(distance(flat(), {1.0, 3.0}, {1.0, -3.0}), 2 * std::sin(pi - 3.0), 1e-9);
  EXPECT_NEAR(distance(hyperbolic(), {2.0, 0.1}, {1.5, 0.1 + 4 * pi + 0.5}),
              hyperbolic_law(2.0, 1.5, 0.5), 1e-7);
}

TEST(Distance, FlatLawOfCosines) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> r(0.1, 8.0), th(0.0, pi);
  for (int i = 0; i < 50; ++i) {
    const double r1 = r(rng), r2 = r(rng), t = th(rng);
    EXPECT_NEAR(distance(flat(), {r1, 0.0}, {r2, t}), planar(r1, r2, t), 1e-8);
  }
}

TEST(Distance, HyperbolicLawOfCosines) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> r(0.1, 5.0), th(0.0, pi);
  for (int i = 0; i < 50; ++i) {
    const double r1 = r(rng), r2 = r(rng), t = th(rng);
    EXPECT_NEAR(distance(hyperbolic(), {r1, 0.0}, {r2, t}), hyperbolic_law(r1, r2, t), 1e-7);
  }
}

TEST(Distance, SymmetricAndBounded) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> r(0.1, 5.0), th(-pi / 2, pi / 2);
  for (int i = 0; i < 20; ++i) {
    const SurfacePoint a{r(rng), th(rng)}, b{r(rng), th(rng)};
    const double ab = distance(bumpy(), a, b), ba = distance(bumpy(), b, a);
    EXPECT_NEAR(ab, ba, 1e-8);
    EXPECT_GE(ab, std::abs(a.t - b.t) - 1e-12);
    EXPECT_LE(ab, a.t + b.t + 1e-12);
  }
}

TEST(Triangle, Flat345) {
  const auto tri = comparison_triangle(flat(), 3.0, 4.0, 5.0);
  EXPECT_NEAR(tri.angles[0], pi / 2, 1e-9);
  EXPECT_NEAR(tri.angles[1], std::atan(4.0 / 3.0), 1e-8);
  EXPECT_NEAR(tri.angles[2], std::atan(3.0 / 4.0), 1e-8);
}

TEST(Triangle, DegenerateRejected) {
  EXPECT_THROW(comparison_triangle(flat(), 3.0, 4.0, 7.0), DomainError);
  EXPECT_THROW(comparison_triangle(flat(), 3.0, 4.0, 0.0), DomainError);
}

TEST(Triangle, HyperbolicEquilateral) {
  const auto tri = comparison_triangle(hyperbolic(), 1.0, 1.0, 1.0);
  const double expect = hyperbolic_pole_angle(1.0, 1.0, 1.0);
  for (double a : tri.angles) EXPECT_NEAR(a, expect, 1e-7);
}

TEST(Triangle, SideLengthsRoundTrip) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.3, 4.0);
  for (int i = 0; i < 10; ++i) {
    const double a = u(rng), b = u(rng);
    const double c = std::abs(a - b) + (a + b - std::abs(a - b)) * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    const auto tri = comparison_triangle(bumpy(), a, b, c);
    EXPECT_NEAR(distance(bumpy(), tri.vertices[0], tri.vertices[1]), a, 1e-7);
    EXPECT_NEAR(distance(bumpy(), tri.vertices[0], tri.vertices[2]), b, 1e-7);
    EXPECT_NEAR(distance(bumpy(), tri.vertices[1], tri.vertices[2]), c, 1e-7);
  }
}

TEST(Triangle, PoleAngleIncreasesWithOppositeSide) {
  double last = 0.0;
  for (double c : {1.2, 1.6, 2.0, 3.0, 4.0, 4.9}) {
    const double th = comparison_triangle(bumpy(), 2.0, 3.0, c).angles[0];
    EXPECT_GT(th, last);
    last = th;
  }
}

TEST(Triangle, ComparisonAngleInequality) {
  // K1 = bump >= K2 = -1: pole angles on the first surface dominate.
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.5, 3.0), f(0.2, 0.8);
  for (int i = 0; i < 8; ++i) {
    const double a = u(rng), b = u(rng);
    const double c = std::abs(a - b) + (a + b - std::abs(a - b)) * f(rng);
    const auto t1 = comparison_triangle(bumpy(), a, b, c);
    const auto t2 = comparison_triangle(hyperbolic(), a, b, c);
    EXPECT_GE(t1.angles[0], t2.angles[0] - 1e-7);
  }
}

TEST(GaussBonnet, FlatResidualVanishes) {
  const auto tri = comparison_triangle(flat(), 2.0, 3.0, 4.0);
  EXPECT_NEAR(tri.angle_sum(), pi, 1e-8);
  EXPECT_NEAR(gauss_bonnet_residual(flat(), tri), 0.0, 1e-8);
}

TEST(GaussBonnet, HyperbolicDefectIsArea) {
  const auto tri = comparison_triangle(hyperbolic(), 2.0, 3.0, 4.0);
  EXPECT_LE(std::abs(gauss_bonnet_residual(hyperbolic(), tri)), 1e-6);
  // Independent: angle defect from the hyperbolic law of cosines.
  const double A = hyperbolic_pole_angle(2.0, 3.0, 4.0);
  const double B = hyperbolic_pole_angle(2.0, 4.0, 3.0);
  const double C = hyperbolic_pole_angle(3.0, 4.0, 2.0);
  EXPECT_NEAR(tri.angle_sum(), A + B + C, 1e-7);
}

TEST(GaussBonnet, BumpNearPole) {
  const auto tri = comparison_triangle(bumpy(), 0.8, 1.1, 0.9);
  EXPECT_LE(std::abs(gauss_bonnet_residual(bumpy(), tri)), 1e-6);
}

TEST(CriticalAngle, Examples) {
  EXPECT_DOUBLE_EQ(critical_angle_bound(flat(), 0.0), pi / 2);
  const ModelSurface ramp(RadialCurvature::linear({0.0, 1.0}, {-1.0, 0.0}));
  EXPECT_NEAR(critical_angle_bound(ramp, 0.0), pi / 2 * std::exp(-1.0 / 6.0), 1e-13);
  EXPECT_EQ(critical_angle_bound(ramp, pi / 2), 0.0);
  EXPECT_EQ(critical_angle_bound(hyperbolic(), 0.0), 0.0);
}

TEST(PathExport, SamplesCoverLength) {
  const auto p = shoot(hyperbolic(), {1.0, 0.0}, 1.0, 2.0);
  const auto rows = p.samples(0.1);
  ASSERT_GE(rows.size(), 21u);
  EXPECT_EQ(rows.front()[0], 0.0);
  EXPECT_DOUBLE_EQ(rows.back()[0], 2.0);
}
