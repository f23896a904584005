#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "radcomp/synthetic.hpp"
#include "test_support.hpp"

using namespace radcomp;

namespace {

constexpr double pi = std::numbers::pi;

double sup_error(const RadialCurvature& a, const RadialCurvature& b, double T, int n = 2000) {
  double e = 0.0;
  for (int i = 0; i <= n; ++i) e = std::max(e, std::abs(a(T * i / n) - b(T * i / n)));
  return e;
}

}  // namespace

TEST(RadialSectional, FlatAndHyperbolic) {
  for (auto rec : {CurvatureRecovery::Exact, CurvatureRecovery::DenseDerivative}) {
    const auto flat = RotSymManifold::from_curvature(3, RadialCurvature::zero(), 10.0, 1e-12, rec);
    const auto hyp = RotSymManifold::from_curvature(3, RadialCurvature::constant(-1.0), 10.0, 1e-12, rec);
    for (double t : {0.0, 0.01, 0.5, 3.0, 10.0}) {
      EXPECT_NEAR(radial_sectional(flat, t), 0.0, 1e-7);
      EXPECT_NEAR(radial_sectional(hyp, t), -1.0, 1e-6);
      EXPECT_EQ(radial_ricci(hyp, t), radial_sectional(hyp, t));
    }
  }
}

TEST(RadialSectional, BumpRoundTripFromDenseOutput) {
  const auto k = test::bump(1.5, 3.0);
  const auto mfd = RotSymManifold::from_curvature(3, k, 10.0, 1e-12, CurvatureRecovery::DenseDerivative);
  for (int i = 0; i <= 1000; ++i) {
    const double t = 10.0 * i / 1000;
    EXPECT_NEAR(radial_sectional(mfd, t), k(t), 1e-6) << "t = " << t;
  }
}

TEST(RadialSectional, SplineProfileIsDegraded) {
  // g = sinh sampled on a grid: only about 1e-4 accuracy is claimed.
  std::vector<double> t, g;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(4.0 * i / 400);
    g.push_back(std::sinh(t.back()));
  }
  const auto mfd = RotSymManifold::from_profile(2, t, g);
  EXPECT_TRUE(mfd.degraded());
  for (double s : {0.0, 0.3, 1.0, 2.0, 3.0}) EXPECT_NEAR(radial_sectional(mfd, s), -1.0, 1e-4) << s;
}

TEST(RadialSectional, ProfileMustStartAtPole) {
  EXPECT_THROW(RotSymManifold::from_profile(2, {0.0, 1.0}, {0.1, 1.0}), DomainError);
  EXPECT_THROW(RotSymManifold::from_profile(2, {0.0, 1.0, 2.0}, {0.0, 1.0, -1.0}), DomainError);
}

TEST(Envelope, FlatIsZero) {
  const auto mfd = RotSymManifold::from_curvature(3, RadialCurvature::zero(), 10.0);
  const auto env = curvature_envelope(mfd, 10.0, 0.1);
  EXPECT_EQ(sup_error(env, RadialCurvature::zero(), 20.0), 0.0);
  EXPECT_TRUE(env.compactly_supported());
}

TEST(Envelope, HyperbolicIsMinusOne) {
  const auto mfd = RotSymManifold::from_curvature(3, RadialCurvature::constant(-1.0), 10.0);
  const auto env = curvature_envelope(mfd, 10.0, 0.1);
  EXPECT_LE(sup_error(env, RadialCurvature::constant(-1.0), 30.0), 1e-14);
  EXPECT_TRUE(moment_integral(env).divergent());
}

TEST(Envelope, BumpRoundTrip) {
  const auto k = test::bump(2.0, 4.0);
  for (auto rec : {CurvatureRecovery::Exact, CurvatureRecovery::DenseDerivative}) {
    const auto mfd = RotSymManifold::from_curvature(3, k, 10.0, 1e-12, rec);
    const auto env = curvature_envelope(mfd, 10.0, 0.05);
    EXPECT_LE(sup_error(env, k, 10.0), 1e-6);
  }
}

TEST(Envelope, PowerLawTailCarriesOver) {
  const auto k = RadialCurvature::formula("-1/(1+t^2)^2", 1.0, PowerLawTail{-0.25, 4.0});
  // Core and tail differ in shape; only continuity at t = 1 is required.
  const auto mfd = RotSymManifold::from_curvature(2, k, 10.0);
  const auto env = curvature_envelope(mfd, 10.0, 0.05);
  ASSERT_TRUE(std::holds_alternative<PowerLawTail>(env.tail()));
  EXPECT_NEAR(env(20.0), k(20.0), 1e-12);
}

TEST(Envelope, PositiveUndeclaredEndRejected) {
  std::vector<double> t, g;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(1.0 * i / 100);
    g.push_back(std::sin(t.back()));
  }
  const auto mfd = RotSymManifold::from_profile(2, t, g);
  EXPECT_THROW(curvature_envelope(mfd, 1.0, 0.05), Unsupported);
}

TEST(RayMass, FullSphere) {
  EXPECT_NEAR(ray_mass(RotSymManifold::from_curvature(3, RadialCurvature::zero())), 4 * pi, 1e-13);
  EXPECT_NEAR(ray_mass(RotSymManifold::from_curvature(2, RadialCurvature::constant(-1.0))), 2 * pi, 1e-14);
  // Paraboloid-like profile g = t / sqrt(1 + t^2/4)... slope stays positive.
  std::vector<double> t, g;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(5.0 * i / 200);
    g.push_back(t.back() / std::sqrt(1 + t.back() * t.back() / 4));
  }
  EXPECT_NEAR(ray_mass(RotSymManifold::from_profile(4, t, g)), sphere_volume(3), 1e-13);
}

TEST(RayMass, TurningWarpingUnsupported) {
  std::vector<double> t, g;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(2.5 * i / 100);
    g.push_back(std::sin(t.back()));
  }
  EXPECT_THROW(ray_mass(RotSymManifold::from_profile(2, t, g)), Unsupported);
}

TEST(Synthetic, BishopGromovOverDominatedModel) {
  // Numerator curvature >= -1 everywhere; ratio to the hyperbolic model must
  // be nonincreasing and end <= 1.
  std::mt19937_64 rng(41);
  const std::vector<double> hs{2, 4, 8, 16};
  const auto den = solve_warping(RadialCurvature::constant(-1.0), 16.0);
  for (int i = 0; i < 10; ++i) {
    const auto k = test::random_curvature(rng, true, 1.0);
    // Clamp below by -1 by construction: values lie in [-1, 1].
    const auto mfd = RotSymManifold::from_curvature(3, kstar(k, RadialCurvature::zero()), 16.0);
    const auto r = growth_ratio(mfd, den, hs);
    EXPECT_TRUE(bishop_monotonicity_check(r).holds);
    EXPECT_LE(r.samples.back().ratio, 1.0 + 1e-9);
  }
}

TEST(Synthetic, RayMassDominatesCap) {
  // When the growth hypothesis holds, the ray set mass exceeds the cap of radius pi - delta.
  const auto mfd = RotSymManifold::from_curvature(3, RadialCurvature::zero());
  for (double delta : {0.0, 0.5, 1.0, pi / 2}) EXPECT_GE(ray_mass(mfd), cap_volume(3, pi - delta));
}
