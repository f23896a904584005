#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "radcomp/curvature.hpp"
#include "radcomp/errors.hpp"
#include "radcomp/quadrature.hpp"
#include "radcomp/warping.hpp"

namespace radcomp {

/// int_0^r sin^j(t) dt by adaptive Gauss-Kronrod.
inline double sin_power_integral(int j, double r) {
  if (j < 0) throw DomainError("negative sine power");
  if (j == 0) return r;
  return quad::integrate([j](double t) { return std::pow(std::sin(t), j); }, 0.0, r, {1e-16, 1e-15}).value;
}

/// Volume of the unit k-sphere. omega(0) = 2 (two points) and
/// omega(k) = omega(k-1) * int_0^pi sin^(k-1).
inline double sphere_volume(int k) {
  if (k < 0) throw DomainError("sphere dimension must be >= 0");
  double omega = 2.0;
  for (int j = 1; j <= k; ++j) omega *= sin_power_integral(j - 1, std::numbers::pi);
  return omega;
}

/// Fraction of the unit (n-1)-sphere lying within angle r of a point.
/// The lower half is integrated directly and the upper half reflected, so
/// F(pi/2) = 1/2 and F(pi - r) = 1 - F(r) hold exactly in floating point.
inline double net_function(int n, double r) {
  if (n < 2) throw DomainError("net function needs n >= 2");
  if (!(r >= 0.0 && r <= std::numbers::pi)) throw DomainError("net function argument outside [0, pi]");
  const int j = n - 2;
  const double half = std::numbers::pi / 2.0;
  const double whole = 2.0 * sin_power_integral(j, half);
  if (r <= half) return sin_power_integral(j, r) / whole;
  return 1.0 - sin_power_integral(j, std::numbers::pi - r) / whole;
}

/// Volume of the geodesic ball of radius delta in the unit (n-1)-sphere,
/// omega(n-2) * int_0^delta sin^(n-2).
inline double cap_volume(int n, double delta) {
  if (n < 2) throw DomainError("cap volume needs n >= 2");
  if (!(delta >= 0.0 && delta <= std::numbers::pi)) throw DomainError("cap radius outside [0, pi]");
  return sphere_volume(n - 2) * sin_power_integral(n - 2, delta);
}

/// omega(n-1) * int_0^t m(r)^(n-1) dr.
inline double model_ball_volume(int n, const WarpingSolution& w, double t) {
  if (n < 2) throw DomainError("model dimension must be >= 2");
  if (!(t >= 0.0)) throw DomainError("ball radius must be >= 0");
  if (t > w.t_max()) throw HorizonExceeded(t, w.t_max());
  const int e = n - 1;
  const double integral = w.integrate([e](double, double m, double) { return std::pow(m, e); }, 0.0, t);
  return sphere_volume(n - 1) * integral;
}

// ---------------------------------------------------------------------------
// Divergence of model ball volumes.

enum class VolumeGrowth { Divergent, Finite, Undetermined };

struct VolumeClassification {
  VolumeGrowth growth = VolumeGrowth::Undetermined;
  /// lim vol B_t when growth == Finite.
  double limit = 0.0;
  std::string note;
};

/// Decides whether omega(n-1) int_0^inf m^(n-1) diverges. Nonpositive
/// curvature always diverges (m >= t); otherwise the solution at t_tail is
/// continued analytically or bounded through the declared tail.
inline VolumeClassification classify_model_volume(int n, const WarpingSolution& w) {
  const RadialCurvature& k = w.curvature();
  if (is_nonpositive(k)) return {VolumeGrowth::Divergent, 0.0, "nonpositive curvature: m(t) >= t"};
  const double T = k.t_tail();
  if (T > w.t_max()) throw HorizonExceeded(T, w.t_max());
  const double f = w.m(T), df = w.m_prime(T);
  const int e = n - 1;
  auto core_volume = [&] {
    return sphere_volume(n - 1) *
           w.integrate([e](double, double m, double) { return std::pow(m, e); }, 0.0, T);
  };

  if (k.compactly_supported()) {
    if (df >= 0.0) return {VolumeGrowth::Divergent, 0.0, "linear continuation with slope >= 0"};
    throw ConjugatePoint(T + f / -df);
  }
  if (auto* ct = std::get_if<ConstantTail>(&k.tail())) {
    const double a = std::sqrt(std::abs(ct->c));
    if (ct->c > 0.0) {
      // f cos(a u) + (df/a) sin(a u) always vanishes for some u > 0.
      double u = std::atan2(-f, df / a);
      if (u <= 0.0) u += std::numbers::pi;
      throw ConjugatePoint(T + u / a);
    }
    const double growing = 0.5 * (f + df / a);
    const double decaying = 0.5 * (f - df / a);
    const double scale = std::abs(f) + std::abs(df) / a;
    if (std::abs(growing) <= 1e-7 * scale) {
      const double tail = sphere_volume(n - 1) * std::pow(decaying, e) / (e * a);
      return {VolumeGrowth::Finite, core_volume() + tail, "decaying mode beyond t_tail (cusp end)"};
    }
    if (growing > 0.0) return {VolumeGrowth::Divergent, 0.0, "exponentially growing mode beyond t_tail"};
    throw ConjugatePoint(T + std::atanh(std::min(1.0, -f * a / df)) / a);
  }
  const auto& pl = std::get<PowerLawTail>(k.tail());
  if (pl.c < 0.0) {
    if (df >= 0.0) return {VolumeGrowth::Divergent, 0.0, "convex continuation with slope >= 0"};
    if (w.m_prime(w.t_max()) >= 0.0) return {VolumeGrowth::Divergent, 0.0, "slope turns nonnegative before the horizon"};
    return {VolumeGrowth::Undetermined, 0.0, "slope still negative at the horizon"};
  }
  // Positive power law: m is concave beyond t_tail while positive.
  if (df <= 0.0) throw ConjugatePoint(T + f / std::max(-df, 1e-300));
  const double amp = pl.c * std::pow(T, pl.p);
  const double i0 = std::pow(T, 1.0 - pl.p) / (pl.p - 1.0);
  const double i1 = std::pow(T, 2.0 - pl.p) / (pl.p - 2.0);
  const double lower = df - amp * ((f - df * T) * i0 + df * i1);
  if (lower > 0.0) return {VolumeGrowth::Divergent, 0.0, "slope stays positive under the power-law tail"};
  return {VolumeGrowth::Undetermined, 0.0, "positive power-law tail may bend the warping back to zero"};
}

// ---------------------------------------------------------------------------
// Volume growth ratios.

struct GrowthSample {
  double t = 0.0;
  double vol_num = 0.0;
  double vol_den = 0.0;
  double ratio = 0.0;
};

struct GrowthRatio {
  std::vector<GrowthSample> samples;
  double limit_estimate = 0.0;
  double limit_lo = 0.0;
  double limit_hi = 0.0;
  bool monotone_nonincreasing = true;
};

inline constexpr double kMonotoneTolerance = 1e-9;

/// vol B_t(num) / vol B_t(den) at each horizon. The limit estimate is the
/// last sample; the last increment gives the half-width of the bracket on the
/// side the trend points to.
inline GrowthRatio growth_ratio(int n, const WarpingSolution& numerator, const WarpingSolution& denominator,
                                std::span<const double> horizons) {
  if (horizons.empty()) throw DomainError("growth ratio needs at least one horizon");
  const auto cls = classify_model_volume(n, denominator);
  if (cls.growth == VolumeGrowth::Finite)
    throw ConditionB1Violated("denominator model has finite volume " + std::to_string(cls.limit));
  GrowthRatio out;
  for (double t : horizons) {
    if (!(t > 0.0)) throw DomainError("horizons must be positive");
    GrowthSample s{t, model_ball_volume(n, numerator, t), model_ball_volume(n, denominator, t), 0.0};
    s.ratio = s.vol_num / s.vol_den;
    if (!out.samples.empty() && s.ratio > out.samples.back().ratio + kMonotoneTolerance)
      out.monotone_nonincreasing = false;
    out.samples.push_back(s);
  }
  const double last = out.samples.back().ratio;
  const double gap = out.samples.size() > 1 ? std::abs(last - out.samples[out.samples.size() - 2].ratio) : 0.0;
  out.limit_estimate = last;
  out.limit_lo = std::max(0.0, last - gap);
  out.limit_hi = out.monotone_nonincreasing ? last : last + gap;
  return out;
}

struct MonotonicityReport {
  bool holds = true;
  std::string diagnostics;

  explicit operator bool() const { return holds; }
};

/// Nonincreasing ratio sequence within 1e-9, as Bishop-Gromov predicts when
/// the numerator's radial curvature dominates the denominator's.
inline MonotonicityReport bishop_monotonicity_check(const GrowthRatio& r) {
  for (std::size_t i = 1; i < r.samples.size(); ++i) {
    const auto& a = r.samples[i - 1];
    const auto& b = r.samples[i];
    if (b.ratio > a.ratio + kMonotoneTolerance) {
      return {false, "ratio increases from " + std::to_string(a.ratio) + " at t = " + std::to_string(a.t) +
                         " to " + std::to_string(b.ratio) + " at t = " + std::to_string(b.t)};
    }
  }
  return {true, ""};
}

}  // namespace radcomp
