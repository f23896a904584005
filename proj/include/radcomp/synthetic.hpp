#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "radcomp/curvature.hpp"
#include "radcomp/errors.hpp"
#include "radcomp/spline.hpp"
#include "radcomp/volume.hpp"
#include "radcomp/warping.hpp"

namespace radcomp {

/// How -g''/g is obtained from a manifold's warping function.
enum class CurvatureRecovery {
  Exact,            // from the generating curvature
  DenseDerivative,  // derivative of the dense g' interpolant
  Spline            // second derivative of a cubic spline through samples of g (~1e-4)
};

/// Rotationally symmetric pole manifold dt^2 + g(t)^2 dtheta^2_{S^{n-1}}.
class RotSymManifold {
 public:
  static RotSymManifold from_curvature(int n, const RadialCurvature& k, std::optional<double> t_max = std::nullopt,
                                       double rel_tol = 1e-12,
                                       CurvatureRecovery recovery = CurvatureRecovery::Exact) {
    if (recovery == CurvatureRecovery::Spline)
      throw DomainError("spline recovery applies to sampled profiles only");
    RotSymManifold m(n);
    m.warping_ = solve_warping(k, t_max.value_or(default_horizon(k)), rel_tol);
    m.recovery_ = recovery;
    return m;
  }

  /// Warping function given by samples (t_i, g_i) with t_0 = 0, g_0 = 0.
  static RotSymManifold from_profile(int n, std::vector<double> t, std::vector<double> g) {
    if (t.empty() || t.front() != 0.0 || g.front() != 0.0)
      throw DomainError("profile must start at the pole with g(0) = 0");
    for (std::size_t i = 1; i < g.size(); ++i)
      if (!(g[i] > 0.0)) throw DomainError("profile must be positive away from the pole");
    if (t.size() < 4) throw DomainError("profile needs at least four samples");
    // g'(0) = 1 at a pole; the far slope is the derivative of the cubic
    // through the last four samples.
    const std::size_t k = t.size() - 1;
    double dn = 0.0;
    for (std::size_t i = k - 3; i <= k; ++i) {
      double w = 0.0;  // d/dt of the i-th Lagrange basis at t_k
      for (std::size_t j = k - 3; j <= k; ++j) {
        if (j == i) continue;
        double term = 1.0 / (t[i] - t[j]);
        for (std::size_t l = k - 3; l <= k; ++l)
          if (l != i && l != j) term *= (t[k] - t[l]) / (t[i] - t[l]);
        w += term;
      }
      dn += w * g[i];
    }
    RotSymManifold m(n);
    m.profile_ = PiecewiseCubic::clamped_cubic(std::move(t), std::move(g), 1.0, dn);
    m.recovery_ = CurvatureRecovery::Spline;
    return m;
  }

  int n() const { return n_; }
  CurvatureRecovery recovery() const { return recovery_; }
  /// Spline-recovered curvature is only good to about 1e-4.
  bool degraded() const { return recovery_ == CurvatureRecovery::Spline; }

  const WarpingSolution* warping() const { return warping_ ? &*warping_ : nullptr; }
  const RadialCurvature* generating_curvature() const { return warping_ ? &warping_->curvature() : nullptr; }

  double t_max() const { return warping_ ? warping_->t_max() : profile_->back(); }

  double g(double t) const { return warping_ ? warping_->m(t) : (*profile_)(check(t)); }
  double g_prime(double t) const { return warping_ ? warping_->m_prime(t) : profile_->derivative(check(t)); }
  double g_second(double t) const {
    switch (recovery_) {
      case CurvatureRecovery::Exact: return -warping_->curvature()(t) * warping_->m(t);
      case CurvatureRecovery::DenseDerivative: return warping_->m_second_interpolated(t);
      case CurvatureRecovery::Spline: return profile_->second_derivative(check(t));
    }
    return 0.0;
  }

  /// omega(n-1) int_0^t g^(n-1).
  double ball_volume(double t) const {
    if (warping_) return model_ball_volume(n_, *warping_, t);
    check(t);
    const int e = n_ - 1;
    const auto knots = profile_->knots();
    const auto est = quad::integrate([&](double r) { return std::pow((*profile_)(r), e); }, 0.0, t,
                                     {1e-14, 1e-12}, knots);
    return sphere_volume(n_ - 1) * est.value;
  }

  /// Abscissae on which the profile is known: solver steps or spline knots.
  std::vector<double> grid() const {
    if (warping_) return warping_->grid();
    const auto k = profile_->knots();
    return {k.begin(), k.end()};
  }

 private:
  explicit RotSymManifold(int n) : n_(n) {
    if (n < 2) throw DomainError("manifold dimension must be >= 2");
  }
  double check(double t) const {
    if (!(t >= 0.0)) throw DomainError("negative radius");
    if (t > t_max()) throw HorizonExceeded(t, t_max());
    return t;
  }

  int n_;
  CurvatureRecovery recovery_ = CurvatureRecovery::Exact;
  std::optional<WarpingSolution> warping_;
  std::optional<PiecewiseCubic> profile_;
};

/// Radial sectional curvature -g''/g. Near the pole, where g'' and g both
/// vanish, the value is the quadratic extrapolation from t = h, 2h, 3h.
inline double radial_sectional(const RotSymManifold& mfd, double t) {
  if (!(t >= 0.0)) throw DomainError("negative radius");
  if (mfd.recovery() == CurvatureRecovery::Exact) return (*mfd.generating_curvature())(t);
  const double h = mfd.recovery() == CurvatureRecovery::Spline ? 0.05 : 1e-3;
  auto raw = [&](double r) { return -mfd.g_second(r) / mfd.g(r); };
  if (t >= h) return raw(t);
  const double k1 = raw(h), k2 = raw(2 * h), k3 = raw(3 * h);
  // Quadratic through (h,k1), (2h,k2), (3h,k3) evaluated at t.
  const double u = t / h;
  return k1 * (u - 2) * (u - 3) / 2.0 - k2 * (u - 1) * (u - 3) + k3 * (u - 1) * (u - 2) / 2.0;
}

/// Normalized radial Ricci curvature; on a rotationally symmetric manifold
/// every radial plane has the same curvature, so this equals the sectional one.
inline double radial_ricci(const RotSymManifold& mfd, double t) { return radial_sectional(mfd, t); }

/// Pointwise lower envelope of radial Ricci curvature over all directions at
/// the pole. On this class every meridian is a ray, so it is -g''/g itself,
/// sampled on the grid and interpolated by Hermite cubics with fourth-order
/// finite-difference slopes.
inline RadialCurvature curvature_envelope(const RotSymManifold& mfd, double t_max, double grid_step) {
  if (!(grid_step > 0.0)) throw DomainError("grid step must be positive");
  if (!(t_max > 0.0) || t_max > mfd.t_max()) throw HorizonExceeded(t_max, mfd.t_max());
  const int cells = std::max(4, static_cast<int>(std::ceil(t_max / grid_step)));
  const double h = t_max / cells;
  std::vector<double> x(cells + 1), y(cells + 1), d(cells + 1);
  for (int i = 0; i <= cells; ++i) {
    x[i] = i == cells ? t_max : i * h;
    y[i] = radial_ricci(mfd, x[i]);
  }
  // Fourth-order stencils: centered inside, one-sided at the two end nodes.
  auto one_sided = [h](const double* f, int at) {
    return at == 0 ? (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
                   : (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h);
  };
  const double head[5] = {y[0], y[1], y[2], y[3], y[4]};
  const double back[5] = {y[cells], y[cells - 1], y[cells - 2], y[cells - 3], y[cells - 4]};
  for (int i = 0; i <= cells; ++i) {
    if (i >= 2 && i <= cells - 2)
      d[i] = (y[i - 2] - 8 * y[i - 1] + 8 * y[i + 1] - y[i + 2]) / (12 * h);
    else if (i < 2)
      d[i] = one_sided(head, i);
    else
      d[i] = -one_sided(back, cells - i);
  }

  Tail tail = ZeroTail{};
  const double last = y.back();
  const RadialCurvature* gen = mfd.generating_curvature();
  const bool known_tail = gen != nullptr && t_max >= gen->t_tail();
  if (known_tail && std::holds_alternative<PowerLawTail>(gen->tail())) {
    tail = PowerLawTail{last, std::get<PowerLawTail>(gen->tail()).p};
  } else if (known_tail && gen->compactly_supported()) {
    y.back() = 0.0;
  } else if (std::abs(last) < 1e-6 && (known_tail || last <= 0.0)) {
    y.back() = 0.0;
  } else if (last < 0.0 || (known_tail && std::holds_alternative<ConstantTail>(gen->tail()))) {
    tail = ConstantTail{last};
  } else {
    throw Unsupported("envelope ends positive and the manifold declares no tail");
  }
  return RadialCurvature(SplineCore{PiecewiseCubic::hermite(std::move(x), std::move(y), std::move(d))}, tail, t_max);
}

/// Volume of the set of unit directions at the pole that start rays. With
/// g' > 0 every meridian is a ray, so this is the whole sphere.
inline double ray_mass(const RotSymManifold& mfd) {
  for (double t : mfd.grid())
    if (!(mfd.g_prime(t) > 0.0))
      throw Unsupported("g' <= 0 at t = " + std::to_string(t) + "; the ray set is not determined");
  if (const RadialCurvature* k = mfd.generating_curvature()) {
    if (auto* pl = std::get_if<PowerLawTail>(&k->tail()); pl && pl->c > 0.0)
      throw Unsupported("positive power-law tail: g' may turn negative beyond the horizon");
    if (auto* ct = std::get_if<ConstantTail>(&k->tail()); ct && ct->c > 0.0)
      throw Unsupported("positive constant tail: g' turns negative beyond the horizon");
  }
  return sphere_volume(mfd.n() - 1);
}

/// Growth ratio with a synthetic manifold as numerator.
inline GrowthRatio growth_ratio(const RotSymManifold& numerator, const WarpingSolution& denominator,
                                std::span<const double> horizons) {
  if (const WarpingSolution* w = numerator.warping()) return growth_ratio(numerator.n(), *w, denominator, horizons);
  if (horizons.empty()) throw DomainError("growth ratio needs at least one horizon");
  const int n = numerator.n();
  if (classify_model_volume(n, denominator).growth == VolumeGrowth::Finite)
    throw ConditionB1Violated("denominator model has finite volume");
  GrowthRatio out;
  for (double t : horizons) {
    GrowthSample s{t, numerator.ball_volume(t), model_ball_volume(n, denominator, t), 0.0};
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

}  // namespace radcomp
