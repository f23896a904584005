#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "radcomp/curvature.hpp"
#include "radcomp/errors.hpp"
#include "radcomp/ode.hpp"
#include "radcomp/quadrature.hpp"

namespace radcomp {

/// Horizon used when the caller does not ask for one: far enough past the
/// curvature's core that the slope has settled.
inline double default_horizon(const RadialCurvature& k) { return std::max(10.0, 5.0 * k.t_tail()); }

/// Dense solution of m'' + K m = 0, m(0) = 0, m'(0) = 1 on [0, t_max].
class WarpingSolution {
 public:
  WarpingSolution(std::shared_ptr<const RadialCurvature> k, ode::DenseTrajectory<2> traj, double rel_tol)
      : k_(std::move(k)), traj_(std::move(traj)), rel_tol_(rel_tol) {}

  const RadialCurvature& curvature() const { return *k_; }
  std::shared_ptr<const RadialCurvature> curvature_ptr() const { return k_; }
  double t_max() const { return traj_.t_end(); }
  double rel_tol() const { return rel_tol_; }
  const ode::DenseTrajectory<2>& trajectory() const { return traj_; }

  double m(double t) const { return state(t)[0]; }
  double m_prime(double t) const { return state(t)[1]; }
  /// Derivative of the dense m' interpolant; independent of K.
  double m_second_interpolated(double t) const {
    check(t);
    return traj_.derivative(t)[1];
  }

  ode::State<2> state(double t) const {
    check(t);
    if (t == 0.0) return {0.0, 1.0};
    return traj_(t);
  }

  /// Step endpoints t_0 = 0 < ... < t_N = t_max.
  std::vector<double> grid() const {
    std::vector<double> g;
    g.reserve(traj_.steps().size() + 1);
    for (const auto& s : traj_.steps()) g.push_back(s.t0);
    g.push_back(t_max());
    return g;
  }

  /// Integral over [a,b] of f(t, m, m') by a 15-point Kronrod rule on every
  /// (partial) step of the dense output.
  template <class F>
  double integrate(F&& f, double a, double b) const {
    check(b);
    if (b <= a) return 0.0;
    double sum = 0.0;
    for (std::size_t i = traj_.locate(a); i < traj_.steps().size(); ++i) {
      const auto& st = traj_.steps()[i];
      const double lo = std::max(a, st.t0);
      const double hi = std::min(b, st.t1());
      if (hi > lo) {
        sum += quad::kronrod15(
            [&](double t) {
              const auto y = st.eval(t);
              return f(t, y[0], y[1]);
            },
            lo, hi);
      }
      if (st.t1() >= b) break;
    }
    return sum;
  }

 private:
  void check(double t) const {
    if (!(t >= 0.0)) throw DomainError("warping evaluated at negative t");
    if (t > t_max() * (1.0 + 1e-14)) throw HorizonExceeded(t, t_max());
  }

  std::shared_ptr<const RadialCurvature> k_;
  ode::DenseTrajectory<2> traj_;
  double rel_tol_;
};

/// Solves the warping ODE with an adaptive Dormand-Prince pair whose steps
/// land on every curvature breakpoint. Throws ConjugatePoint if m returns to
/// zero on (0, t_max].
inline WarpingSolution solve_warping(const RadialCurvature& k, double t_max, double rel_tol = 1e-12) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("warping horizon must be positive");
  if (!(rel_tol >= 1e-14 && rel_tol <= 1e-3)) throw DomainError("rel_tol must lie in [1e-14, 1e-3]");
  auto kp = std::make_shared<const RadialCurvature>(k);
  const RadialCurvature& kr = *kp;
  auto rhs = [&kr](double t, const ode::State<2>& y) -> ode::State<2> { return {y[1], -kr(t) * y[0]}; };
  ode::Options opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = rel_tol;
  opt.max_step = 0.25;
  std::optional<double> conjugate;
  auto observer = [&](const ode::DenseStep<2>& st) {
    const double m1 = st.r1[0] + st.r2[0];
    if (m1 <= 0.0 && (st.t0 == 0.0 ? true : st.r1[0] > 0.0)) {
      double a = st.t0 == 0.0 ? st.t0 + 1e-3 * st.h : st.t0, b = st.t1();
      for (int i = 0; i < 200 && b - a > 1e-14 * b; ++i) {
        const double mid = 0.5 * (a + b);
        (st.eval(mid)[0] > 0.0 ? a : b) = mid;
      }
      conjugate = 0.5 * (a + b);
      return false;
    }
    return true;
  };
  auto traj = ode::dopri5<2>(rhs, 0.0, {0.0, 1.0}, t_max, opt, kr.breakpoints(), observer);
  if (conjugate) throw ConjugatePoint(*conjugate);
  return WarpingSolution(std::move(kp), std::move(traj), rel_tol);
}

/// lim m'(t) with a rigorous bracket half-width.
struct SlopeLimit {
  double value = 1.0;
  double error_bound = 0.0;
};

namespace detail {

inline void require_finite_moment(const RadialCurvature& k) {
  if (!is_nonpositive(k)) throw DomainError("slope limit needs K <= 0 everywhere");
  if (std::isinf(tail_moment(k.tail(), k.t_tail())))
    throw Unbounded("moment integral diverges; m' grows without bound");
}

}  // namespace detail

namespace detail {

/// Continuation of the solution through a power-law tail in x = ln t, with
/// state (m/t, m'). There the forcing decays like exp((2-p) x) and the
/// solution relaxes to (lim m', lim m'), so large steps are accurate.
struct TailContinuation {
  ode::DenseTrajectory<2> traj;
  double amp = 0.0;  // K(t) = amp t^-p
  double p = 3.0;
  double tau_end = 0.0;  // int t |K| beyond the last x
};

inline TailContinuation continue_tail(const WarpingSolution& w) {
  const RadialCurvature& k = w.curvature();
  const auto& pl = std::get<PowerLawTail>(k.tail());
  const double T = w.t_max();
  if (T < k.t_tail()) throw HorizonExceeded(k.t_tail(), T);
  TailContinuation tc;
  tc.p = pl.p;
  tc.amp = pl.c * std::pow(k.t_tail(), pl.p);
  const double q = pl.p - 2.0;
  const double a = std::abs(tc.amp);
  auto rhs = [&](double x, const ode::State<2>& y) -> ode::State<2> {
    return {y[1] - y[0], -tc.amp * std::exp(-q * x) * y[0]};
  };
  const double x0 = std::log(T);
  const double x_end = std::max(x0 + 1.0, std::log(a / (q * 1e-17)) / q);
  ode::Options opt;
  opt.rel_tol = 1e-13;
  opt.abs_tol = 1e-13;
  tc.traj = ode::dopri5<2>(rhs, x0, {w.m(T) / T, w.m_prime(T)}, x_end, opt);
  tc.tau_end = a * std::exp(-q * x_end) / q;
  return tc;
}

}  // namespace detail

/// Limit of m'(t) as t -> inf.
///
/// Beyond a compact support m' is constant, so the value at t_tail is exact.
/// A power-law tail is followed in ln t until the remaining tail moment tau
/// is below 1e-17; the gain still possible after that is at most
/// m' (e^tau - 1) (Gronwall on m'' = -K m with m(s) <= s m'(s)).
inline SlopeLimit slope_limit(const WarpingSolution& w) {
  const RadialCurvature& k = w.curvature();
  detail::require_finite_moment(k);
  if (k.compactly_supported()) {
    if (k.t_tail() > w.t_max()) throw HorizonExceeded(k.t_tail(), w.t_max());
    return {w.m_prime(k.t_tail()), 0.0};
  }
  const auto tc = detail::continue_tail(w);
  const double v = tc.traj.y_end()[1];
  return {v, v * std::expm1(tc.tau_end) + 1e-12 * v};
}

struct TotalCurvature {
  double value = 0.0;
  double abs_error = 0.0;
};

/// Integral of K dA over the model surface, 2 pi * int_0^inf K m dt, by
/// Kronrod quadrature over the steps of the dense solution. A power-law tail
/// is integrated along its ln t continuation.
inline TotalCurvature total_curvature_direct(const WarpingSolution& w) {
  const RadialCurvature& k = w.curvature();
  detail::require_finite_moment(k);
  const double two_pi = 2.0 * std::numbers::pi;
  auto km = [&k](double t, double m, double) { return k(t) * m; };
  if (k.compactly_supported()) {
    if (k.t_tail() > w.t_max()) throw HorizonExceeded(k.t_tail(), w.t_max());
    return {two_pi * w.integrate(km, 0.0, k.t_tail()), 0.0};
  }
  const double core = w.integrate(km, 0.0, w.t_max());
  const auto tc = detail::continue_tail(w);
  const double q = tc.p - 2.0;
  // K m dt = amp t^-p (t y) t dx = amp e^(-q x) y dx.
  double rest = 0.0;
  for (const auto& st : tc.traj.steps())
    rest += quad::kronrod15([&](double x) { return tc.amp * std::exp(-q * x) * st.eval(x)[0]; }, st.t0, st.t1());
  const double bound = tc.traj.y_end()[1] * (std::expm1(tc.tau_end) * 2.0 + 1e-12);
  return {two_pi * (core + rest), two_pi * bound};
}

/// 2 pi (1 - lim m'), the total curvature through the isoperimetric identity.
inline TotalCurvature total_curvature_isoperimetric(const WarpingSolution& w) {
  const SlopeLimit s = slope_limit(w);
  return {2.0 * std::numbers::pi * (1.0 - s.value), 2.0 * std::numbers::pi * s.error_bound};
}

/// Two-dimensional model surface dt^2 + m(t)^2 dtheta^2.
class ModelSurface {
 public:
  explicit ModelSurface(const RadialCurvature& k, std::optional<double> t_max = std::nullopt,
                        double rel_tol = 1e-12)
      : warping_(solve_warping(k, t_max.value_or(std::max(20.0, default_horizon(k))), rel_tol)) {
    const auto& kr = warping_.curvature();
    nonpositive_ = is_nonpositive(kr);
    if (nonpositive_ && !std::isinf(tail_moment(kr.tail(), kr.t_tail()))) {
      slope_limit_ = radcomp::slope_limit(warping_).value;
      total_curvature_ = total_curvature_direct(warping_).value;
    }
    // Prefix sums of int K m over whole steps, for area integrals of K.
    const auto steps = warping_.trajectory().steps();
    curvature_mass_.reserve(steps.size() + 1);
    curvature_mass_.push_back(0.0);
    for (const auto& st : steps) {
      curvature_mass_.push_back(curvature_mass_.back() +
                                quad::kronrod15([&](double t) { return kr(t) * st.eval(t)[0]; }, st.t0, st.t1()));
    }
  }

  const WarpingSolution& warping() const { return warping_; }
  const RadialCurvature& curvature() const { return warping_.curvature(); }
  bool nonpositive() const { return nonpositive_; }
  std::optional<double> slope_limit() const { return slope_limit_; }
  std::optional<double> total_curvature() const { return total_curvature_; }
  double t_max() const { return warping_.t_max(); }

  double m(double t) const { return warping_.m(t); }
  double m_prime(double t) const { return warping_.m_prime(t); }

  /// int_0^r K(t) m(t) dt; the K-weighted area of the polar sector of angle 1.
  double curvature_mass(double r) const {
    if (r <= 0.0) return 0.0;
    const auto& traj = warping_.trajectory();
    if (r > t_max() * (1.0 + 1e-14)) throw HorizonExceeded(r, t_max());
    const std::size_t i = traj.locate(r);
    const auto& st = traj.steps()[i];
    const auto& kr = warping_.curvature();
    return curvature_mass_[i] +
           quad::kronrod15([&](double t) { return kr(t) * st.eval(t)[0]; }, st.t0, std::min(r, st.t1()));
  }

 private:
  WarpingSolution warping_;
  bool nonpositive_ = false;
  std::optional<double> slope_limit_;
  std::optional<double> total_curvature_;
  std::vector<double> curvature_mass_;
};

}  // namespace radcomp
