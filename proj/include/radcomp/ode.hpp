#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "radcomp/errors.hpp"

namespace radcomp::ode {

template <std::size_t N>
using State = std::array<double, N>;

/// One accepted Dormand-Prince step together with its continuous extension.
template <std::size_t N>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  State<N> r1{}, r2{}, r3{}, r4{}, r5{};

  double t1() const { return t0 + h; }
  const State<N>& y0() const { return r1; }

  State<N> eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
    return y;
  }

  State<N> derivative(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    State<N> dy;
    for (std::size_t i = 0; i < N; ++i) {
      const double a = r4[i] + th1 * r5[i];
      const double b = r3[i] + th * a;
      const double c = r2[i] + th1 * b;
      const double db = a - th * r5[i];
      const double dc = -b + th1 * db;
      dy[i] = (c + th * dc) / h;
    }
    return dy;
  }
};

/// Piecewise-polynomial solution assembled from accepted steps.
template <std::size_t N>
class DenseTrajectory {
 public:
  DenseTrajectory() = default;
  DenseTrajectory(std::vector<DenseStep<N>> steps, State<N> y_last)
      : steps_(std::move(steps)), y_last_(y_last) {}

  bool empty() const { return steps_.empty(); }
  double t_begin() const { return steps_.front().t0; }
  double t_end() const { return steps_.back().t1(); }
  std::span<const DenseStep<N>> steps() const { return steps_; }
  const State<N>& y_end() const { return y_last_; }

  /// Index of the step containing t (clamped to the covered range).
  std::size_t locate(double t) const {
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double v, const DenseStep<N>& s) { return v < s.t0; });
    if (it == steps_.begin()) return 0;
    return static_cast<std::size_t>(it - steps_.begin()) - 1;
  }

  State<N> operator()(double t) const {
    if (steps_.empty() || t >= t_end()) return y_last_;
    return steps_[locate(t)].eval(t);
  }

  State<N> derivative(double t) const { return steps_[locate(t)].derivative(t); }

 private:
  std::vector<DenseStep<N>> steps_;
  State<N> y_last_{};
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
};

namespace detail {

// Dormand-Prince 5(4) tableau and Hairer's dense-output coefficients.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

template <std::size_t N>
double scaled_norm(const State<N>& v, const State<N>& ya, const State<N>& yb, const Options& o) {
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = o.abs_tol + o.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
    acc += (v[i] / sc) * (v[i] / sc);
  }
  return std::sqrt(acc / static_cast<double>(N));
}

template <std::size_t N>
bool all_finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

struct AlwaysContinue {
  template <class Step>
  bool operator()(const Step&) const { return true; }
};

/// Integrates y' = rhs(t, y) from t0 to t_end with an embedded 5(4) pair.
/// Steps land exactly on every breakpoint in (t0, t_end). The observer sees
/// each accepted step and may stop the integration by returning false.
template <std::size_t N, class Rhs, class Observer = AlwaysContinue>
DenseTrajectory<N> dopri5(Rhs&& rhs, double t0, State<N> y0, double t_end, const Options& opt,
                          std::span<const double> breakpoints = {}, Observer&& observer = {}) {
  using namespace detail;
  std::vector<double> stops;
  for (double b : breakpoints)
    if (b > t0 && b < t_end) stops.push_back(b);
  stops.push_back(t_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  std::vector<DenseStep<N>> steps;
  double t = t0;
  State<N> y = y0;
  State<N> k1 = rhs(t, y);

  // Initial step guess (Hairer & Wanner, II.4).
  double h;
  {
    const double d0 = scaled_norm(y, y, y, opt);
    const double d1n = scaled_norm(k1, y, y, opt);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, t_end - t0);
    State<N> y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h0 * k1[i];
    const State<N> f1 = rhs(t + h0, y1);
    State<N> df;
    for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - k1[i];
    const double d2 = scaled_norm(df, y, y, opt) / h0;
    const double dm = std::max(d1n, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min({100.0 * h0, h1, opt.max_step});
  }

  std::size_t next_stop = 0;
  bool last_rejected = false;
  long count = 0;
  State<N> k2, k3, k4, k5, k6, k7, yt, y_new;
  while (next_stop < stops.size()) {
    if (++count > opt.max_steps) throw IntegrationError("step budget exhausted", t);
    const double target = stops[next_stop];
    bool hits_stop = false;
    if (t + h >= target || (target - (t + h)) < 1e-12 * std::max(1.0, std::abs(target))) {
      h = target - t;
      hits_stop = true;
    }
    if (!(h > 1e-15 * std::max(1.0, std::abs(t)))) throw IntegrationError("step size underflow", t);

    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
    k2 = rhs(t + c2 * h, yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(t + c3 * h, yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(t + c4 * h, yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(t + c5 * h, yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double t_new = hits_stop ? target : t + h;
    k6 = rhs(t_new, yt);
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = rhs(t_new, y_new);

    State<N> err;
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    double en = scaled_norm(err, y, y_new, opt);
    if (!all_finite(y_new) || !std::isfinite(en)) en = 1e10;

    if (en > 1.0) {
      h *= std::max(0.1, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
      continue;
    }

    DenseStep<N> step;
    step.t0 = t;
    step.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = y_new[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      step.r1[i] = y[i];
      step.r2[i] = ydiff;
      step.r3[i] = bspl;
      step.r4[i] = ydiff - h * k7[i] - bspl;
      step.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    steps.push_back(step);
    t = t_new;
    y = y_new;
    k1 = k7;
    if (hits_stop) ++next_stop;

    double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
    fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
    h = std::min(h * fac, opt.max_step);
    last_rejected = false;

    if (!observer(steps.back())) break;
  }
  return DenseTrajectory<N>(std::move(steps), y);
}

}  // namespace radcomp::ode
