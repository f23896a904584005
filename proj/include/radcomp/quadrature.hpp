#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

namespace radcomp::quad {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kXgk[1], kXgk[3], kXgk[5], kXgk[7].
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  double value = 0.0;
  double abs_error = 0.0;
};

/// One 15-point Kronrod evaluation on [a,b]; the error is |K15 - G7|.
template <class F>
Estimate gauss_kronrod15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  int max_intervals = 4000;
};

/// Globally adaptive Gauss-Kronrod quadrature over [a,b], optionally pre-split
/// at interior breakpoints where the integrand has kinks.
template <class F>
Estimate integrate(F&& f, double a, double b, const Options& opt = {},
                   std::span<const double> breakpoints = {}) {
  if (a == b) return {};
  const double sign = b < a ? -1.0 : 1.0;
  if (b < a) std::swap(a, b);

  struct Piece {
    double a, b;
    Estimate est;
    bool operator<(const Piece& o) const { return est.abs_error < o.est.abs_error; }
  };
  std::priority_queue<Piece> heap;
  Estimate total;
  double lo = a;
  auto push = [&](double x0, double x1) {
    const Estimate e = gauss_kronrod15(f, x0, x1);
    heap.push({x0, x1, e});
    total.value += e.value;
    total.abs_error += e.abs_error;
  };
  std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts) {
    if (c > lo && c < b) {
      push(lo, c);
      lo = c;
    }
  }
  push(lo, b);

  int count = static_cast<int>(heap.size());
  while (count < opt.max_intervals &&
         total.abs_error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total.value))) {
    Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    total.value -= worst.est.value;
    total.abs_error -= worst.est.abs_error;
    push(worst.a, mid);
    push(mid, worst.b);
    ++count;
  }
  // Re-sum to shed the cancellation error of the running updates.
  Estimate out;
  while (!heap.empty()) {
    out.value += heap.top().est.value;
    out.abs_error += heap.top().est.abs_error;
    heap.pop();
  }
  out.value *= sign;
  return out;
}

/// Fixed 15-point Kronrod rule, no error estimate. Used on ODE steps where the
/// integrand is a smooth dense-output polynomial.
template <class F>
double kronrod15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = f(center) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    sum += kWgk[j] * (f(center - dx) + f(center + dx));
  }
  return sum * half;
}

}  // namespace radcomp::quad
