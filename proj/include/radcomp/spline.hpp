#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radcomp/errors.hpp"

namespace radcomp {

/// Piecewise cubic on strictly increasing knots. Outside the knot range the
/// end pieces are extended polynomially.
class PiecewiseCubic {
 public:
  enum class Interpolation { Linear, Cubic, Hermite };

  static PiecewiseCubic linear(std::vector<double> x, std::vector<double> y) {
    PiecewiseCubic s(Interpolation::Linear, std::move(x), std::move(y), {});
    for (std::size_t i = 0; i + 1 < s.x_.size(); ++i) {
      const double h = s.x_[i + 1] - s.x_[i];
      s.coef_.push_back({s.y_[i], (s.y_[i + 1] - s.y_[i]) / h, 0.0, 0.0});
    }
    return s;
  }

  /// Natural cubic spline (zero second derivative at both ends).
  static PiecewiseCubic natural_cubic(std::vector<double> x, std::vector<double> y) {
    return cubic(std::move(x), std::move(y), std::nullopt, std::nullopt);
  }

  /// Cubic spline with prescribed end slopes.
  static PiecewiseCubic clamped_cubic(std::vector<double> x, std::vector<double> y, double d0, double dn) {
    return cubic(std::move(x), std::move(y), d0, dn);
  }

  /// Cubic Hermite interpolation with prescribed knot slopes.
  static PiecewiseCubic hermite(std::vector<double> x, std::vector<double> y, std::vector<double> d) {
    if (d.size() != y.size()) throw DomainError("hermite spline: slopes and values differ in length");
    PiecewiseCubic s(Interpolation::Hermite, std::move(x), std::move(y), std::move(d));
    for (std::size_t i = 0; i + 1 < s.x_.size(); ++i) {
      const double h = s.x_[i + 1] - s.x_[i];
      const double secant = (s.y_[i + 1] - s.y_[i]) / h;
      const double d0 = s.slopes_[i], d1 = s.slopes_[i + 1];
      s.coef_.push_back({s.y_[i], d0, (3.0 * secant - 2.0 * d0 - d1) / h, (d0 + d1 - 2.0 * secant) / (h * h)});
    }
    return s;
  }

  Interpolation interpolation() const { return kind_; }
  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }
  std::span<const double> slopes() const { return slopes_; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

  double operator()(double t) const {
    const std::size_t i = segment(t);
    const auto& c = coef_[i];
    const double u = t - x_[i];
    return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
  }

  double derivative(double t) const {
    const std::size_t i = segment(t);
    const auto& c = coef_[i];
    const double u = t - x_[i];
    return c[1] + u * (2.0 * c[2] + 3.0 * u * c[3]);
  }

  double second_derivative(double t) const {
    const std::size_t i = segment(t);
    const auto& c = coef_[i];
    return 2.0 * c[2] + 6.0 * (t - x_[i]) * c[3];
  }

 private:
  // Second derivatives M_i from the tridiagonal continuity system; an end
  // without a slope is natural (M = 0).
  static PiecewiseCubic cubic(std::vector<double> x, std::vector<double> y, std::optional<double> d0,
                              std::optional<double> dn) {
    PiecewiseCubic s(Interpolation::Cubic, std::move(x), std::move(y), {});
    const std::size_t n = s.x_.size();
    std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0), rhs(n, 0.0);
    auto h = [&](std::size_t i) { return s.x_[i + 1] - s.x_[i]; };
    auto secant = [&](std::size_t i) { return (s.y_[i + 1] - s.y_[i]) / h(i); };
    if (d0) {
      diag[0] = 2.0 * h(0);
      upper[0] = h(0);
      rhs[0] = 6.0 * (secant(0) - *d0);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      lower[i] = h(i - 1);
      diag[i] = 2.0 * (h(i - 1) + h(i));
      upper[i] = h(i);
      rhs[i] = 6.0 * (secant(i) - secant(i - 1));
    }
    if (dn) {
      lower[n - 1] = h(n - 2);
      diag[n - 1] = 2.0 * h(n - 2);
      rhs[n - 1] = 6.0 * (*dn - secant(n - 2));
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double w = lower[i] / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> m(n);
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double hi = h(i);
      s.coef_.push_back({s.y_[i], secant(i) - hi * (2.0 * m[i] + m[i + 1]) / 6.0, 0.5 * m[i],
                         (m[i + 1] - m[i]) / (6.0 * hi)});
    }
    return s;
  }

  PiecewiseCubic(Interpolation kind, std::vector<double> x, std::vector<double> y, std::vector<double> d)
      : kind_(kind), x_(std::move(x)), y_(std::move(y)), slopes_(std::move(d)) {
    if (x_.size() < 2 || x_.size() != y_.size())
      throw DomainError("spline needs at least two knots and one value per knot");
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
      if (!(x_[i + 1] > x_[i])) throw DomainError("spline knots must be strictly increasing");
  }

  std::size_t segment(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, coef_.size() - 1);
  }

  Interpolation kind_;
  std::vector<double> x_, y_, slopes_;
  std::vector<std::array<double, 4>> coef_;
};

inline std::string to_string(PiecewiseCubic::Interpolation k) {
  switch (k) {
    case PiecewiseCubic::Interpolation::Linear: return "linear";
    case PiecewiseCubic::Interpolation::Cubic: return "cubic";
    case PiecewiseCubic::Interpolation::Hermite: return "hermite";
  }
  return "linear";
}

}  // namespace radcomp
