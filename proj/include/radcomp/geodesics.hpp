#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "radcomp/curvature.hpp"
#include "radcomp/errors.hpp"
#include "radcomp/ode.hpp"
#include "radcomp/quadrature.hpp"
#include "radcomp/roots.hpp"
#include "radcomp/warping.hpp"

namespace radcomp {

/// Point of a model surface in geodesic polar coordinates about the pole.
struct SurfacePoint {
  double t = 0.0;
  double theta = 0.0;

  static SurfacePoint pole() { return {0.0, 0.0}; }
  bool is_pole() const { return t == 0.0; }
  SurfacePoint normalized() const { return is_pole() ? pole() : *this; }
};

/// Unit-speed geodesic. Meridians are represented exactly; everything else
/// carries the dense solution of the geodesic equations in arclength.
class GeodesicPath {
 public:
  /// State (t, theta, dt/ds, dtheta/ds) at arclength s.
  ode::State<4> state(double s) const {
    s = std::clamp(s, 0.0, length_);
    if (!meridian_) return traj_(s);
    if (from_pole_) return {s, start_.theta, 1.0, 0.0};
    if (initial_angle_ == 0.0) return {start_.t + s, start_.theta, 1.0, 0.0};
    if (s <= start_.t) return {start_.t - s, start_.theta, -1.0, 0.0};
    return {s - start_.t, start_.theta + std::numbers::pi, 1.0, 0.0};
  }

  SurfacePoint at(double s) const {
    const auto y = state(s);
    return SurfacePoint{y[0], y[1]}.normalized();
  }
  SurfacePoint end() const { return at(length_); }

  const SurfacePoint& start() const { return start_; }
  double initial_angle() const { return initial_angle_; }
  double clairaut_constant() const { return clairaut_; }
  double length() const { return length_; }
  bool is_meridian() const { return meridian_; }

  /// Largest |m(t)^2 theta' - nu| over step nodes and midpoints.
  double max_clairaut_drift() const { return clairaut_drift_; }
  /// Largest |t'^2 + m^2 theta'^2 - 1| over step nodes and midpoints.
  double max_speed_defect() const { return speed_defect_; }

  /// Arclength at which the (monotone) angular coordinate reaches theta.
  double s_at_theta(double theta) const {
    if (meridian_) throw DomainError("angular coordinate is not monotone along a meridian");
    const auto steps = traj_.steps();
    const bool rising = clairaut_ > 0.0;
    auto before = [&](double th) { return rising ? th < theta : th > theta; };
    std::size_t i = 0;
    while (i + 1 < steps.size() && before(steps[i + 1].y0()[1])) ++i;
    const auto& st = steps[i];
    double a = st.t0, b = std::min(st.t1(), length_);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
      const double mid = 0.5 * (a + b);
      (before(st.eval(mid)[1]) ? a : b) = mid;
    }
    return 0.5 * (a + b);
  }

  /// (s, t, theta) at roughly uniform arclength spacing, endpoints included.
  std::vector<std::array<double, 3>> samples(double ds) const {
    std::vector<std::array<double, 3>> out;
    const int n = std::max(1, static_cast<int>(std::ceil(length_ / ds)));
    for (int i = 0; i <= n; ++i) {
      const double s = length_ * i / n;
      const auto y = state(s);
      out.push_back({s, y[0], y[1]});
    }
    return out;
  }

 private:
  friend GeodesicPath make_meridian(SurfacePoint, double, double);
  template <class S>
  friend GeodesicPath make_geodesic(const S&, SurfacePoint, double, ode::DenseTrajectory<4>, double, double);

  SurfacePoint start_;
  double initial_angle_ = 0.0;
  double clairaut_ = 0.0;
  double length_ = 0.0;
  bool meridian_ = true;
  bool from_pole_ = false;
  ode::DenseTrajectory<4> traj_;
  double clairaut_drift_ = 0.0;
  double speed_defect_ = 0.0;
};

/// Radial geodesic: angle 0 outward, pi inward (through the pole onto the
/// opposite meridian). From the pole `angle` names the meridian's theta.
inline GeodesicPath make_meridian(SurfacePoint start, double angle, double length) {
  GeodesicPath p;
  p.start_ = start.normalized();
  p.from_pole_ = start.is_pole();
  p.initial_angle_ = p.from_pole_ ? angle : (angle == 0.0 ? 0.0 : std::numbers::pi);
  if (p.from_pole_) p.start_.theta = angle;
  p.length_ = length;
  p.meridian_ = true;
  return p;
}

template <class Surface>
GeodesicPath make_geodesic(const Surface& surface, SurfacePoint start, double angle,
                           ode::DenseTrajectory<4> traj, double nu, double length) {
  GeodesicPath p;
  p.start_ = start;
  p.initial_angle_ = angle;
  p.clairaut_ = nu;
  p.length_ = length;
  p.meridian_ = false;
  p.traj_ = std::move(traj);
  auto check = [&](const ode::State<4>& y) {
    const double m = surface.m(y[0]);
    p.clairaut_drift_ = std::max(p.clairaut_drift_, std::abs(m * m * y[3] - nu));
    p.speed_defect_ = std::max(p.speed_defect_, std::abs(y[2] * y[2] + m * m * y[3] * y[3] - 1.0));
  };
  for (const auto& st : p.traj_.steps()) {
    if (st.t0 > length) break;
    check(st.y0());
    check(st.eval(std::min(st.t0 + 0.5 * st.h, length)));
  }
  check(p.traj_(length));
  return p;
}

namespace detail {

inline void require_cartan_hadamard(const ModelSurface& s) {
  if (!s.nonpositive())
    throw DomainError("geodesic operations are restricted to surfaces with curvature <= 0");
}

inline ode::Options geodesic_options() {
  ode::Options o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-16;
  o.max_step = 0.5;
  return o;
}

// t'' = m m' theta'^2, theta'' = -2 (m'/m) t' theta'.
inline auto geodesic_rhs(const ModelSurface& surface) {
  return [&surface](double, const ode::State<4>& y) -> ode::State<4> {
    const double t = y[0];
    if (!(t > 0.0) || t > surface.t_max()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      return {nan, nan, nan, nan};
    }
    // m' is the derivative of the m interpolant itself, so that m^2 theta'
    // is an exact first integral of the system being integrated.
    const auto& traj = surface.warping().trajectory();
    const double m = traj(t)[0], dm = traj.derivative(t)[0];
    return {y[2], y[3], m * dm * y[3] * y[3], -2.0 * (dm / m) * y[2] * y[3]};
  };
}

inline ode::State<4> initial_state(const ModelSurface& surface, SurfacePoint p, double angle) {
  return {p.t, p.theta, std::cos(angle), std::sin(angle) / surface.m(p.t)};
}

}  // namespace detail

/// Geodesic from `start` leaving at `angle` from the outward radial direction
/// (positive angles turn towards increasing theta), followed for `length`.
inline GeodesicPath shoot(const ModelSurface& surface, SurfacePoint start, double angle, double length) {
  detail::require_cartan_hadamard(surface);
  if (!(length >= 0.0)) throw DomainError("geodesic length must be >= 0");
  start = start.normalized();
  if (start.is_pole()) return make_meridian(start, angle, length);
  const double sn = std::sin(angle);
  if (std::abs(sn) < 1e-300) return make_meridian(start, std::cos(angle) > 0.0 ? 0.0 : std::numbers::pi, length);
  if (length == 0.0) {
    return make_geodesic(surface, start, angle, ode::DenseTrajectory<4>({}, detail::initial_state(surface, start, angle)),
                         surface.m(start.t) * sn, 0.0);
  }
  const double nu = surface.m(start.t) * sn;
  const double cap = surface.t_max();
  auto traj = ode::dopri5<4>(detail::geodesic_rhs(surface), 0.0, detail::initial_state(surface, start, angle),
                             length, detail::geodesic_options(), {},
                             [&](const ode::DenseStep<4>& st) {
                               if (st.r1[0] + st.r2[0] > cap * (1.0 - 1e-12))
                                 throw HorizonExceeded(st.r1[0] + st.r2[0], cap);
                               return true;
                             });
  return make_geodesic(surface, start, angle, std::move(traj), nu, length);
}

namespace detail {

struct Crossing {
  double t_at = std::numeric_limits<double>::infinity();  // +inf: escaped outward
  double s_at = 0.0;
  ode::DenseTrajectory<4> traj;
};

// Shoots from (t0, 0) at angle phi in (0, pi) until theta reaches target.
inline Crossing cross_meridian(const ModelSurface& surface, double t0, double phi, double target,
                               double t_escape) {
  const SurfacePoint start{t0, 0.0};
  const double s_max = 4.0 * surface.t_max();
  std::optional<std::pair<double, double>> hit;
  auto traj = ode::dopri5<4>(
      geodesic_rhs(surface), 0.0, initial_state(surface, start, phi), s_max, geodesic_options(), {},
      [&](const ode::DenseStep<4>& st) {
        const double th1 = st.r1[1] + st.r2[1];
        const double t1 = st.r1[0] + st.r2[0];
        const double dt1 = st.r1[2] + st.r2[2];
        if (th1 >= target) {
          double a = st.t0, b = st.t1();
          for (int i = 0; i < 200 && b - a > 1e-16 * std::max(1.0, b); ++i) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            (st.eval(mid)[1] < target ? a : b) = mid;
          }
          const double s = 0.5 * (a + b);
          hit = {s, st.eval(s)[0]};
          return false;
        }
        return !(dt1 > 0.0 && t1 > t_escape);
      });
  Crossing c;
  if (hit) {
    c.s_at = hit->first;
    c.t_at = hit->second;
  }
  c.traj = std::move(traj);
  return c;
}

}  // namespace detail

/// Minimizing geodesic from a to b; unique on a surface with K <= 0.
///
/// Off-meridian pairs are solved by shooting from a: the radius at which the
/// shot crosses b's meridian decreases monotonically in the launch angle, and
/// Brent's method on that map converges globally.
inline GeodesicPath connect(const ModelSurface& surface, SurfacePoint a, SurfacePoint b) {
  detail::require_cartan_hadamard(surface);
  a = a.normalized();
  b = b.normalized();
  if (a.t < 0.0 || b.t < 0.0) throw DomainError("radial coordinate must be >= 0");
  if (a.t > surface.t_max() || b.t > surface.t_max())
    throw HorizonExceeded(std::max(a.t, b.t), surface.t_max());
  if (a.is_pole()) return make_meridian(a, b.theta, b.t);
  if (b.is_pole()) return make_meridian(a, std::numbers::pi, a.t);
  constexpr double pi = std::numbers::pi;
  const double delta = std::remainder(b.theta - a.theta, 2.0 * pi);
  if (delta == 0.0) return b.t >= a.t ? make_meridian(a, 0.0, b.t - a.t) : make_meridian(a, pi, a.t - b.t);
  if (std::abs(delta) >= pi * (1.0 - 1e-15)) return make_meridian(a, pi, a.t + b.t);

  const double span = std::abs(delta);
  const double sign = delta > 0.0 ? 1.0 : -1.0;
  const double t_escape = std::min(surface.t_max() * 0.999, 2.0 * (a.t + b.t) + 1.0);
  auto mismatch = [&](double phi) { return detail::cross_meridian(surface, a.t, phi, span, t_escape).t_at - b.t; };
  // Bracket: the crossing radius falls from "never" (phi -> 0) to 0 (phi -> pi).
  double lo = 1e-3;
  double flo = mismatch(lo);
  while (!(flo > 0.0) && lo > 1e-12) {
    lo *= 1e-3;
    flo = mismatch(lo);
  }
  double hi = pi - 1e-3;
  double fhi = mismatch(hi);
  while (fhi > 0.0 && pi - hi > 1e-12) {
    hi = pi - (pi - hi) * 1e-2;
    fhi = mismatch(hi);
  }
  if (fhi > 0.0) throw DomainError("target point too close to the pole to bracket the shooting angle");
  const double phi = brent_root(mismatch, lo, hi, flo, fhi, 1e-15);
  auto hit = detail::cross_meridian(surface, a.t, phi, span, t_escape);
  if (std::isinf(hit.t_at)) throw IntegrationError("shooting converged to an escaping geodesic", phi);

  // Reflect into the actual orientation.
  ode::DenseTrajectory<4> traj = std::move(hit.traj);
  if (sign < 0.0 || a.theta != 0.0) {
    std::vector<ode::DenseStep<4>> steps(traj.steps().begin(), traj.steps().end());
    auto flip = [&](ode::State<4>& r, bool offset) {
      r[1] = sign * r[1] + (offset ? a.theta : 0.0);
      r[3] *= sign;
    };
    for (auto& st : steps) {
      flip(st.r1, true);
      flip(st.r2, false);
      flip(st.r3, false);
      flip(st.r4, false);
      flip(st.r5, false);
    }
    ode::State<4> last = traj.y_end();
    flip(last, true);
    traj = ode::DenseTrajectory<4>(std::move(steps), last);
  }
  return make_geodesic(surface, a, sign * phi, std::move(traj), sign * surface.m(a.t) * std::sin(phi), hit.s_at);
}

inline double distance(const ModelSurface& surface, SurfacePoint a, SurfacePoint b) {
  return connect(surface, a, b).length();
}

/// Geodesic triangle with one vertex at the pole.
struct GeodesicTriangle {
  std::array<SurfacePoint, 3> vertices;  // pole, x, y
  std::array<double, 3> side_lengths{};  // d(o,x), d(o,y), d(x,y)
  std::array<double, 3> angles{};        // at o, x, y
  GeodesicPath side_xy;
  bool area_integrand_ready = false;

  double angle_sum() const { return angles[0] + angles[1] + angles[2]; }
};

/// Triangle on the surface with the prescribed side lengths, x on theta = 0
/// and y at the pole angle for which d(x,y) = d_xy.
inline GeodesicTriangle comparison_triangle(const ModelSurface& surface, double d_ox, double d_oy, double d_xy) {
  detail::require_cartan_hadamard(surface);
  if (!(d_ox > 0.0 && d_oy > 0.0 && d_xy > 0.0)) throw DomainError("triangle sides must be positive");
  if (!(d_xy < d_ox + d_oy && d_ox < d_oy + d_xy && d_oy < d_ox + d_xy))
    throw DomainError("triangle inequality must hold strictly");
  constexpr double pi = std::numbers::pi;
  const SurfacePoint x{d_ox, 0.0};
  auto gap = [&](double theta) { return distance(surface, x, {d_oy, theta}) - d_xy; };
  const double g0 = std::abs(d_ox - d_oy) - d_xy;
  const double gpi = d_ox + d_oy - d_xy;
  if (gpi < 0.0) throw SectorExceeded("pole angle would exceed pi");
  const double theta = brent_root(gap, 0.0, pi, g0, gpi, 1e-15);

  GeodesicTriangle tri;
  tri.vertices = {SurfacePoint::pole(), x, SurfacePoint{d_oy, theta}};
  tri.side_xy = connect(surface, x, tri.vertices[2]);
  tri.side_lengths = {d_ox, d_oy, tri.side_xy.length()};
  const double phi = tri.side_xy.initial_angle();
  const auto end = tri.side_xy.state(tri.side_xy.length());
  const double m_end = surface.m(end[0]);
  tri.angles = {theta, std::atan2(std::sin(phi), -std::cos(phi)), std::atan2(std::abs(m_end * end[3]), end[2])};
  tri.area_integrand_ready = !tri.side_xy.is_meridian();
  return tri;
}

/// (angle sum - pi) minus the integral of K over the triangle.
///
/// The triangle is star-shaped from the pole, so the area integral is
/// int_0^theta* int_0^T(theta) K m dt dtheta with T(theta) the radius of the
/// side x-y at angle theta. The inner integral uses the surface's prefix
/// table; the outer one is adaptive Gauss-Kronrod.
inline double gauss_bonnet_residual(const ModelSurface& surface, const GeodesicTriangle& tri) {
  detail::require_cartan_hadamard(surface);
  if (!tri.area_integrand_ready) throw DomainError("triangle has no off-meridian side to integrate against");
  const double theta_star = tri.vertices[2].theta;
  const auto& side = tri.side_xy;
  auto radius_at = [&](double theta) {
    if (theta <= 0.0) return side.state(0.0)[0];
    if (theta >= theta_star) return side.state(side.length())[0];
    return side.state(side.s_at_theta(theta))[0];
  };
  const auto area = quad::integrate([&](double th) { return surface.curvature_mass(radius_at(th)); }, 0.0,
                                    theta_star, {1e-12, 1e-11, 2000});
  return tri.angle_sum() - std::numbers::pi - area.value;
}

/// (pi/2 - apex) exp(int t K dt); at apex 0 this is the critical angle delta(K).
inline double critical_angle_bound(const ModelSurface& surface, double apex_angle_at_far_vertex) {
  if (!(apex_angle_at_far_vertex >= 0.0 && apex_angle_at_far_vertex <= std::numbers::pi / 2))
    throw DomainError("apex angle must lie in [0, pi/2]");
  const MomentIntegral mom = moment_integral(surface.curvature());
  if (mom.divergent()) return 0.0;
  return (std::numbers::pi / 2 - apex_angle_at_far_vertex) * std::exp(mom.value);
}

}  // namespace radcomp
