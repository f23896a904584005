#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "radcomp/errors.hpp"
#include "radcomp/expression.hpp"
#include "radcomp/quadrature.hpp"
#include "radcomp/spline.hpp"

namespace radcomp {

class RadialCurvature;

// ---------------------------------------------------------------------------
// Tails: the declared behaviour of a curvature function beyond its core.

/// K(t) = 0 for t >= t_tail.
struct ZeroTail {};

/// K(t) = c (t_tail / t)^p for t >= t_tail, with p > 2 so that t K(t) is
/// integrable at infinity.
struct PowerLawTail {
  double c = 0.0;
  double p = 3.0;
};

/// K(t) = c for t >= t_tail. A negative constant makes the moment divergent.
struct ConstantTail {
  double c = 0.0;
};

using Tail = std::variant<ZeroTail, PowerLawTail, ConstantTail>;

// ---------------------------------------------------------------------------
// Cores: the curvature on [0, t_tail].

struct SplineCore {
  PiecewiseCubic spline;
};

/// Closed form in t. `breakpoints` lists interior points where the formula has
/// kinks; quadrature and ODE steps are split there.
struct FormulaCore {
  Expression expr;
  std::vector<double> breakpoints;
};

/// Interval-wise selection among whole curvature functions; this is how
/// pointwise minima are represented without resampling.
struct CorePiece {
  double from = 0.0;
  double to = 0.0;
  std::shared_ptr<const RadialCurvature> source;
};
struct PiecewiseCore {
  std::vector<CorePiece> pieces;
  std::vector<double> breakpoints;
};

using Core = std::variant<SplineCore, FormulaCore, PiecewiseCore>;

inline double tail_value(const Tail& tail, double t_tail, double t) {
  return std::visit(
      [&](const auto& tl) -> double {
        using T = std::decay_t<decltype(tl)>;
        if constexpr (std::is_same_v<T, ZeroTail>) return 0.0;
        else if constexpr (std::is_same_v<T, PowerLawTail>) return tl.c * std::pow(t_tail / t, tl.p);
        else return tl.c;
      },
      tail);
}

/// Radial curvature function on [0, inf): a core on [0, t_tail] joined
/// value-continuously to a declared tail. Immutable once constructed.
class RadialCurvature {
 public:
  RadialCurvature(Core core, Tail tail, double t_tail)
      : core_(std::move(core)), tail_(tail), t_tail_(t_tail) {
    validate();
  }

  /// K = c on all of [0, inf).
  static RadialCurvature constant(double c) {
    Tail tail = c == 0.0 ? Tail{ZeroTail{}} : Tail{ConstantTail{c}};
    return RadialCurvature(SplineCore{PiecewiseCubic::linear({0.0, 1.0}, {c, c})}, tail, 1.0);
  }

  static RadialCurvature zero() { return constant(0.0); }

  static RadialCurvature formula(const std::string& expr, double t_tail, Tail tail,
                                 std::vector<double> breakpoints = {}) {
    return RadialCurvature(FormulaCore{Expression(expr), std::move(breakpoints)}, tail, t_tail);
  }

  /// Linear spline through (breakpoints, values); the last breakpoint is t_tail.
  static RadialCurvature linear(std::vector<double> x, std::vector<double> y, Tail tail = ZeroTail{}) {
    const double tt = x.empty() ? 0.0 : x.back();
    return RadialCurvature(SplineCore{PiecewiseCubic::linear(std::move(x), std::move(y))}, tail, tt);
  }

  const Core& core() const { return core_; }
  const Tail& tail() const { return tail_; }
  double t_tail() const { return t_tail_; }

  double operator()(double t) const {
    if (!(t >= 0.0)) throw DomainError("curvature evaluated at negative t = " + std::to_string(t));
    if (t > t_tail_) return tail_value(tail_, t_tail_, t);
    return core_value(t);
  }
  double eval(double t) const { return (*this)(t); }

  /// Sorted kink locations in [0, t_tail], always containing 0 and t_tail.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  /// True when the tail is identically zero, i.e. the support is [0, t_tail].
  bool compactly_supported() const {
    if (std::holds_alternative<ZeroTail>(tail_)) return true;
    if (auto* c = std::get_if<ConstantTail>(&tail_)) return c->c == 0.0;
    if (auto* p = std::get_if<PowerLawTail>(&tail_)) return p->c == 0.0;
    return false;
  }

 private:
  double core_value(double t) const {
    return std::visit(
        [&](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, SplineCore>) return c.spline(t);
          else if constexpr (std::is_same_v<T, FormulaCore>) return c.expr(t);
          else {
            auto it = std::upper_bound(c.pieces.begin(), c.pieces.end(), t,
                                       [](double v, const CorePiece& p) { return v < p.from; });
            if (it != c.pieces.begin()) --it;
            return (*it->source)(t);
          }
        },
        core_);
  }

  void validate() {
    if (!(t_tail_ > 0.0) || !std::isfinite(t_tail_))
      throw DomainError("t_tail must be positive and finite");
    if (auto* pl = std::get_if<PowerLawTail>(&tail_)) {
      if (!(pl->p > 2.0))
        throw DomainError("PowerLaw tail requires p > 2 for the moment integral to converge (got p = " +
                          std::to_string(pl->p) + ")");
    }
    std::vector<double> bps{0.0, t_tail_};
    if (auto* s = std::get_if<SplineCore>(&core_)) {
      const auto k = s->spline.knots();
      if (k.front() != 0.0 || std::abs(k.back() - t_tail_) > 1e-12 * std::max(1.0, t_tail_))
        throw DomainError("spline core must span [0, t_tail]");
      bps.insert(bps.end(), k.begin(), k.end());
    } else if (auto* f = std::get_if<FormulaCore>(&core_)) {
      for (double b : f->breakpoints) {
        if (!(b >= 0.0 && b <= t_tail_)) throw DomainError("formula breakpoint outside [0, t_tail]");
        bps.push_back(b);
      }
    } else {
      const auto& pc = std::get<PiecewiseCore>(core_);
      if (pc.pieces.empty()) throw DomainError("piecewise core without pieces");
      for (const auto& p : pc.pieces) bps.push_back(p.from);
      bps.insert(bps.end(), pc.breakpoints.begin(), pc.breakpoints.end());
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    bps.erase(std::remove_if(bps.begin(), bps.end(), [&](double b) { return b < 0.0 || b > t_tail_; }),
              bps.end());
    breakpoints_ = std::move(bps);

    // Finite on a sampling grid, and value-continuous at the junction.
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
      for (int j = 0; j <= 16; ++j) {
        const double t = breakpoints_[i] + (breakpoints_[i + 1] - breakpoints_[i]) * j / 16.0;
        if (!std::isfinite(core_value(t)))
          throw DomainError("curvature core is not finite at t = " + std::to_string(t));
      }
    }
    const double at_core = core_value(t_tail_);
    const double at_tail = tail_value(tail_, t_tail_, t_tail_);
    if (std::abs(at_core - at_tail) > 1e-9 * std::max(1.0, std::abs(at_tail)))
      throw DomainError("core and tail disagree at t_tail = " + std::to_string(t_tail_) + " (" +
                        std::to_string(at_core) + " vs " + std::to_string(at_tail) + ")");
  }

  Core core_;
  Tail tail_;
  double t_tail_;
  std::vector<double> breakpoints_;
};

/// Value of the improper integral of t K(t) over [0, inf). Divergence to -inf
/// is represented by value == -infinity.
struct MomentIntegral {
  double value = 0.0;
  double abs_error = 0.0;

  bool divergent() const { return std::isinf(value); }
};

inline constexpr double kNegInfinity = -std::numeric_limits<double>::infinity();

/// Samples the core densely and checks the tail sign. `tol` absorbs round-off
/// at crossings produced by pointwise minima.
inline bool is_nonpositive(const RadialCurvature& k, double tol = 1e-12) {
  const bool tail_ok = std::visit(
      [](const auto& tl) {
        using T = std::decay_t<decltype(tl)>;
        if constexpr (std::is_same_v<T, ZeroTail>) return true;
        else return tl.c <= 0.0;
      },
      k.tail());
  if (!tail_ok) return false;
  const auto& b = k.breakpoints();
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    for (int j = 0; j <= 64; ++j) {
      const double t = b[i] + (b[i + 1] - b[i]) * j / 64.0;
      if (k(t) > tol) return false;
    }
  }
  return true;
}

/// Closed-form contribution of the tail to the integral of t K(t).
inline double tail_moment(const Tail& tail, double t_tail) {
  return std::visit(
      [&](const auto& tl) -> double {
        using T = std::decay_t<decltype(tl)>;
        if constexpr (std::is_same_v<T, ZeroTail>) return 0.0;
        else if constexpr (std::is_same_v<T, PowerLawTail>) return tl.c * t_tail * t_tail / (tl.p - 2.0);
        else return tl.c < 0.0 ? kNegInfinity : (tl.c == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      },
      tail);
}

/// Integral of t K(t) over [0, inf) for K <= 0: adaptive quadrature on the core
/// split at every breakpoint, plus the tail in closed form.
inline MomentIntegral moment_integral(const RadialCurvature& k) {
  if (!is_nonpositive(k))
    throw DomainError("moment_integral needs K <= 0 everywhere; apply kstar or gminus first");
  const double tail = tail_moment(k.tail(), k.t_tail());
  if (std::isinf(tail)) return {kNegInfinity, 0.0};
  const auto est = quad::integrate([&](double t) { return t * k(t); }, 0.0, k.t_tail(),
                                   {1e-15, 1e-14, 20000}, k.breakpoints());
  return {est.value + tail, est.abs_error};
}

namespace detail {

struct NegativeTail {
  bool constant = false;
  double c = 0.0;
  double p = 0.0;
  double anchor = 0.0;

  double at(double t) const { return constant ? c : c * std::pow(anchor / t, p); }
  // |c| anchor^p, the power-law amplitude.
  double amplitude() const { return std::abs(c) * std::pow(anchor, p); }
};

inline std::optional<NegativeTail> negative_part(const RadialCurvature& k) {
  if (auto* pl = std::get_if<PowerLawTail>(&k.tail()); pl && pl->c < 0.0)
    return NegativeTail{false, pl->c, pl->p, k.t_tail()};
  if (auto* ct = std::get_if<ConstantTail>(&k.tail()); ct && ct->c < 0.0)
    return NegativeTail{true, ct->c, 0.0, k.t_tail()};
  return std::nullopt;
}

// Bisection for the sign change of d on [a,b]; d(a) <= 0 <= d(b) assumed.
template <class D>
double crossing(D&& d, double a, double b) {
  if (d(b) == 0.0) return b;
  if (d(a) == 0.0) return a;
  const double tol = 1e-12;
  while (b - a > tol * std::max(1.0, std::abs(a))) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (d(mid) < 0.0) a = mid;
    else b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Pointwise minimum of several curvature functions.
///
/// The core is an interval-wise selection on the union of all breakpoints,
/// with selection changes located by bisection to 1e-12 in t. Beyond the last
/// junction the most negative tail takes over; the core is extended as far as
/// needed for that tail to dominate, and the tail is re-anchored there.
inline RadialCurvature pointwise_min(std::vector<std::shared_ptr<const RadialCurvature>> sources) {
  if (sources.empty()) throw DomainError("pointwise_min of an empty set");
  double t_star = 0.0;
  for (const auto& s : sources) t_star = std::max(t_star, s->t_tail());

  std::vector<detail::NegativeTail> neg;
  for (const auto& s : sources)
    if (auto nt = detail::negative_part(*s)) neg.push_back(*nt);

  Tail tail = ZeroTail{};
  double t_end = t_star;
  if (!neg.empty()) {
    auto cmin = std::min_element(neg.begin(), neg.end(), [](const auto& a, const auto& b) {
      return a.constant != b.constant ? a.constant : (a.constant && a.c < b.c);
    });
    if (cmin->constant) {
      // A negative constant dominates once every power law has decayed above it.
      for (const auto& nt : neg)
        if (!nt.constant && nt.at(t_star) < cmin->c)
          t_end = std::max(t_end, std::pow(nt.amplitude() / std::abs(cmin->c), 1.0 / nt.p));
      tail = ConstantTail{cmin->c};
    } else {
      // Smallest exponent decays slowest; ties go to the larger amplitude.
      auto dom = std::min_element(neg.begin(), neg.end(), [](const auto& a, const auto& b) {
        return a.p != b.p ? a.p < b.p : a.amplitude() > b.amplitude();
      });
      for (const auto& nt : neg)
        if (nt.p > dom->p)
          t_end = std::max(t_end, std::pow(nt.amplitude() / dom->amplitude(), 1.0 / (nt.p - dom->p)));
      tail = PowerLawTail{dom->c * std::pow(dom->anchor / t_end, dom->p), dom->p};
    }
  }

  std::vector<double> grid{0.0, t_end};
  for (const auto& s : sources) {
    for (double b : s->breakpoints())
      if (b < t_end) grid.push_back(b);
    if (s->t_tail() < t_end) grid.push_back(s->t_tail());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto value = [&](std::size_t i, double t) { return (*sources[i])(t); };
  auto min_value = [&](double t) {
    double v = value(0, t);
    for (std::size_t i = 1; i < sources.size(); ++i) v = std::min(v, value(i, t));
    return v;
  };
  // Minimal source at a, ties broken by the value just to the right of a.
  auto select = [&](double a, double b) {
    const double probe = a + 1e-7 * (b - a);
    std::size_t best = 0;
    double va = value(0, a), vp = value(0, probe);
    for (std::size_t i = 1; i < sources.size(); ++i) {
      const double wa = value(i, a), wp = value(i, probe);
      const double tie = 1e-14 * (1.0 + std::abs(va));
      if (wa < va - tie || (std::abs(wa - va) <= tie && wp < vp)) {
        best = i;
        va = wa;
        vp = wp;
      }
    }
    return best;
  };

  std::vector<CorePiece> pieces;
  std::vector<double> kinks;
  auto open_piece = [&](double from, std::size_t src) {
    if (!pieces.empty() && pieces.back().source == sources[src]) return;
    if (!pieces.empty()) pieces.back().to = from;
    pieces.push_back({from, t_end, sources[src]});
  };

  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double a = grid[g], b = grid[g + 1];
    const int cells = std::clamp(static_cast<int>(std::ceil((b - a) / 0.02)), 16, 4096);
    std::size_t s0 = select(a, b);
    open_piece(a, s0);
    double x0 = a;
    for (int j = 1; j <= cells; ++j) {
      const double x1 = j == cells ? b : a + (b - a) * j / cells;
      // Walk every selection change inside (x0, x1].
      while (value(s0, x1) > min_value(x1)) {
        double lo = x0, hi = x1;
        while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo))) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          if (value(s0, mid) <= min_value(mid)) lo = mid;
          else hi = mid;
        }
        std::size_t next = select(hi, x1);
        if (next == s0) next = select(x1, x1 + (x1 - x0));
        s0 = next;
        kinks.push_back(lo);
        open_piece(lo, s0);
        x0 = lo;
      }
      x0 = x1;
    }
  }
  for (auto& p : pieces) kinks.push_back(p.from);
  kinks.insert(kinks.end(), grid.begin(), grid.end());
  return RadialCurvature(PiecewiseCore{std::move(pieces), std::move(kinks)}, tail, t_end);
}

/// K* = min{0, G, K}.
inline RadialCurvature kstar(const RadialCurvature& g, const RadialCurvature& k) {
  return pointwise_min({std::make_shared<const RadialCurvature>(RadialCurvature::zero()),
                        std::make_shared<const RadialCurvature>(g),
                        std::make_shared<const RadialCurvature>(k)});
}

/// G_- = min{0, G}.
inline RadialCurvature gminus(const RadialCurvature& g) {
  return pointwise_min({std::make_shared<const RadialCurvature>(RadialCurvature::zero()),
                        std::make_shared<const RadialCurvature>(g)});
}

}  // namespace radcomp
