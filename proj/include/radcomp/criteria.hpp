#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "radcomp/curvature.hpp"
#include "radcomp/errors.hpp"
#include "radcomp/synthetic.hpp"
#include "radcomp/volume.hpp"
#include "radcomp/warping.hpp"

namespace radcomp {

/// Externally asserted bracket [lo, hi] for lim vol B_t(p) / vol B_t(model).
struct GrowthBracket {
  double lo = 0.0;
  double hi = 0.0;
};

using Numerator = std::variant<RotSymManifold, GrowthBracket>;

enum class Hypothesis { Holds, Fails, Inconclusive };
enum class Verdict { DiffeoRn, Inconclusive, DegenerateRigidity };

inline const char* to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::Holds: return "Holds";
    case Hypothesis::Fails: return "Fails";
    case Hypothesis::Inconclusive: return "Inconclusive";
  }
  return "?";
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::DiffeoRn: return "DiffeoRn";
    case Verdict::Inconclusive: return "Inconclusive";
    case Verdict::DegenerateRigidity: return "DegenerateRigidity";
  }
  return "?";
}

struct CriterionReport {
  std::string criterion;  // "main" or "corollary"
  int n = 0;
  double delta = 0.0;
  double threshold = 0.0;
  double moment = 0.0;  // -inf when divergent
  std::optional<GrowthBracket> growth_limit;
  bool b1_holds = false;
  Hypothesis b2 = Hypothesis::Inconclusive;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> diagnostics;
  std::optional<GrowthRatio> growth;  // samples when the ratio was computed
};

/// Slack for comparing a numerically computed ratio limit with the threshold.
inline constexpr double kGrowthTolerance = 1e-9;

struct CheckOptions {
  std::vector<double> horizons{2.0, 4.0, 8.0, 16.0};
  double rel_tol = 1e-12;
};

/// (pi/2) exp(int_0^inf t K*(t) dt); 0 when the moment diverges.
inline double delta_threshold(const RadialCurvature& kstar) {
  const auto mom = moment_integral(kstar);
  if (mom.divergent()) return 0.0;
  return std::numbers::pi / 2.0 * std::exp(mom.value);
}

/// Horizon used for the n-model and for numerators built by the caller, so
/// that identical curvatures yield bit-identical warping solutions.
inline double model_horizon(const RadialCurvature& g, const CheckOptions& opt) {
  double t = default_horizon(g);
  for (double h : opt.horizons) t = std::max(t, h);
  return t;
}

namespace detail {

inline Hypothesis compare(const GrowthBracket& b, double threshold) {
  if (b.lo >= threshold - kGrowthTolerance) return Hypothesis::Holds;
  if (b.hi < threshold - kGrowthTolerance) return Hypothesis::Fails;
  return Hypothesis::Inconclusive;
}

inline CriterionReport assemble(std::string criterion, int n, const RadialCurvature& g, const RadialCurvature& kstar,
                                const Numerator& numerator, const CheckOptions& opt, bool finite_branch) {
  if (n < 2) throw DomainError("dimension must be >= 2");
  CriterionReport r;
  r.criterion = std::move(criterion);
  r.n = n;
  const auto mom = moment_integral(kstar);
  r.moment = mom.value;
  r.delta = mom.divergent() ? 0.0 : std::numbers::pi / 2.0 * std::exp(mom.value);
  r.threshold = 1.0 - net_function(n, r.delta);

  const WarpingSolution model = solve_warping(g, model_horizon(g, opt), opt.rel_tol);
  const auto cls = classify_model_volume(n, model);
  r.b1_holds = cls.growth == VolumeGrowth::Divergent;
  r.diagnostics.push_back("B-1: " + cls.note);
  if (cls.growth == VolumeGrowth::Finite)
    r.diagnostics.push_back("FiniteModelVolume: " + std::to_string(cls.limit));

  if (const auto* b = std::get_if<GrowthBracket>(&numerator)) {
    if (!(b->lo >= 0.0 && b->lo <= b->hi)) throw DomainError("growth bracket must satisfy 0 <= lo <= hi");
    r.growth_limit = *b;
    r.diagnostics.push_back("growth limit declared");
  } else if (cls.growth != VolumeGrowth::Finite) {
    const auto& mfd = std::get<RotSymManifold>(numerator);
    if (mfd.n() != n) throw DomainError("numerator dimension differs from n");
    auto ratio = growth_ratio(mfd, model, opt.horizons);
    r.growth_limit = GrowthBracket{ratio.limit_lo, ratio.limit_hi};
    if (const auto mono = bishop_monotonicity_check(ratio); !mono)
      r.diagnostics.push_back("ratio not monotone: " + mono.diagnostics);
    r.growth = std::move(ratio);
  }

  r.b2 = r.growth_limit ? compare(*r.growth_limit, r.threshold) : Hypothesis::Inconclusive;
  if (finite_branch && cls.growth == VolumeGrowth::Finite) {
    r.verdict = Verdict::DiffeoRn;
  } else if (!r.b1_holds) {
    r.verdict = Verdict::Inconclusive;
  } else if (mom.divergent()) {
    r.verdict = r.b2 == Hypothesis::Holds ? Verdict::DegenerateRigidity : Verdict::Inconclusive;
  } else {
    r.verdict = r.b2 == Hypothesis::Holds ? Verdict::DiffeoRn : Verdict::Inconclusive;
  }
  if (r.b2 == Hypothesis::Fails) r.diagnostics.push_back("growth hypothesis fails; no conclusion is drawn");
  return r;
}

}  // namespace detail

/// Radial-Ricci model curvature g, radial-sectional bound k.
inline CriterionReport main_theorem_check(int n, const RadialCurvature& g, const RadialCurvature& k,
                                          const Numerator& numerator, const CheckOptions& opt = {}) {
  return detail::assemble("main", n, g, kstar(g, k), numerator, opt, false);
}

/// Same test with K* replaced by min{0, G}. A model of finite volume still
/// yields DiffeoRn.
inline CriterionReport corollary_check(int n, const RadialCurvature& g, const Numerator& numerator,
                                       const CheckOptions& opt = {}) {
  return detail::assemble("corollary", n, g, gminus(g), numerator, opt, true);
}

}  // namespace radcomp
