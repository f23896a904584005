#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "radcomp/cli.hpp"
#include "radcomp/radcomp.hpp"
#include "test_support.hpp"

using namespace radcomp;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Tracks the worst observed value of a quantity against its bound.
struct Worst {
  double value = 0.0;
  void see(double v) { value = std::max(value, v); }
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Outcome net_cap_identity() {
  Worst w;
  for (int n = 2; n <= 8; ++n)
    for (int i = 0; i < 50; ++i) {
      const double d = pi * i / 49;
      w.see(std::abs(cap_volume(n, d) - sphere_volume(n - 1) * net_function(n, d)));
    }
  return {w.value <= 1e-10, fmt("max |cap - omega F| = %.3g (tol 1e-10)", w.value)};
}

Outcome threshold_calibration() {
  bool ok = delta_threshold(RadialCurvature::zero()) == pi / 2;
  for (int n = 2; n <= 16; ++n) ok = ok && 1.0 - net_function(n, pi / 2) == 0.5;
  const auto ramp = RadialCurvature::linear({0.0, 1.0}, {-1.0, 0.0});
  const double err = std::abs(delta_threshold(ramp) - pi / 2 * std::exp(-1.0 / 6.0));
  return {ok && err <= 1e-10,
          std::string("flat delta and threshold exact: ") + (ok ? "yes" : "no") +
              fmt("; ramp delta error %.3g (tol 1e-10)", err)};
}

std::vector<RadialCurvature> slope_corpus() {
  std::mt19937_64 rng(101);
  std::vector<RadialCurvature> ks;
  for (int i = 0; i < 100; ++i) ks.push_back(test::random_curvature(rng, false, 2.0));
  return ks;
}

Outcome slope_sandwich() {
  double below = 0.0, above = 0.0;
  for (const auto& k : slope_corpus()) {
    const double s = slope_limit(solve_warping(k, default_horizon(k))).value;
    below = std::max(below, (1 - 1e-9) - s);
    above = std::max(above, s - (std::exp(-moment_integral(k).value) + 1e-6));
  }
  return {below <= 0.0 && above <= 0.0,
          fmt("worst lower violation %.3g, worst upper violation %.3g (both must be <= 0)", below, above)};
}

Outcome isoperimetric_identity() {
  Worst w;
  for (const auto& k : slope_corpus()) {
    const auto sol = solve_warping(k, default_horizon(k));
    w.see(std::abs(total_curvature_direct(sol).value - 2 * pi * (1 - slope_limit(sol).value)));
  }
  return {w.value <= 1e-6, fmt("max |c - 2 pi (1 - s)| = %.3g (tol 1e-6)", w.value)};
}

Outcome closed_form_geodesy() {
  const ModelSurface flat(RadialCurvature::zero(), 40.0);
  const ModelSurface hyp(RadialCurvature::constant(-1.0), 40.0);
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> rf(0.1, 8.0), rh(0.1, 5.0), th(-pi, pi);
  Worst wf, wh;
  for (int i = 0; i < 100; ++i) {
    const double r1 = rf(rng), r2 = rf(rng), a = th(rng), b = th(rng);
    const double planar = std::sqrt(r1 * r1 + r2 * r2 - 2 * r1 * r2 * std::cos(a - b));
    wf.see(std::abs(distance(flat, {r1, a}, {r2, b}) - planar));
  }
  for (int i = 0; i < 100; ++i) {
    const double r1 = rh(rng), r2 = rh(rng), a = th(rng), b = th(rng);
    const double law =
        std::acosh(std::cosh(r1) * std::cosh(r2) - std::sinh(r1) * std::sinh(r2) * std::cos(a - b));
    wh.see(std::abs(distance(hyp, {r1, a}, {r2, b}) - law));
  }
  return {wf.value <= 1e-8 && wh.value <= 1e-7,
          fmt("flat max error %.3g (tol 1e-8), hyperbolic max error %.3g (tol 1e-7)", wf.value, wh.value)};
}

// Side triple (d_ox, d_oy, d_xy) satisfying strict triangle inequalities.
std::array<double, 3> random_sides(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi), f(0.15, 0.85);
  const double a = u(rng), b = u(rng);
  const double c = std::abs(a - b) + (a + b - std::abs(a - b)) * f(rng);
  return {a, b, c};
}

Outcome gauss_bonnet() {
  const ModelSurface flat(RadialCurvature::zero(), 40.0);
  const ModelSurface hyp(RadialCurvature::constant(-1.0), 40.0);
  const ModelSurface bump(test::bump(1.0, 2.0), 40.0);
  const ModelSurface* surfaces[] = {&flat, &hyp, &bump};
  std::mt19937_64 rng(107);
  Worst w;
  for (int i = 0; i < 30; ++i) {
    const auto s = random_sides(rng, 0.3, 4.5);
    const auto& surface = *surfaces[i % 3];
    w.see(std::abs(gauss_bonnet_residual(surface, comparison_triangle(surface, s[0], s[1], s[2]))));
  }
  return {w.value <= 1e-6, fmt("max |angle sum - pi - area integral| = %.3g (tol 1e-6)", w.value)};
}

Outcome triangle_comparison() {
  const auto flat = std::make_shared<ModelSurface>(RadialCurvature::zero(), 40.0);
  const auto hyp = std::make_shared<ModelSurface>(RadialCurvature::constant(-1.0), 40.0);
  const auto shallow = std::make_shared<ModelSurface>(test::bump(0.5, 3.0), 40.0);
  const auto unit = std::make_shared<ModelSurface>(test::bump(1.0, 3.0), 40.0);
  const auto deep = std::make_shared<ModelSurface>(test::bump(2.0, 3.0), 40.0);
  // Pairs (upper, lower) with upper >= lower pointwise.
  const std::vector<std::pair<std::shared_ptr<ModelSurface>, std::shared_ptr<ModelSurface>>> pairs{
      {flat, hyp}, {flat, deep}, {shallow, deep}, {shallow, hyp}, {unit, hyp}};
  std::mt19937_64 rng(109);
  double worst = -1e300;
  for (int i = 0; i < 30; ++i) {
    const auto s = random_sides(rng, 0.5, 3.5);
    const auto& [up, lo] = pairs[i % pairs.size()];
    const auto t1 = comparison_triangle(*up, s[0], s[1], s[2]);
    const auto t2 = comparison_triangle(*lo, s[0], s[1], s[2]);
    for (int v = 0; v < 3; ++v) worst = std::max(worst, t2.angles[v] - t1.angles[v]);
  }
  return {worst <= 1e-7, fmt("max (lower-surface angle - upper-surface angle) = %.3g (tol 1e-7)", worst)};
}

Outcome bishop_gromov() {
  const std::vector<double> hs{2, 4, 8, 16};
  const auto den = solve_warping(RadialCurvature::constant(-1.0), 16.0);
  std::mt19937_64 rng(113);
  double rise = -1e300, last = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto k = kstar(test::random_curvature(rng, true, 1.0), RadialCurvature::zero());
    const auto mfd = RotSymManifold::from_curvature(2 + i % 4, k, 16.0);
    const auto r = growth_ratio(mfd, den, hs);
    for (std::size_t j = 1; j < r.samples.size(); ++j)
      rise = std::max(rise, r.samples[j].ratio - r.samples[j - 1].ratio);
    last = std::max(last, r.samples.back().ratio);
  }
  return {rise <= 1e-9 && last <= 1 + 1e-9,
          fmt("max successive increase %.3g (tol 1e-9), max final ratio %.12g (bound 1 + 1e-9)", rise, last)};
}

Outcome round_trip_curvature() {
  std::vector<RadialCurvature> ks;
  for (double a : {0.5, 1.0, 2.0})
    for (double w : {2.0, 4.0}) ks.push_back(test::bump(a, w));
  ks.push_back(RadialCurvature::formula("-(1-(t/5)^2)^3*(1+0.5*cos(3*t))", 5.0, ZeroTail{}));
  ks.push_back(RadialCurvature::formula("-0.3*(1-(t/6)^2)^3*(2+sin(2*t))", 6.0, ZeroTail{}));
  Worst w;
  for (const auto& k : ks) {
    const auto mfd = RotSymManifold::from_curvature(3, k, 12.0, 1e-12, CurvatureRecovery::DenseDerivative);
    const auto env = curvature_envelope(mfd, 10.0, 0.02);
    for (int i = 0; i <= 4000; ++i) w.see(std::abs(env(10.0 * i / 4000) - k(10.0 * i / 4000)));
  }
  return {w.value <= 1e-6, fmt("max sup-norm error on [0, 10] = %.3g (tol 1e-6)", w.value)};
}

// Verdicts of every check task in report.json.
std::vector<std::string> verdicts(const std::filesystem::path& report) {
  std::ifstream in(report);
  const auto j = io::json::parse(in);
  std::vector<std::string> out;
  for (const auto& t : j.at("tasks"))
    if (t.contains("report")) out.push_back(t["report"]["verdict"]);
  return out;
}

Outcome end_to_end(const std::filesystem::path& out_root) {
  struct Case {
    const char* scenario;
    int exit_code;
    const char* verdict;
  };
  const Case cases[] = {{"flat", 0, "DiffeoRn"},
                        {"sub_threshold", 2, "Inconclusive"},
                        {"hyperbolic", 0, "DegenerateRigidity"},
                        {"cusp_corollary", 0, "DiffeoRn"}};
  Outcome o;
  for (const auto& c : cases) {
    const auto out = out_root / c.scenario;
    std::filesystem::remove_all(out);
    cli::Overrides ov;
    ov.out_dir = out.string();
    std::ostringstream err;
    const int code = cli::run(std::filesystem::path(RADCOMP_SCENARIOS) / (std::string(c.scenario) + ".json"), ov, err);
    bool ok = code == c.exit_code;
    std::string seen;
    if (ok) {
      const auto vs = verdicts(out / "report.json");
      ok = !vs.empty();
      for (const auto& v : vs) {
        seen += (seen.empty() ? "" : "/") + v;
        ok = ok && v == c.verdict;
      }
    }
    o.pass = o.pass && ok;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + c.scenario + " exit " + std::to_string(code) +
                (seen.empty() ? "" : " " + seen);
    if (!err.str().empty()) o.detail += " [" + err.str().substr(0, err.str().size() - 1) + "]";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out_root = argc > 1 ? argv[1] : "acceptance_out";
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"net/cap identity", net_cap_identity},
      {"threshold calibration", threshold_calibration},
      {"slope limit sandwich", slope_sandwich},
      {"isoperimetric identity", isoperimetric_identity},
      {"closed-form geodesy", closed_form_geodesy},
      {"Gauss-Bonnet", gauss_bonnet},
      {"triangle comparison", triangle_comparison},
      {"Bishop-Gromov", bishop_gromov},
      {"round-trip curvature", round_trip_curvature},
      {"end-to-end verdicts", [&] { return end_to_end(out_root); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > 10.0) {
      o.pass = false;
      o.detail += fmt("; exceeded 10 s budget", 0);
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s (%.2f s) %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
