#pragma once

#include <fstream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radcomp/criteria.hpp"
#include "radcomp/curvature.hpp"
#include "radcomp/errors.hpp"
#include "radcomp/geodesics.hpp"
#include "radcomp/synthetic.hpp"
#include "radcomp/volume.hpp"
#include "radcomp/warping.hpp"

namespace radcomp {

inline constexpr const char* kVersion = "1.0.0";

namespace io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where + "." + key, "missing field");
  return *it;
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where, "expected a number");
  return j.get<double>();
}

inline std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Curvature JSON.

inline ordered_json tail_to_json(const Tail& tail) {
  ordered_json j;
  if (std::holds_alternative<ZeroTail>(tail)) {
    j["kind"] = "zero";
  } else if (auto* p = std::get_if<PowerLawTail>(&tail)) {
    j["kind"] = "power_law";
    j["c"] = p->c;
    j["p"] = p->p;
  } else {
    j["kind"] = "constant";
    j["c"] = std::get<ConstantTail>(tail).c;
  }
  return j;
}

inline Tail tail_from_json(const json& j, const std::string& where = "tail") {
  const auto& kind = detail::require(j, "kind", where);
  if (!kind.is_string()) throw SchemaError(where + ".kind", "expected a string");
  const auto k = kind.get<std::string>();
  if (k == "zero") return ZeroTail{};
  if (k == "power_law")
    return PowerLawTail{detail::number(detail::require(j, "c", where), where + ".c"),
                        detail::number(detail::require(j, "p", where), where + ".p")};
  if (k == "constant") return ConstantTail{detail::number(detail::require(j, "c", where), where + ".c")};
  throw SchemaError(where + ".kind", "unknown tail kind '" + k + "' (zero, power_law, constant)");
}

inline ordered_json to_json(const RadialCurvature& k) {
  ordered_json core;
  if (auto* s = std::get_if<SplineCore>(&k.core())) {
    const auto x = s->spline.knots();
    const auto y = s->spline.values();
    core["kind"] = "spline";
    core["interpolation"] = to_string(s->spline.interpolation());
    core["breakpoints"] = std::vector<double>(x.begin(), x.end());
    core["values"] = std::vector<double>(y.begin(), y.end());
    if (s->spline.interpolation() == PiecewiseCubic::Interpolation::Hermite) {
      const auto d = s->spline.slopes();
      core["slopes"] = std::vector<double>(d.begin(), d.end());
    }
  } else if (auto* f = std::get_if<FormulaCore>(&k.core())) {
    core["kind"] = "formula";
    core["expr"] = f->expr.source();
    core["breakpoints"] = f->breakpoints;
  } else {
    const auto& pc = std::get<PiecewiseCore>(k.core());
    core["kind"] = "piecewise";
    core["breakpoints"] = pc.breakpoints;
    ordered_json pieces = ordered_json::array();
    for (const auto& p : pc.pieces) {
      ordered_json e;
      e["from"] = p.from;
      e["to"] = p.to;
      e["source"] = to_json(*p.source);
      pieces.push_back(std::move(e));
    }
    core["pieces"] = std::move(pieces);
  }
  ordered_json j;
  j["core"] = std::move(core);
  j["tail"] = tail_to_json(k.tail());
  j["t_tail"] = k.t_tail();
  return j;
}

inline RadialCurvature curvature_from_json(const json& j, const std::string& where = "curvature") {
  const auto& core = detail::require(j, "core", where);
  const std::string cw = where + ".core";
  const Tail tail = tail_from_json(detail::require(j, "tail", where), where + ".tail");
  const double t_tail = detail::number(detail::require(j, "t_tail", where), where + ".t_tail");
  const auto& kind_j = detail::require(core, "kind", cw);
  if (!kind_j.is_string()) throw SchemaError(cw + ".kind", "expected a string");
  const auto kind = kind_j.get<std::string>();
  try {
    if (kind == "spline") {
      auto x = detail::numbers(detail::require(core, "breakpoints", cw), cw + ".breakpoints");
      auto y = detail::numbers(detail::require(core, "values", cw), cw + ".values");
      if (x.size() != y.size()) throw SchemaError(cw + ".values", "length differs from breakpoints");
      const std::string interp = core.value("interpolation", std::string("linear"));
      if (interp == "linear") return RadialCurvature(SplineCore{PiecewiseCubic::linear(x, y)}, tail, t_tail);
      if (interp == "cubic") return RadialCurvature(SplineCore{PiecewiseCubic::natural_cubic(x, y)}, tail, t_tail);
      if (interp == "hermite") {
        auto d = detail::numbers(detail::require(core, "slopes", cw), cw + ".slopes");
        return RadialCurvature(SplineCore{PiecewiseCubic::hermite(x, y, d)}, tail, t_tail);
      }
      throw SchemaError(cw + ".interpolation", "unknown interpolation '" + interp + "' (linear, cubic, hermite)");
    }
    if (kind == "formula") {
      const auto& e = detail::require(core, "expr", cw);
      if (!e.is_string()) throw SchemaError(cw + ".expr", "expected a string");
      std::vector<double> bps;
      if (core.contains("breakpoints")) bps = detail::numbers(core["breakpoints"], cw + ".breakpoints");
      return RadialCurvature(FormulaCore{Expression(e.get<std::string>()), bps}, tail, t_tail);
    }
    if (kind == "piecewise") {
      const auto& pj = detail::require(core, "pieces", cw);
      if (!pj.is_array() || pj.empty()) throw SchemaError(cw + ".pieces", "expected a nonempty array");
      PiecewiseCore pc;
      if (core.contains("breakpoints")) pc.breakpoints = detail::numbers(core["breakpoints"], cw + ".breakpoints");
      for (std::size_t i = 0; i < pj.size(); ++i) {
        const std::string pw = cw + ".pieces[" + std::to_string(i) + "]";
        pc.pieces.push_back({detail::number(detail::require(pj[i], "from", pw), pw + ".from"),
                             detail::number(detail::require(pj[i], "to", pw), pw + ".to"),
                             std::make_shared<const RadialCurvature>(
                                 curvature_from_json(detail::require(pj[i], "source", pw), pw + ".source"))});
      }
      return RadialCurvature(std::move(pc), tail, t_tail);
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const DomainError& e) {
    throw SchemaError(where, e.what());
  }
  throw SchemaError(cw + ".kind", "unknown core kind '" + kind + "' (spline, formula, piecewise)");
}

/// Curvature JSON plus "n", or {"n", "profile": {"t": [...], "g": [...]}}.
inline RotSymManifold manifold_from_json(const json& j, std::optional<double> t_max, double rel_tol,
                                         const std::string& where = "manifold") {
  const auto& nj = detail::require(j, "n", where);
  if (!nj.is_number_integer()) throw SchemaError(where + ".n", "expected an integer");
  const int n = nj.get<int>();
  if (n < 2) throw SchemaError(where + ".n", "must be >= 2");
  if (j.contains("profile")) {
    const auto& p = j["profile"];
    return RotSymManifold::from_profile(n, detail::numbers(detail::require(p, "t", where + ".profile"), where + ".profile.t"),
                                        detail::numbers(detail::require(p, "g", where + ".profile"), where + ".profile.g"));
  }
  return RotSymManifold::from_curvature(n, curvature_from_json(j, where), t_max, rel_tol);
}

// ---------------------------------------------------------------------------
// Reports.

inline ordered_json to_json(const CriterionReport& r) {
  ordered_json j;
  j["criterion"] = r.criterion;
  j["n"] = r.n;
  j["delta"] = r.delta;
  j["threshold"] = r.threshold;
  j["moment"] = std::isinf(r.moment) ? ordered_json("-inf") : ordered_json(r.moment);
  if (r.growth_limit) j["growth_limit"] = {r.growth_limit->lo, r.growth_limit->hi};
  else j["growth_limit"] = nullptr;
  j["b1_holds"] = r.b1_holds;
  j["b2"] = to_string(r.b2);
  j["verdict"] = to_string(r.verdict);
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline ordered_json to_json(const GeodesicTriangle& tri, std::optional<double> residual) {
  ordered_json j;
  ordered_json verts = ordered_json::array();
  for (const auto& v : tri.vertices) verts.push_back({{"t", v.t}, {"theta", v.theta}});
  j["vertices"] = std::move(verts);
  j["sides"] = tri.side_lengths;
  j["angles"] = tri.angles;
  j["angle_sum"] = tri.angle_sum();
  if (residual) j["residual"] = *residual;
  else j["residual"] = nullptr;
  return j;
}

// ---------------------------------------------------------------------------
// CSV writers. The first line is a provenance comment.

inline void write_provenance(std::ostream& os, const std::string& scenario) {
  os << "# scenario=" << scenario << " radcomp=" << kVersion << '\n';
}

inline void write_csv_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    first = false;
    os << v;
  }
  os << '\n';
}

inline void write_warping_csv(std::ostream& os, const WarpingSolution& w, const std::string& scenario) {
  write_provenance(os, scenario);
  os.precision(17);
  os << "t,m,m_prime\n";
  for (double t : w.grid()) {
    const auto y = w.state(t);
    write_csv_row(os, {t, y[0], y[1]});
  }
}

inline void write_growth_csv(std::ostream& os, const GrowthRatio& r, const std::string& scenario) {
  write_provenance(os, scenario);
  os.precision(17);
  os << "t,vol_num,vol_den,ratio\n";
  for (const auto& s : r.samples) write_csv_row(os, {s.t, s.vol_num, s.vol_den, s.ratio});
}

inline void write_path_csv(std::ostream& os, const GeodesicPath& p, const std::string& scenario, double ds = 0.01) {
  write_provenance(os, scenario);
  os.precision(17);
  os << "s,t,theta\n";
  for (const auto& row : p.samples(ds)) write_csv_row(os, {row[0], row[1], row[2]});
}

}  // namespace io
}  // namespace radcomp
