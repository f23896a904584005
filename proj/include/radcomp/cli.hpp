#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radcomp/criteria.hpp"
#include "radcomp/errors.hpp"
#include "radcomp/geodesics.hpp"
#include "radcomp/io.hpp"
#include "radcomp/synthetic.hpp"

namespace radcomp::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

enum ExitCode : int { kSuccess = 0, kError = 1, kInconclusive = 2 };

struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<double> tol;
  std::optional<double> horizon;
  std::vector<std::string> tasks;  // empty: run all
};

struct Command {
  std::string task;
  std::string id;
  json params;
};

struct Scenario {
  std::string name;
  int n = 2;
  std::map<std::string, RadialCurvature> curvatures;
  std::optional<json> manifold;
  std::vector<Command> commands;
  std::string output_dir = "out";
};

inline const std::set<std::string>& known_tasks() {
  static const std::set<std::string> t{"threshold", "growth", "triangle", "gauss-bonnet", "check-main",
                                       "check-corollary"};
  return t;
}

inline Scenario parse_scenario(const json& j) {
  using io::detail::require;
  Scenario s;
  const auto& name = require(j, "name", "scenario");
  if (!name.is_string()) throw SchemaError("scenario.name", "expected a string");
  s.name = name.get<std::string>();
  const auto& n = require(j, "n", "scenario");
  if (!n.is_number_integer() || n.get<int>() < 2) throw SchemaError("scenario.n", "expected an integer >= 2");
  s.n = n.get<int>();
  const auto& cs = require(j, "curvatures", "scenario");
  if (!cs.is_object()) throw SchemaError("scenario.curvatures", "expected an object of named curvatures");
  for (const auto& [key, value] : cs.items())
    s.curvatures.emplace(key, io::curvature_from_json(value, "curvatures." + key));
  if (j.contains("manifold") && !j["manifold"].is_null()) s.manifold = j["manifold"];
  const auto& cmds = require(j, "commands", "scenario");
  if (!cmds.is_array()) throw SchemaError("scenario.commands", "expected an array");
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    const std::string where = "commands[" + std::to_string(i) + "]";
    const auto& task = require(cmds[i], "task", where);
    if (!task.is_string() || !known_tasks().count(task.get<std::string>()))
      throw SchemaError(where + ".task",
                        "expected one of threshold, growth, triangle, gauss-bonnet, check-main, check-corollary");
    Command c{task.get<std::string>(), cmds[i].value("id", task.get<std::string>() + "_" + std::to_string(i)),
              cmds[i]};
    s.commands.push_back(std::move(c));
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw SchemaError("scenario.output_dir", "expected a string");
    s.output_dir = j["output_dir"].get<std::string>();
  }
  return s;
}

/// Executes a parsed scenario; throws on errors, returns 0 or 2.
class Runner {
 public:
  Runner(Scenario s, Overrides o, fs::path out) : s_(std::move(s)), o_(std::move(o)), out_(std::move(out)) {
    if (o_.tol) {
      if (!(*o_.tol >= 1e-14 && *o_.tol <= 1e-3)) throw DomainError("--tol must lie in [1e-14, 1e-3]");
      opt_.rel_tol = *o_.tol;
    }
    if (o_.horizon) {
      if (!(*o_.horizon > 0.0)) throw DomainError("--horizon must be positive");
      const double h = *o_.horizon;
      opt_.horizons = {h / 8, h / 4, h / 2, h};
    }
  }

  int run() {
    fs::create_directories(out_);
    ordered_json report;
    report["scenario"] = s_.name;
    report["version"] = kVersion;
    report["n"] = s_.n;
    report["rel_tol"] = opt_.rel_tol;
    report["horizons"] = opt_.horizons;
    ordered_json results = ordered_json::array();
    bool inconclusive = false;
    for (const auto& c : s_.commands) {
      if (!selected(c)) continue;
      ordered_json r;
      r["id"] = c.id;
      r["task"] = c.task;
      if (c.task == "threshold") threshold(c, r);
      else if (c.task == "growth") growth(c, r);
      else if (c.task == "triangle") triangle(c, r, false);
      else if (c.task == "gauss-bonnet") triangle(c, r, true);
      else inconclusive |= check(c, r);
      results.push_back(std::move(r));
    }
    report["tasks"] = std::move(results);
    report["exit_code"] = inconclusive ? kInconclusive : kSuccess;
    std::ofstream(out_ / "report.json") << report.dump(2) << '\n';
    return inconclusive ? kInconclusive : kSuccess;
  }

 private:
  bool selected(const Command& c) const {
    if (o_.tasks.empty()) return true;
    for (const auto& t : o_.tasks)
      if (t == c.task || t == c.id) return true;
    return false;
  }

  const RadialCurvature& curvature(const Command& c, const std::string& key) const {
    const std::string where = c.id + "." + key;
    const auto& v = io::detail::require(c.params, key, c.id);
    if (!v.is_string()) throw SchemaError(where, "expected a curvature name");
    auto it = s_.curvatures.find(v.get<std::string>());
    if (it == s_.curvatures.end()) throw SchemaError(where, "unknown curvature '" + v.get<std::string>() + "'");
    return it->second;
  }

  std::ofstream open(const std::string& file) const {
    std::ofstream os(out_ / file);
    if (!os) throw Error("cannot write " + (out_ / file).string());
    return os;
  }

  RotSymManifold manifold(const RadialCurvature& model) const {
    if (!s_.manifold) throw SchemaError("scenario.manifold", "required when no growth bracket is declared");
    auto m = io::manifold_from_json(*s_.manifold, model_horizon(model, opt_), opt_.rel_tol);
    if (m.n() != s_.n) throw SchemaError("manifold.n", "differs from scenario n");
    return m;
  }

  void threshold(const Command& c, ordered_json& r) {
    const auto& k = curvature(c, "kstar");
    const double delta = delta_threshold(k);
    r["delta"] = delta;
    r["threshold"] = 1.0 - net_function(s_.n, delta);
  }

  void growth(const Command& c, ordered_json& r) {
    const auto& den = curvature(c, "denominator");
    const auto model = solve_warping(den, model_horizon(den, opt_), opt_.rel_tol);
    const auto ratio = c.params.contains("numerator")
                           ? growth_ratio(s_.n, solve_warping(curvature(c, "numerator"), model.t_max(), opt_.rel_tol),
                                          model, opt_.horizons)
                           : growth_ratio(manifold(den), model, opt_.horizons);
    auto os = open(c.id + "_growth.csv");
    io::write_growth_csv(os, ratio, s_.name);
    auto ws = open(c.id + "_warping.csv");
    io::write_warping_csv(ws, model, s_.name);
    r["limit_estimate"] = ratio.limit_estimate;
    r["limit_bracket"] = {ratio.limit_lo, ratio.limit_hi};
    r["monotone_nonincreasing"] = ratio.monotone_nonincreasing;
    r["files"] = {c.id + "_growth.csv", c.id + "_warping.csv"};
  }

  void triangle(const Command& c, ordered_json& r, bool with_residual) {
    const auto& k = curvature(c, "curvature");
    const auto sides = io::detail::numbers(io::detail::require(c.params, "sides", c.id), c.id + ".sides");
    if (sides.size() != 3) throw SchemaError(c.id + ".sides", "expected [d_ox, d_oy, d_xy]");
    double reach = std::max(sides[0], sides[1]) + sides[2];
    const ModelSurface surface(k, std::max(std::max(20.0, default_horizon(k)), 2.0 * reach), opt_.rel_tol);
    const auto tri = comparison_triangle(surface, sides[0], sides[1], sides[2]);
    std::optional<double> residual;
    if (with_residual) residual = gauss_bonnet_residual(surface, tri);
    std::ofstream(out_ / (c.id + "_triangle.json")) << io::to_json(tri, residual).dump(2) << '\n';
    auto ps = open(c.id + "_side_xy.csv");
    io::write_path_csv(ps, tri.side_xy, s_.name);
    r["triangle"] = io::to_json(tri, residual);
    r["files"] = {c.id + "_triangle.json", c.id + "_side_xy.csv"};
  }

  bool check(const Command& c, ordered_json& r) {
    const auto& g = curvature(c, "g");
    std::optional<Numerator> num;
    if (c.params.contains("bracket")) {
      const auto b = io::detail::numbers(c.params["bracket"], c.id + ".bracket");
      if (b.size() != 2) throw SchemaError(c.id + ".bracket", "expected [lo, hi]");
      num.emplace(GrowthBracket{b[0], b[1]});
    } else {
      num.emplace(manifold(g));
    }
    const CriterionReport rep =
        c.task == "check-main" ? main_theorem_check(s_.n, g, curvature(c, "k"), *num, opt_)
                               : corollary_check(s_.n, g, *num, opt_);
    r["report"] = io::to_json(rep);
    if (rep.growth) {
      auto os = open(c.id + "_growth.csv");
      io::write_growth_csv(os, *rep.growth, s_.name);
      r["files"] = {c.id + "_growth.csv"};
    }
    return rep.verdict == Verdict::Inconclusive;
  }

  Scenario s_;
  Overrides o_;
  fs::path out_;
  CheckOptions opt_;
};

/// Loads, runs, and maps failures to exit code 1 with a diagnostic on err.
inline int run(const fs::path& scenario_path, const Overrides& o, std::ostream& err = std::cerr) {
  try {
    std::ifstream in(scenario_path);
    if (!in) throw Error("cannot open scenario " + scenario_path.string());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw SchemaError(scenario_path.string(), e.what());
    }
    Scenario s = parse_scenario(j);
    fs::path out = o.out_dir ? fs::path(*o.out_dir) : fs::path(s.output_dir);
    if (!o.out_dir && out.is_relative()) out = scenario_path.parent_path() / out;
    return Runner(std::move(s), o, out).run();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace radcomp::cli
