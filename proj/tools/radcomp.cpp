#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "radcomp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Radial curvature comparison toolkit"};
  std::string scenario;
  std::string tasks;
  radcomp::cli::Overrides o;
  app.add_option("--scenario", scenario, "Scenario JSON file")->required();
  app.add_option("--out", o.out_dir, "Output directory (overrides output_dir)");
  app.add_option("--tol", o.tol, "Relative tolerance for ODE solves");
  app.add_option("--horizon", o.horizon, "Largest growth-ratio horizon H; samples at H/8, H/4, H/2, H");
  app.add_option("--tasks", tasks, "Comma-separated task names or ids to run");
  app.set_version_flag("--version", radcomp::kVersion);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : radcomp::cli::kError;
  }
  std::stringstream ss(tasks);
  for (std::string t; std::getline(ss, t, ',');)
    if (!t.empty()) o.tasks.push_back(t);
  return radcomp::cli::run(scenario, o);
}
