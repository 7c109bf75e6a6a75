// Copyright 2026 The cbfdt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cbfdt_cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cbfdt/config.hpp"
#include "cbfdt/lie.hpp"
#include "cbfdt/presets.hpp"
#include "cbfdt/sim.hpp"
#include "cbfdt/trajectory_io.hpp"

namespace cbfdt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Artifacts {
  std::string csv;
  std::string json;
};

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::ofstream open_out(const std::string& path) {
  ensure_parent(path);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os = open_out(path);
  os << text;
  if (!os) throw Error("failed writing '" + path + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Artifacts resolve_artifacts(const std::string& name, const OutputPaths& cfg,
                            const std::optional<std::string>& out_dir) {
  if (out_dir) {
    const fs::path dir(*out_dir);
    return {(dir / (name + ".csv")).string(), (dir / (name + ".json")).string()};
  }
  return {cfg.csv.value_or(name + ".csv"), cfg.json.value_or(name + ".json")};
}

json singular_entry_json(const Scenario& scn, const Trajectory& traj) {
  json j = {{"lg_level", kSingularEntryLevel}};
  const auto k = traj.first_below(kSingularEntryLevel);
  if (!k) {
    j["step"] = nullptr;
    return j;
  }
  const Metrics after = compute_metrics(traj, scn.chatter_threshold, scn.singular_eps, *k);
  j["step"] = *k;
  j["t"] = traj.steps[*k].t;
  j["chatter_count_after"] = after.chatter_count;
  return j;
}

// Runs a scenario and writes the trajectory CSV and the JSON run report.
json execute(const Scenario& scn, const Artifacts& paths, Streams io) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult res = run(scn);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (res.warning) io.err << "warning: " << *res.warning << "\n";

  {
    std::ofstream os = open_out(paths.csv);
    write_csv(os, res.trajectory);
    if (!os) throw Error("failed writing '" + paths.csv + "'");
  }
  json report = {{"scenario", scenario_to_json(scn)},
                 {"metrics", metrics_to_json(res.metrics)},
                 {"singular_entry", singular_entry_json(scn, res.trajectory)},
                 {"steps", res.trajectory.size()},
                 {"wall_clock_s", wall},
                 {"artifacts", {{"csv", paths.csv}, {"json", paths.json}}}};
  if (res.warning) report["warning"] = *res.warning;
  write_text(paths.json, dump(report));
  return report;
}

void print_summary(std::ostream& os, const std::string& name, const json& report) {
  const json& m = report.at("metrics");
  char line[256];
  std::snprintf(line, sizeof(line), "%-18s %12s %9s %12s %12s %8s %9s\n", "scenario", "min_h",
                "violated", "input_min", "input_max", "chatter", "fallback");
  os << line;
  std::snprintf(line, sizeof(line), "%-18s %12.5g %9s %12.5g %12.5g %8zu %9zu\n", name.c_str(),
                m.at("min_h").get<double>(), m.at("violated").get<bool>() ? "yes" : "no",
                m.at("input_min").get<double>(), m.at("input_max").get<double>(),
                m.at("chatter_count").get<std::size_t>(), m.at("fallback_steps").get<std::size_t>());
  os << line;
}

int finish(const json& report, bool strict) {
  return strict && report.at("metrics").at("violated").get<bool>() ? kExitViolation : kExitOk;
}

template <typename Fn>
int guarded(Streams io, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
  } catch (const SimulationError& e) {
    io.err << "simulation error at step " << e.step() << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

double feasible_fraction(const Scenario& scn, const std::vector<StateVec>& grid,
                         const std::optional<InputBox>& probe, std::size_t& inside,
                         std::size_t& feasible) {
  const ControlAffineSystem sys = scn.control_affine();
  inside = 0;
  feasible = 0;
  for (const StateVec& x : grid) {
    if (!scn.strategy.safe_set.contains(x)) continue;
    ++inside;
    QpInstance inst;
    inst.u_ref = InputVec::Zero(scn.input_dim());
    inst.box = probe;
    for (const auto& row : cbf_constraints(sys, scn.strategy, x)) inst.constraints.push_back(row.constraint);
    try {
      solve_qp(inst);
      ++feasible;
    } catch (const Infeasible&) {
    }
  }
  return inside == 0 ? 0.0 : static_cast<double>(feasible) / static_cast<double>(inside);
}

}  // namespace

int simulate(const std::string& config_path, const std::optional<std::string>& out_dir, bool strict,
             Streams io) {
  return guarded(io, [&] {
    const ScenarioConfig cfg = load_config(config_path);
    const Artifacts paths = resolve_artifacts(cfg.scenario.name, cfg.outputs, out_dir);
    const json report = execute(cfg.scenario, paths, io);
    print_summary(io.out, cfg.scenario.name, report);
    return finish(report, strict);
  });
}

int reproduce(const std::string& preset_name, const std::string& out_dir, bool strict, Streams io) {
  return guarded(io, [&] {
    const Scenario scn = presets::preset(preset_name);
    const Artifacts paths = resolve_artifacts(scn.name, {}, out_dir);
    const json report = execute(scn, paths, io);
    print_summary(io.out, scn.name, report);
    return finish(report, strict);
  });
}

int check_cbf(const std::string& config_path, int grid, double eps,
              const std::optional<std::string>& out_dir, Streams io) {
  return guarded(io, [&] {
    if (grid < 2) throw InvalidArgument("--grid must be at least 2");
    if (!(eps > 0.0)) throw InvalidArgument("--eps must be positive");
    const ScenarioConfig cfg = load_config(config_path);
    const Scenario& scn = cfg.scenario;
    if (!scn.box) throw ConfigError("$.box", "check-cbf needs an admissible state box");
    const ControlAffineSystem sys = scn.control_affine();
    const LtiSystem* lti = std::get_if<LtiSystem>(&scn.system);

    json constraints = json::array();
    const std::vector<Cbf> cbfs = scn.strategy.safe_set.constraints();
    for (std::size_t i = 0; i < cbfs.size(); ++i) {
      json c = {{"index", i},
                {"singular_set", relative_degree_to_json(singular_set_scan(sys, cbfs[i], *scn.box, grid, eps))}};
      const AffineCbf* aff = cbfs[i].get_if<AffineCbf>();
      if (aff != nullptr && lti != nullptr) {
        c["relative_degree"] = relative_degree_to_json(global_relative_degree_affine_lti(*lti, *aff, eps));
      }
      constraints.push_back(std::move(c));
    }

    std::size_t inside = 0;
    std::size_t feasible = 0;
    const double frac = feasible_fraction(scn, scn.box->grid(grid), cfg.probe_input_box, inside, feasible);
    json feas = {{"points_in_safe_set", inside}, {"feasible_points", feasible}, {"fraction", frac}};
    if (cfg.probe_input_box) {
      feas["probe_input_box"] = {{"lower", std::vector<double>(cfg.probe_input_box->lower.begin(),
                                                               cfg.probe_input_box->lower.end())},
                                 {"upper", std::vector<double>(cfg.probe_input_box->upper.begin(),
                                                               cfg.probe_input_box->upper.end())}};
    }

    json report = {{"scenario", scn.name}, {"grid", grid}, {"eps", eps},
                   {"constraints", constraints}, {"feasibility", feas}};
    if (const CbfSet* poly = scn.strategy.safe_set.polytope(); poly != nullptr && cfg.outer_cbf) {
      report["inner_check"] = inner_check_to_json(polytope_inner_check(*poly, *cfg.outer_cbf, *scn.box, grid));
    }

    const std::string text = dump(report);
    io.out << text;
    if (out_dir) write_text((fs::path(*out_dir) / (scn.name + "_check.json")).string(), text);
    return kExitOk;
  });
}

int sweep(const std::string& config_path, const std::vector<double>& dts,
          const std::optional<std::string>& out_dir, Streams io) {
  return guarded(io, [&] {
    if (dts.empty()) throw InvalidArgument("--dts needs at least one sampling time");
    const ScenarioConfig cfg = load_config(config_path);
    const std::vector<Metrics> metrics = dt_sweep(cfg.scenario, dts);
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < dts.size(); ++i) rows.push_back({dts[i], metrics[i]});
    std::ostringstream os;
    write_sweep_csv(os, rows);
    io.out << os.str();
    if (out_dir) write_text((fs::path(*out_dir) / (cfg.scenario.name + "_sweep.csv")).string(), os.str());
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv, Streams io) {
  CLI::App app{"Discrete-time CBF safety filter simulator", "cbfdt"};
  app.require_subcommand(1);

  std::string config;
  std::string preset;
  std::optional<std::string> out_dir;
  std::string reproduce_dir = ".";
  bool strict = false;
  int grid = kDefaultGridPerDim;
  double eps = kSingularEps;
  std::vector<double> dts;

  auto* sim = app.add_subcommand("simulate", "Run a scenario config");
  sim->add_option("config", config, "Scenario JSON")->required();
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_flag("--strict", strict, "Exit with code 2 when the run leaves the safe set");

  auto* rep = app.add_subcommand("reproduce", "Run a named preset");
  rep->add_option("preset", preset, "Preset name")->required();
  rep->add_option("--out", reproduce_dir, "Output directory");
  rep->add_flag("--strict", strict, "Exit with code 2 when the run leaves the safe set");

  auto* chk = app.add_subcommand("check-cbf", "Grid diagnostics for the configured CBF");
  chk->add_option("config", config, "Scenario JSON")->required();
  chk->add_option("--grid", grid, "Grid points per state dimension");
  chk->add_option("--eps", eps, "Singularity threshold on ||L_g h||");
  chk->add_option("--out", out_dir, "Output directory");

  auto* swp = app.add_subcommand("sweep", "Run a config over several sampling times");
  swp->add_option("config", config, "Scenario JSON")->required();
  swp->add_option("--dts", dts, "Comma-separated sampling times (s)")->required()->delimiter(',');
  swp->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, io.out, io.err) == 0 ? kExitOk : kExitError;
  }

  if (sim->parsed()) return simulate(config, out_dir, strict, io);
  if (rep->parsed()) return reproduce(preset, reproduce_dir, strict, io);
  if (chk->parsed()) return check_cbf(config, grid, eps, out_dir, io);
  return sweep(config, dts, out_dir, io);
}

}  // namespace cbfdt::cli
