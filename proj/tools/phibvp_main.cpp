// phibvp: verify the boundary hypotheses of periodic phi-Laplacian problems,
// solve them along their homotopy families, and report the conclusions.
//
// Subcommands:
//   verify  -- run every checker of the scenario and emit a JSON report
//   solve   -- homotopy continuation + conclusion check + CSV trajectories
//   report  -- render prior verify/solve reports as a one-page summary
//
// Exit codes: 0 success; 2 expected-to-hold condition violated (verify) or
// containment violated (solve); 3 inconclusive-only deviations; 4 stalled
// continuation; 64 bad config/usage; 66 missing or corrupt inputs.

#include "phibvp/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using phibvp::json;

namespace {

constexpr int kExitViolated = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitStalled = 4;
constexpr int kExitUsage = 64;
constexpr int kExitNoInput = 66;

json load_config(const std::string& config_path, const std::string& scenario,
                 int N_override, long long seed_override) {
  json config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw phibvp::ConfigError("cannot open config file " + config_path);
    try {
      in >> config;
    } catch (const json::parse_error& e) {
      throw phibvp::ConfigError(std::string("config parse error: ") + e.what());
    }
  }
  if (!scenario.empty()) config["scenario"] = scenario;
  if (config.empty()) throw phibvp::ConfigError("empty config: give --config or --scenario");
  if (N_override > 0) config["solver"]["N"] = N_override;
  if (seed_override >= 0) config["seed"] = static_cast<std::uint64_t>(seed_override);
  if (!config.contains("seed")) config["seed"] = 0;
  return config;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw phibvp::ConfigError("cannot write " + path.string());
  out << text;
}

int run_verify(const json& config, const std::string& outdir) {
  const auto scenario = phibvp::scenario_from_config(config);
  const auto opts = phibvp::verify_options_from_config(config, scenario.n);
  const auto ver = phibvp::verify_scenario(scenario, opts);
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const json report = phibvp::verification_report(scenario, ver, seed);
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!outdir.empty()) {
    fs::create_directories(outdir);
    write_text_file(fs::path(outdir) / "verify.json", text);
    if (scenario.blowup) {
      std::ofstream csv(fs::path(outdir) / "blowup.csv", std::ios::binary);
      phibvp::write_blowup_csv(csv, *scenario.blowup);
    }
  }
  if (ver.any_expected_hold_violated()) return kExitViolated;
  if (ver.any_expected_hold_inconclusive()) return kExitInconclusive;
  return 0;
}

int run_solve(const json& config, const std::string& outdir, bool force) {
  const auto scenario = phibvp::scenario_from_config(config);
  if (!scenario.solvable()) {
    std::cerr << "phibvp: scenario '" << scenario.name
              << "' is not a periodic solve target\n";
    return kExitUsage;
  }
  const auto vopts = phibvp::verify_options_from_config(config, scenario.n);
  const auto ver = phibvp::verify_scenario(scenario, vopts);
  if (!force && ver.any_expected_hold_violated()) {
    std::cerr << "phibvp: verify phase failed (use --force to solve anyway)\n";
    return kExitViolated;
  }

  const int N = phibvp::mesh_size_from_config(config);
  const auto sopts = phibvp::solver_options_from_config(config);
  const auto schedule = phibvp::lambda_schedule_from_config(config);
  phibvp::PeriodicCollocation solver(scenario.family, scenario.phi, N);
  const auto cont = solver.continue_to_target(schedule, sopts, scenario.interior_point);
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();

  phibvp::ConclusionReport conclusion;
  if (cont.solution) {
    const double K = scenario.nagumo ? scenario.nagumo->K_deriv
                                     : std::numeric_limits<double>::infinity();
    conclusion = phibvp::verify_conclusion(*cont.solution, scenario.bound_set, K,
                                           scenario.phi);
  }
  json report = phibvp::conclusion_report(scenario, cont, conclusion, seed);

  // the Lienard proof chain: discrete L1 norm of x' against K1
  if (cont.solution && scenario.constants.count("K1")) {
    double l1 = 0.0;
    const auto& sol = *cont.solution;
    for (int j = 0; j < sol.N; ++j) l1 += scenario.phi.invert(sol.y.row(j)).norm();
    l1 *= sol.h;
    report["x_prime_L1"] = phibvp::json_safe(l1);
    report["K1"] = phibvp::json_safe(scenario.constants.at("K1"));
    report["x_prime_L1_within_K1"] = l1 <= scenario.constants.at("K1") + 1e-8;
  }
  const std::string text = report.dump(2) + "\n";
  std::cout << text;

  if (!outdir.empty()) {
    fs::create_directories(outdir);
    write_text_file(fs::path(outdir) / "solve.json", text);
    write_text_file(fs::path(outdir) / "verify.json",
                    phibvp::verification_report(scenario, ver, seed).dump(2) + "\n");
    if (cont.solution) {
      std::ofstream csv(fs::path(outdir) / "solution.csv", std::ios::binary);
      phibvp::write_solution_csv(csv, *cont.solution, scenario.phi);
    }
    // continuation trace: one CSV per accepted lambda plus an index
    std::ofstream index(fs::path(outdir) / "trace_index.csv", std::ios::binary);
    index << "step,lambda,residual_norm,file\n";
    for (std::size_t k = 0; k < cont.trace.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof(name), "trace_%03zu.csv", k);
      std::ofstream csv(fs::path(outdir) / name, std::ios::binary);
      phibvp::write_solution_csv(csv, cont.trace[k], scenario.phi);
      char row[160];
      std::snprintf(row, sizeof(row), "%zu,%.17g,%.17g,%s\n", k, cont.trace[k].lambda,
                    cont.trace[k].residual_norm, name);
      index << row;
    }
  }

  if (!cont.converged()) return kExitStalled;
  if (!conclusion.contained) return kExitViolated;
  return 0;
}

int run_report(const std::string& verify_path, const std::string& solve_path,
               const std::string& out_path) {
  auto load = [](const std::string& path) -> json {
    std::ifstream in(path);
    if (!in) throw phibvp::InputError("missing input " + path);
    json j;
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      throw phibvp::InputError(std::string("corrupt input ") + path + ": " + e.what());
    }
    return j;
  };
  const json verify = load(verify_path);
  std::optional<json> solve;
  if (!solve_path.empty()) solve = load(solve_path);
  const std::string text = phibvp::render_summary(verify, solve ? &*solve : nullptr);
  std::cout << text;
  if (!out_path.empty()) write_text_file(out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic phi-Laplacian bound-set verifier and homotopy solver"};
  app.require_subcommand(1);

  std::string config_path, scenario, outdir, verify_path, solve_path, out_path;
  int N_override = 0;
  long long seed_override = -1;
  bool force = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--scenario", scenario, "scenario name (overrides config)");
    cmd->add_option("--N", N_override, "mesh size override");
    cmd->add_option("--seed", seed_override, "seed override");
    cmd->add_option("--outdir", outdir, "directory for artifacts");
  };

  CLI::App* verify = app.add_subcommand("verify", "run the hypothesis checkers");
  add_common(verify);
  CLI::App* solve = app.add_subcommand("solve", "continuation solve + conclusion check");
  add_common(solve);
  solve->add_flag("--force", force, "solve even if verification fails");
  CLI::App* report = app.add_subcommand("report", "summarize prior reports");
  report->add_option("--verify", verify_path, "verify.json path")->required();
  report->add_option("--solve", solve_path, "solve.json path");
  report->add_option("--out", out_path, "write the summary here as well");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (verify->parsed())
      return run_verify(load_config(config_path, scenario, N_override, seed_override),
                        outdir);
    if (solve->parsed())
      return run_solve(load_config(config_path, scenario, N_override, seed_override),
                       outdir, force);
    if (report->parsed()) return run_report(verify_path, solve_path, out_path);
  } catch (const phibvp::ConfigError& e) {
    std::cerr << "phibvp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const phibvp::InputError& e) {
    std::cerr << "phibvp: " << e.what() << "\n";
    return kExitNoInput;
  } catch (const std::exception& e) {
    std::cerr << "phibvp: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
