#pragma once

#include "phibvp/bvp_solver.hpp"
#include "phibvp/scenarios.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace phibvp {

using json = nlohmann::json;

/// Clamps non-finite values so the JSON document stays standard.
double json_safe(double v);

json to_json(const HypothesisReport& rep);
json to_json(const DegreeCertificate& cert);
json to_json(const ConvexityVerdict& verdict);

/// The structured verify report ("schema": 1).
json verification_report(const Scenario& scenario, const ScenarioVerification& ver,
                         std::uint64_t seed);

/// The structured solve/conclusion report.
json conclusion_report(const Scenario& scenario, const ContinuationResult& cont,
                       const ConclusionReport& conclusion, std::uint64_t seed);

/// CSV with header t,x_1..x_n,dx_1..dx_n,y_1..y_n (wrap row at t = T included).
void write_solution_csv(std::ostream& os, const DiscreteSolution& sol, const PhiMap& phi);

/// CSV with header t,x,dx for the blow-up trajectory on [0, 1).
void write_blowup_csv(std::ostream& os, const BlowUpSpec& spec);

// ---------------------------------------------------------------------------
// Config ingestion. A single JSON document describes one experiment:
//   { "schema": 1, "scenario": "...", "params": {...}, "phi": {...},
//     "solver": {"N", "newton_tol", "lambda_steps"}, "sampling": {...},
//     "seed": ... }
// or a user-defined "system" block in place of "scenario".
// ---------------------------------------------------------------------------

PhiMap phi_from_config(const json& config, int n);
Scenario scenario_from_config(const json& config);
SolverOptions solver_options_from_config(const json& config);
VerifyOptions verify_options_from_config(const json& config, int n);
int mesh_size_from_config(const json& config);
std::vector<double> lambda_schedule_from_config(const json& config);

/// Human-readable one-page summary of verify (and optionally solve) reports.
std::string render_summary(const json& verify_report, const json* solve_report);

}  // namespace phibvp
