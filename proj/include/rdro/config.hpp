#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rdro/applications.hpp"
#include "rdro/solver.hpp"

namespace rdro {

// Solver block of a run configuration (JSON schema v1). Exactly one of
// theta / theta_grid / eta_target selects the solve mode.
struct SolverSettings {
    std::optional<double> theta;
    std::optional<std::vector<double>> theta_grid;
    std::optional<double> eta_target;
    std::pair<double, double> theta_bracket{1e-3, 1e3};
    double epsilon = 1e-3;
    double step_size = 0.1;
    double outer_tolerance = 1e-7;
    int max_outer_iterations = 2000;
    double scaling_tolerance = 1e-10;
    int max_scaling_iterations = 100000;
    StepDirection direction = StepDirection::ascent;
    ProxdivVariant proxdiv_variant = ProxdivVariant::standard;
    bool backtracking = true;
    bool random_init = false;
    std::uint64_t seed = 0;
    double dual_tolerance = 1e-4;
    bool record_iterates = false;

    OuterConfig outer() const;
    ScalingConfig scaling() const;
};

struct RunConfig {
    std::string problem;  // investment | healthcare | facility | custom
    nlohmann::json instance;
    SolverSettings solver;
    std::string output_directory = "out";
};

// Parses and validates a schema-v1 JSON document. Malformed documents raise
// ConfigError naming the offending field (or the parse position).
RunConfig parse_config(const std::string& json_text);

// Built-in configurations; "investment73" is the n=50, r=2, theta=1,
// alpha=0.5, x0=1 uniform setup. Throws ConfigError for unknown names.
std::string preset_config_json(const std::string& name);
std::vector<std::string> preset_names();

// Instantiates the configured problem at a given penalty theta.
PenalizedProblem build_problem(const RunConfig& config, double theta);

struct SolveOutcome {
    SolveReport report;
    double runtime_ms = 0.0;
    int exit_code = 0;  // 0 converged, 2 iteration cap
};

struct SweepPoint {
    double theta;
    double eta;
    double value_penalized;
    double value_constrained;
    int iterations;
    double runtime_ms;
};

struct SweepOutcome {
    std::vector<SweepPoint> points;
    std::vector<SolveReport> reports;
    int exit_code = 0;
};

// Runs the configured single solve (theta or eta_target mode).
SolveOutcome run_solve(const RunConfig& config);
// Runs the configured theta grid; points appear in grid order.
SweepOutcome run_sweep(const RunConfig& config, int threads);

}  // namespace rdro
