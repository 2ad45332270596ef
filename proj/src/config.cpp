#include "rdro/config.hpp"

#include <atomic>
#include <chrono>
#include <thread>

namespace rdro {

using nlohmann::json;

namespace {

double as_number(const json& node, const std::string& where) {
    if (!node.is_number()) throw ConfigError(where + " must be a number");
    return node.get<double>();
}

Vector as_vector(const json& node, const std::string& where) {
    if (!node.is_array()) throw ConfigError(where + " must be an array");
    Vector v(node.size());
    Eigen::Index i = 0;
    for (const auto& item : node) v[i++] = as_number(item, where + " entry");
    return v;
}

std::vector<Vector> as_atom_list(const json& node, const std::string& where) {
    if (!node.is_array() || node.empty()) {
        throw ConfigError(where + " must be a nonempty array");
    }
    std::vector<Vector> atoms;
    atoms.reserve(node.size());
    for (const auto& item : node) {
        if (item.is_number()) {
            atoms.push_back(Vector::Constant(1, item.get<double>()));
        } else {
            atoms.push_back(as_vector(item, where + " entry"));
        }
    }
    return atoms;
}

}  // namespace

OuterConfig SolverSettings::outer() const {
    OuterConfig cfg;
    cfg.step_size = step_size;
    cfg.max_outer_iterations = max_outer_iterations;
    cfg.outer_tolerance = outer_tolerance;
    cfg.direction = direction;
    cfg.seed = seed;
    cfg.random_init = random_init;
    cfg.backtracking = backtracking;
    cfg.record_iterates = record_iterates;
    return cfg;
}

ScalingConfig SolverSettings::scaling() const {
    ScalingConfig cfg;
    cfg.epsilon = epsilon;
    cfg.max_iterations = max_scaling_iterations;
    cfg.tolerance = scaling_tolerance;
    cfg.proxdiv_variant = proxdiv_variant;
    return cfg;
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    if (!doc.contains("schema") || !doc["schema"].is_number_integer() ||
        doc["schema"].get<int>() != 1) {
        throw ConfigError("config field 'schema' must be the integer 1");
    }
    if (!doc.contains("problem") || !doc["problem"].is_string()) {
        throw ConfigError("config field 'problem' must be a string");
    }

    RunConfig config;
    config.problem = doc["problem"].get<std::string>();
    if (config.problem != "investment" && config.problem != "healthcare" &&
        config.problem != "facility" && config.problem != "custom") {
        throw ConfigError("config field 'problem' must be one of investment, "
                          "healthcare, facility, custom; got '" +
                          config.problem + "'");
    }
    config.instance = doc.value("instance", json::object());
    if (doc.contains("output")) {
        config.output_directory =
            doc["output"].value("directory", config.output_directory);
    }

    const json solver = doc.value("solver", json::object());
    SolverSettings& s = config.solver;
    int modes = 0;
    std::string found;
    if (solver.contains("theta")) {
        s.theta = as_number(solver["theta"], "solver.theta");
        ++modes;
        found += " theta";
    }
    if (solver.contains("theta_grid")) {
        if (!solver["theta_grid"].is_array()) {
            throw ConfigError("solver.theta_grid must be an array");
        }
        std::vector<double> grid;
        for (const auto& item : solver["theta_grid"]) {
            grid.push_back(as_number(item, "solver.theta_grid entry"));
        }
        if (grid.empty()) throw ConfigError("solver.theta_grid is empty");
        s.theta_grid = std::move(grid);
        ++modes;
        found += " theta_grid";
    }
    if (solver.contains("eta_target")) {
        s.eta_target = as_number(solver["eta_target"], "solver.eta_target");
        ++modes;
        found += " eta_target";
    }
    if (modes != 1) {
        throw ConfigError("solver must contain exactly one of 'theta', "
                          "'theta_grid', 'eta_target'; found" +
                          (found.empty() ? std::string(" none") : found));
    }
    if (solver.contains("theta_bracket")) {
        const Vector b = as_vector(solver["theta_bracket"], "solver.theta_bracket");
        if (b.size() != 2) throw ConfigError("solver.theta_bracket needs 2 entries");
        s.theta_bracket = {b[0], b[1]};
    }
    s.epsilon = solver.value("epsilon", s.epsilon);
    s.step_size = solver.value("step_size", s.step_size);
    s.outer_tolerance = solver.value("outer_tolerance", s.outer_tolerance);
    s.max_outer_iterations =
        solver.value("max_outer_iterations", s.max_outer_iterations);
    s.scaling_tolerance = solver.value("scaling_tolerance", s.scaling_tolerance);
    s.max_scaling_iterations =
        solver.value("max_scaling_iterations", s.max_scaling_iterations);
    s.backtracking = solver.value("backtracking", s.backtracking);
    s.random_init = solver.value("random_init", s.random_init);
    s.seed = solver.value("seed", s.seed);
    s.dual_tolerance = solver.value("dual_tolerance", s.dual_tolerance);
    s.record_iterates = solver.value("record_iterates", s.record_iterates);
    if (solver.contains("direction")) {
        const std::string d = solver["direction"].get<std::string>();
        if (d == "ascent") s.direction = StepDirection::ascent;
        else if (d == "paper_descent") s.direction = StepDirection::paper_descent;
        else throw ConfigError("solver.direction must be ascent or paper_descent");
    }
    if (solver.contains("proxdiv_variant")) {
        const std::string v = solver["proxdiv_variant"].get<std::string>();
        if (v == "standard") s.proxdiv_variant = ProxdivVariant::standard;
        else if (v == "paper_factored") s.proxdiv_variant = ProxdivVariant::paper_factored;
        else throw ConfigError("solver.proxdiv_variant must be standard or paper_factored");
    }
    const std::pair<const char*, double> positives[] = {
        {"epsilon", s.epsilon},
        {"step_size", s.step_size},
        {"outer_tolerance", s.outer_tolerance},
        {"scaling_tolerance", s.scaling_tolerance},
        {"dual_tolerance", s.dual_tolerance}};
    for (const auto& [name, value] : positives) {
        if (!(value > 0.0)) {
            throw ConfigError(std::string("solver.") + name + " must be > 0");
        }
    }
    return config;
}

std::vector<std::string> preset_names() { return {"investment73"}; }

std::string preset_config_json(const std::string& name) {
    if (name == "investment73") {
        return R"({
  "schema": 1,
  "problem": "investment",
  "instance": {
    "n": 50,
    "y_values": [0.0, 1.0],
    "initial_wealth": 1.0,
    "risk_aversion": 0.5,
    "kernel_volatility": 0.5
  },
  "solver": {
    "theta": 1.0,
    "epsilon": 0.001,
    "step_size": 25.0,
    "outer_tolerance": 1e-7,
    "max_outer_iterations": 4000,
    "scaling_tolerance": 1e-10,
    "max_scaling_iterations": 200000,
    "direction": "ascent",
    "proxdiv_variant": "standard",
    "seed": 20250601
  }
})";
    }
    throw ConfigError("unknown preset '" + name + "'");
}

PenalizedProblem build_problem(const RunConfig& config, double theta) {
    const json& inst = config.instance;
    const SolverSettings& s = config.solver;
    if (config.problem == "investment") {
        InvestmentInstance instance;
        instance.n = inst.value("n", instance.n);
        instance.initial_wealth = inst.value("initial_wealth", instance.initial_wealth);
        instance.risk_aversion = inst.value("risk_aversion", instance.risk_aversion);
        if (inst.contains("y_values")) {
            instance.y_payoffs.clear();
            for (const auto& item : inst["y_values"]) {
                instance.y_payoffs.push_back(as_number(item, "instance.y_values entry"));
            }
        }
        if (inst.contains("p")) instance.p = as_vector(inst["p"], "instance.p");
        if (inst.contains("nu0")) instance.nu0 = as_vector(inst["nu0"], "instance.nu0");
        if (inst.contains("pricing_kernel")) {
            instance.pricing_kernel =
                as_vector(inst["pricing_kernel"], "instance.pricing_kernel");
        } else {
            instance.pricing_kernel = make_pricing_kernel(
                instance.n, inst.value("kernel_volatility", 0.5), s.seed);
        }
        return make_investment_problem(instance, theta, s.epsilon);
    }
    if (config.problem == "healthcare") {
        HealthcareInstance instance;
        instance.hospitals = inst.value("hospitals", 2);
        if (!inst.contains("max_demands")) {
            throw ConfigError("healthcare instance needs 'max_demands'");
        }
        instance.max_demands = as_vector(inst["max_demands"], "instance.max_demands");
        instance.capacity = inst.value("capacity", 1.0);
        instance.beta = inst.value("beta", 0.5);
        if (inst.contains("demand_atoms")) {
            instance.demand_atoms =
                as_atom_list(inst["demand_atoms"], "instance.demand_atoms");
        } else {
            instance.demand_atoms = sample_demand_atoms(
                instance.max_demands, inst.value("num_atoms", 4), s.seed);
        }
        if (inst.contains("nu0")) instance.nu0 = as_vector(inst["nu0"], "instance.nu0");
        return make_healthcare_problem(instance, theta, s.epsilon);
    }
    if (config.problem == "facility") {
        FacilityInstance instance;
        for (const char* field :
             {"opening_costs", "capacities", "demands", "service_costs",
              "scenario_atoms"}) {
            if (!inst.contains(field)) {
                throw ConfigError(std::string("facility instance needs '") +
                                  field + "'");
            }
        }
        instance.opening_costs = as_vector(inst["opening_costs"], "instance.opening_costs");
        instance.capacities = as_vector(inst["capacities"], "instance.capacities");
        instance.demands = as_vector(inst["demands"], "instance.demands");
        const auto& rows = inst["service_costs"];
        instance.service_costs.resize(instance.opening_costs.size(),
                                      instance.demands.size());
        Eigen::Index i = 0;
        for (const auto& row : rows) {
            instance.service_costs.row(i++) =
                as_vector(row, "instance.service_costs row").transpose();
        }
        instance.budget = inst.value("budget", 1.0);
        instance.scenario_atoms =
            as_atom_list(inst["scenario_atoms"], "instance.scenario_atoms");
        if (inst.contains("nu0")) instance.nu0 = as_vector(inst["nu0"], "instance.nu0");
        return make_facility_problem(instance, theta, s.epsilon);
    }

    // custom: fully explicit atoms, a named utility, and a decision set
    PenalizedProblem problem;
    if (!inst.contains("p") || !inst.contains("nu0") ||
        !inst.contains("y_values") || !inst.contains("utility") ||
        !inst.contains("decision_set")) {
        throw ConfigError("custom instance needs 'p', 'nu0', 'y_values', "
                          "'utility' and 'decision_set'");
    }
    problem.p = DiscreteMeasure::probability(as_vector(inst["p"], "instance.p"));
    problem.nu0 =
        DiscreteMeasure::probability(as_vector(inst["nu0"], "instance.nu0"));
    problem.y_values = as_atom_list(inst["y_values"], "instance.y_values");
    problem.decision_dim = inst.value("decision_dim", 1);

    const json& util = inst["utility"];
    const std::string kind = util.value("kind", "");
    if (kind == "cara") {
        const double alpha = util.value("alpha", 0.5);
        if (!(alpha > 0.0)) throw ConfigError("utility.alpha must be > 0");
        problem.utility.name = "cara";
        problem.utility.value = [alpha](const Vector& x, const Vector& y) {
            return -std::exp(-alpha * (x[0] + y[0])) / alpha;
        };
        problem.utility.grad_x = [alpha](const Vector& x, const Vector& y) {
            return Vector::Constant(1, std::exp(-alpha * (x[0] + y[0]))).eval();
        };
    } else if (kind == "bilinear") {
        problem.utility.name = "bilinear";
        problem.utility.value = [](const Vector& x, const Vector& y) {
            return x.dot(y);
        };
        problem.utility.grad_x = [](const Vector& x, const Vector& y) {
            (void)x;
            return y;
        };
    } else if (kind == "shortage") {
        problem.utility.name = "shortage";
        problem.utility.value = [](const Vector& x, const Vector& y) {
            return -(y - x).cwiseMax(0.0).sum();
        };
        problem.utility.grad_x = [](const Vector& x, const Vector& y) {
            Vector g(x.size());
            for (Eigen::Index k = 0; k < x.size(); ++k) {
                g[k] = x[k] < y[k] ? 1.0 : 0.0;
            }
            return g;
        };
    } else {
        throw ConfigError("utility.kind must be cara, bilinear or shortage");
    }

    const json& setj = inst["decision_set"];
    const std::string set_kind = setj.value("kind", "");
    if (set_kind == "budget_orthant") {
        problem.decision_set = DecisionSet::budget_orthant(
            as_vector(setj["weights"], "decision_set.weights"),
            as_number(setj["budget"], "decision_set.budget"));
    } else if (set_kind == "box_budget") {
        problem.decision_set = DecisionSet::box_budget(
            as_vector(setj["upper"], "decision_set.upper"),
            as_number(setj["capacity"], "decision_set.capacity"));
    } else if (set_kind == "coverage_simplex") {
        problem.decision_set = DecisionSet::coverage_simplex(
            as_vector(setj["upper"], "decision_set.upper"),
            as_number(setj["capacity"], "decision_set.capacity"),
            as_number(setj["beta"], "decision_set.beta"));
    } else {
        throw ConfigError("decision_set.kind must be budget_orthant, "
                          "box_budget or coverage_simplex");
    }
    if (inst.contains("divergence")) {
        problem.divergence_kind =
            divergence_kind_from_string(inst["divergence"].get<std::string>());
    }
    problem.theta = theta;
    problem.epsilon = s.epsilon;
    problem.validate();
    return problem;
}

namespace {

int exit_code_for(const SolveReport& report) {
    return report.converged ? 0 : 2;
}

}  // namespace

SolveOutcome run_solve(const RunConfig& config) {
    const SolverSettings& s = config.solver;
    const auto start = std::chrono::steady_clock::now();
    SolveOutcome outcome;
    if (s.eta_target) {
        PenalizedProblem tmpl = build_problem(config, s.theta_bracket.first);
        outcome.report = solve_constrained(tmpl, *s.eta_target, s.theta_bracket,
                                           s.outer(), s.scaling(),
                                           s.dual_tolerance);
    } else if (s.theta) {
        PenalizedProblem problem = build_problem(config, *s.theta);
        outcome.report =
            solve_penalized(problem, initial_point(problem, s.outer()),
                            s.outer(), s.scaling());
    } else {
        throw ConfigError("run_solve needs 'theta' or 'eta_target'");
    }
    outcome.runtime_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    outcome.exit_code = exit_code_for(outcome.report);
    return outcome;
}

SweepOutcome run_sweep(const RunConfig& config, int threads) {
    const SolverSettings& s = config.solver;
    if (!s.theta_grid) throw ConfigError("run_sweep needs 'theta_grid'");
    const std::vector<double>& grid = *s.theta_grid;
    for (size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw ConfigError("solver.theta_grid must be strictly increasing");
        }
    }

    SweepOutcome outcome;
    outcome.reports.resize(grid.size());
    outcome.points.resize(grid.size());
    std::atomic<size_t> next{0};
    std::atomic<int> exit_code{0};
    auto run_one = [&](size_t i) {
        const auto start = std::chrono::steady_clock::now();
        PenalizedProblem problem = build_problem(config, grid[i]);
        SolveReport report = solve_penalized(
            problem, initial_point(problem, s.outer()), s.outer(), s.scaling());
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        if (!report.converged) exit_code = 2;
        outcome.points[i] = {report.theta,          report.eta,
                             report.penalized_value, report.constrained_value,
                             report.iterations,      ms};
        outcome.reports[i] = std::move(report);
    };

    const int workers = threads <= 0
        ? static_cast<int>(std::thread::hardware_concurrency())
        : threads;
    if (workers <= 1 || grid.size() == 1) {
        for (size_t i = 0; i < grid.size(); ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        const size_t count = std::min<size_t>(workers, grid.size());
        pool.reserve(count);
        for (size_t t = 0; t < count; ++t) {
            pool.emplace_back([&] {
                for (size_t i = next++; i < grid.size(); i = next++) run_one(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    outcome.exit_code = exit_code;
    return outcome;
}

}  // namespace rdro
