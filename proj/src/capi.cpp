#include "rdro.h"

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "rdro/config.hpp"
#include "rdro/verify.hpp"

extern "C" {

struct rdro_run {
    rdro::RunConfig config;
    std::string problem;
    std::string output_directory;
};

struct rdro_result {
    rdro::SolveOutcome outcome;
    std::vector<double> plan_row_major;
};

struct rdro_sweep {
    rdro::SweepOutcome outcome;
};

struct rdro_checks {
    std::vector<rdro::VerifyCheck> checks;
};

}  // extern "C"

namespace {

thread_local std::string g_last_error = "";

void set_error(const std::string& message) { g_last_error = message; }

rdro_status status_of(const std::exception& e) {
    set_error(e.what());
    if (dynamic_cast<const rdro::ConfigError*>(&e)) return RDRO_ERR_CONFIG;
    if (dynamic_cast<const rdro::DimensionError*>(&e)) return RDRO_ERR_DIMENSION;
    if (dynamic_cast<const rdro::DomainError*>(&e)) return RDRO_ERR_DOMAIN;
    if (dynamic_cast<const rdro::NumericError*>(&e)) return RDRO_ERR_NUMERIC;
    if (dynamic_cast<const rdro::CapacityError*>(&e)) return RDRO_ERR_CAPACITY;
    if (dynamic_cast<const rdro::BracketError*>(&e)) return RDRO_ERR_BRACKET;
    if (dynamic_cast<const rdro::InfeasibleError*>(&e)) return RDRO_ERR_INFEASIBLE;
    return RDRO_ERR_INTERNAL;
}

template <typename Fn>
rdro_status guarded(Fn&& fn) {
    try {
        fn();
        return RDRO_OK;
    } catch (const std::exception& e) {
        return status_of(e);
    } catch (...) {
        set_error("unknown error");
        return RDRO_ERR_INTERNAL;
    }
}

char* copy_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* rdro_version(void) { return "1.0.0"; }

const char* rdro_last_error(void) { return g_last_error.c_str(); }

char* rdro_preset_config(const char* name) {
    try {
        return copy_string(rdro::preset_config_json(name ? name : ""));
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

char* rdro_preset_names(void) {
    std::string joined;
    for (const std::string& name : rdro::preset_names()) {
        joined += name + "\n";
    }
    return copy_string(joined);
}

void rdro_string_free(char* text) { delete[] text; }

rdro_status rdro_run_create(const char* config_json, rdro_run** out) {
    if (!config_json || !out) {
        set_error("null argument");
        return RDRO_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded([&] {
        auto run = std::make_unique<rdro_run>();
        run->config = rdro::parse_config(config_json);
        run->problem = run->config.problem;
        run->output_directory = run->config.output_directory;
        *out = run.release();
    });
}

void rdro_run_destroy(rdro_run* run) { delete run; }

rdro_status rdro_run_override_seed(rdro_run* run, unsigned long long seed) {
    if (!run) {
        set_error("null run");
        return RDRO_ERR_CONFIG;
    }
    run->config.solver.seed = seed;
    return RDRO_OK;
}

const char* rdro_run_output_directory(const rdro_run* run) {
    return run ? run->output_directory.c_str() : "";
}

const char* rdro_run_problem(const rdro_run* run) {
    return run ? run->problem.c_str() : "";
}

int rdro_run_is_sweep(const rdro_run* run) {
    return run && run->config.solver.theta_grid ? 1 : 0;
}

rdro_status rdro_run_solve(rdro_run* run, rdro_result** out) {
    if (!run || !out) {
        set_error("null argument");
        return RDRO_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded([&] {
        auto result = std::make_unique<rdro_result>();
        result->outcome = rdro::run_solve(run->config);
        const rdro::Matrix& plan = result->outcome.report.plan;
        result->plan_row_major.reserve(plan.size());
        for (Eigen::Index i = 0; i < plan.rows(); ++i) {
            for (Eigen::Index j = 0; j < plan.cols(); ++j) {
                result->plan_row_major.push_back(plan(i, j));
            }
        }
        *out = result.release();
    });
}

rdro_status rdro_run_sweep(rdro_run* run, int threads, rdro_sweep** out) {
    if (!run || !out) {
        set_error("null argument");
        return RDRO_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded([&] {
        auto sweep = std::make_unique<rdro_sweep>();
        sweep->outcome = rdro::run_sweep(run->config, threads);
        *out = sweep.release();
    });
}

double rdro_result_theta(const rdro_result* r) { return r->outcome.report.theta; }
double rdro_result_eta(const rdro_result* r) { return r->outcome.report.eta; }
double rdro_result_penalized_value(const rdro_result* r) {
    return r->outcome.report.penalized_value;
}
double rdro_result_constrained_value(const rdro_result* r) {
    return r->outcome.report.constrained_value;
}
double rdro_result_runtime_ms(const rdro_result* r) {
    return r->outcome.runtime_ms;
}
int rdro_result_iterations(const rdro_result* r) {
    return r->outcome.report.iterations;
}
int rdro_result_converged(const rdro_result* r) {
    return r->outcome.report.converged ? 1 : 0;
}

const double* rdro_result_x(const rdro_result* r, int* length) {
    if (length) *length = static_cast<int>(r->outcome.report.x_star.size());
    return r->outcome.report.x_star.data();
}

const double* rdro_result_plan(const rdro_result* r, int* rows, int* cols) {
    if (rows) *rows = static_cast<int>(r->outcome.report.plan.rows());
    if (cols) *cols = static_cast<int>(r->outcome.report.plan.cols());
    return r->plan_row_major.data();
}

int rdro_result_trace_length(const rdro_result* r) {
    return static_cast<int>(r->outcome.report.trace.size());
}

rdro_status rdro_result_trace_row(const rdro_result* r, int index,
                                  int* iteration, double* objective,
                                  double* step_residual) {
    if (!r || index < 0 ||
        index >= static_cast<int>(r->outcome.report.trace.size())) {
        set_error("trace index out of range");
        return RDRO_ERR_DIMENSION;
    }
    const rdro::TracePoint& point = r->outcome.report.trace[index];
    if (iteration) *iteration = point.iteration;
    if (objective) *objective = point.objective;
    if (step_residual) *step_residual = point.step_residual;
    return RDRO_OK;
}

void rdro_result_destroy(rdro_result* r) { delete r; }

int rdro_sweep_count(const rdro_sweep* s) {
    return static_cast<int>(s->outcome.points.size());
}

int rdro_sweep_exit_code(const rdro_sweep* s) { return s->outcome.exit_code; }

rdro_status rdro_sweep_row(const rdro_sweep* s, int index, double* theta,
                           double* eta, double* value_penalized,
                           double* value_constrained, int* iterations,
                           double* runtime_ms) {
    if (!s || index < 0 || index >= static_cast<int>(s->outcome.points.size())) {
        set_error("sweep index out of range");
        return RDRO_ERR_DIMENSION;
    }
    const rdro::SweepPoint& point = s->outcome.points[index];
    if (theta) *theta = point.theta;
    if (eta) *eta = point.eta;
    if (value_penalized) *value_penalized = point.value_penalized;
    if (value_constrained) *value_constrained = point.value_constrained;
    if (iterations) *iterations = point.iterations;
    if (runtime_ms) *runtime_ms = point.runtime_ms;
    return RDRO_OK;
}

void rdro_sweep_destroy(rdro_sweep* s) { delete s; }

char* rdro_verify_suites(void) {
    std::string joined;
    for (const std::string& name : rdro::verify_suite_names()) {
        joined += name + "\n";
    }
    return copy_string(joined);
}

rdro_status rdro_verify_run(const char* suite, rdro_checks** out) {
    if (!suite || !out) {
        set_error("null argument");
        return RDRO_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded([&] {
        auto checks = std::make_unique<rdro_checks>();
        checks->checks = rdro::run_verify_suite(suite);
        *out = checks.release();
    });
}

int rdro_checks_count(const rdro_checks* c) {
    return static_cast<int>(c->checks.size());
}

rdro_status rdro_checks_get(const rdro_checks* c, int index, const char** name,
                            int* passed, double* measured, double* threshold) {
    if (!c || index < 0 || index >= static_cast<int>(c->checks.size())) {
        set_error("check index out of range");
        return RDRO_ERR_DIMENSION;
    }
    const rdro::VerifyCheck& check = c->checks[index];
    if (name) *name = check.name.c_str();
    if (passed) *passed = check.passed ? 1 : 0;
    if (measured) *measured = check.measured;
    if (threshold) *threshold = check.threshold;
    return RDRO_OK;
}

void rdro_checks_destroy(rdro_checks* c) { delete c; }

}  // extern "C"
