#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "rdro.h"

namespace {

std::string preset_text() {
    char* raw = rdro_preset_config("investment73");
    REQUIRE(raw != nullptr);
    std::string text(raw);
    rdro_string_free(raw);
    return text;
}

std::string small_preset_text() {
    // shrink the preset so the suite stays fast
    std::string text = preset_text();
    const auto pos = text.find("\"n\": 50");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 7, "\"n\": 10");
    return text;
}

}  // namespace

TEST_CASE("version and preset listing") {
    CHECK(std::strlen(rdro_version()) > 0);
    char* names = rdro_preset_names();
    CHECK(std::string(names).find("investment73") != std::string::npos);
    rdro_string_free(names);
    CHECK(rdro_preset_config("bogus") == nullptr);
    CHECK(std::string(rdro_last_error()).find("bogus") != std::string::npos);
}

TEST_CASE("malformed config surfaces a config error") {
    rdro_run* run = nullptr;
    CHECK(rdro_run_create("{\"schema\": 2}", &run) == RDRO_ERR_CONFIG);
    CHECK(run == nullptr);
    CHECK(std::strlen(rdro_last_error()) > 0);
}

TEST_CASE("solve through the C surface") {
    rdro_run* run = nullptr;
    REQUIRE(rdro_run_create(small_preset_text().c_str(), &run) == RDRO_OK);
    CHECK(std::string(rdro_run_problem(run)) == "investment");
    CHECK(rdro_run_is_sweep(run) == 0);

    rdro_result* result = nullptr;
    REQUIRE(rdro_run_solve(run, &result) == RDRO_OK);
    CHECK(rdro_result_converged(result) == 1);
    CHECK(rdro_result_theta(result) == 1.0);
    CHECK(rdro_result_eta(result) > 0.0);

    const double jp = rdro_result_penalized_value(result);
    const double jc = rdro_result_constrained_value(result);
    const double eta = rdro_result_eta(result);
    CHECK(jc == jp - 1.0 * eta);

    int n = 0;
    const double* x = rdro_result_x(result, &n);
    REQUIRE(n == 10);
    for (int i = 0; i < n; ++i) CHECK(x[i] >= 0.0);

    int rows = 0, cols = 0;
    const double* plan = rdro_result_plan(result, &rows, &cols);
    REQUIRE(rows == 10);
    REQUIRE(cols == 2);
    double mass = 0.0;
    for (int k = 0; k < rows * cols; ++k) mass += plan[k];
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

    const int trace_len = rdro_result_trace_length(result);
    CHECK(trace_len == rdro_result_iterations(result));
    int iteration = -1;
    double objective = 0, residual = 0;
    CHECK(rdro_result_trace_row(result, 0, &iteration, &objective, &residual) ==
          RDRO_OK);
    CHECK(iteration == 0);
    CHECK(rdro_result_trace_row(result, trace_len, &iteration, &objective,
                                &residual) == RDRO_ERR_DIMENSION);

    rdro_result_destroy(result);
    rdro_run_destroy(run);
}

TEST_CASE("seed override changes the instance deterministically") {
    auto solve_with_seed = [](unsigned long long seed, double* first_x) {
        rdro_run* run = nullptr;
        REQUIRE(rdro_run_create(small_preset_text().c_str(), &run) == RDRO_OK);
        REQUIRE(rdro_run_override_seed(run, seed) == RDRO_OK);
        rdro_result* result = nullptr;
        REQUIRE(rdro_run_solve(run, &result) == RDRO_OK);
        int n = 0;
        const double* x = rdro_result_x(result, &n);
        *first_x = x[0];
        const double value = rdro_result_penalized_value(result);
        rdro_result_destroy(result);
        rdro_run_destroy(run);
        return value;
    };
    double xa = 0, xb = 0, xc = 0;
    const double va = solve_with_seed(101, &xa);
    const double vb = solve_with_seed(101, &xb);
    const double vc = solve_with_seed(202, &xc);
    CHECK(va == vb);
    CHECK(xa == xb);
    CHECK(va != vc);
}

TEST_CASE("sweep through the C surface") {
    std::string text = small_preset_text();
    const auto pos = text.find("\"theta\": 1.0");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "\"theta_grid\": [0.5, 1.0, 2.0]");

    rdro_run* run = nullptr;
    REQUIRE(rdro_run_create(text.c_str(), &run) == RDRO_OK);
    CHECK(rdro_run_is_sweep(run) == 1);
    rdro_sweep* sweep = nullptr;
    REQUIRE(rdro_run_sweep(run, 2, &sweep) == RDRO_OK);
    REQUIRE(rdro_sweep_count(sweep) == 3);
    CHECK(rdro_sweep_exit_code(sweep) == 0);

    double prev_eta = 1e300;
    for (int i = 0; i < 3; ++i) {
        double theta, eta, jp, jc, ms;
        int iterations;
        REQUIRE(rdro_sweep_row(sweep, i, &theta, &eta, &jp, &jc, &iterations,
                               &ms) == RDRO_OK);
        CHECK(eta <= prev_eta + 1e-9);
        CHECK(iterations > 0);
        CHECK(ms >= 0.0);
        prev_eta = eta;
    }
    rdro_sweep_destroy(sweep);
    rdro_run_destroy(run);
}

TEST_CASE("verify suites through the C surface") {
    char* names = rdro_verify_suites();
    const std::string list(names);
    rdro_string_free(names);
    CHECK(list.find("counterexample") != std::string::npos);

    rdro_checks* checks = nullptr;
    REQUIRE(rdro_verify_run("counterexample", &checks) == RDRO_OK);
    REQUIRE(rdro_checks_count(checks) >= 1);
    const char* name = nullptr;
    int passed = 0;
    double measured = 0, threshold = 0;
    REQUIRE(rdro_checks_get(checks, 0, &name, &passed, &measured, &threshold) ==
            RDRO_OK);
    CHECK(passed == 1);
    CHECK(measured <= threshold);
    rdro_checks_destroy(checks);

    CHECK(rdro_verify_run("no-such-suite", &checks) == RDRO_ERR_CONFIG);
}
