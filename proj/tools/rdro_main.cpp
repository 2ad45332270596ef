// rdro: command-line driver for the RDRO solver shared library.
//
//   rdro solve --config cfg.json [--out DIR]
//   rdro solve --preset investment73 [--out DIR]
//   rdro sweep --config cfg.json [--out DIR] [--threads N]
//   rdro verify SUITE
//
// Exit codes: 0 converged / suite passed, 2 iteration-cap termination,
// 1 error. RDRO_SEED overrides the configured seed.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdro.h"

namespace {

// Full round-trip precision so reruns diff byte-identically.
std::string fmt(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

struct RunDeleter {
    void operator()(rdro_run* run) const { rdro_run_destroy(run); }
};
struct ResultDeleter {
    void operator()(rdro_result* r) const { rdro_result_destroy(r); }
};
struct SweepDeleter {
    void operator()(rdro_sweep* s) const { rdro_sweep_destroy(s); }
};
struct ChecksDeleter {
    void operator()(rdro_checks* c) const { rdro_checks_destroy(c); }
};

int fail(const std::string& context) {
    std::cerr << "error: " << context << ": " << rdro_last_error() << "\n";
    return 1;
}

std::string load_config_text(const std::string& config_path,
                             const std::string& preset) {
    if (!preset.empty()) {
        char* text = rdro_preset_config(preset.c_str());
        if (!text) {
            throw std::runtime_error(std::string("unknown preset: ") +
                                     rdro_last_error());
        }
        std::string out(text);
        rdro_string_free(text);
        return out;
    }
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file " + config_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::unique_ptr<rdro_run, RunDeleter> make_run(const std::string& config_path,
                                               const std::string& preset) {
    const std::string text = load_config_text(config_path, preset);
    rdro_run* raw = nullptr;
    if (rdro_run_create(text.c_str(), &raw) != RDRO_OK) {
        throw std::runtime_error(std::string("invalid config: ") +
                                 rdro_last_error());
    }
    std::unique_ptr<rdro_run, RunDeleter> run(raw);
    if (const char* seed_text = std::getenv("RDRO_SEED")) {
        rdro_run_override_seed(run.get(), std::strtoull(seed_text, nullptr, 10));
    }
    return run;
}

std::filesystem::path resolve_out_dir(const rdro_run* run,
                                      const std::string& out_flag) {
    const std::filesystem::path dir =
        out_flag.empty() ? rdro_run_output_directory(run) : out_flag;
    std::filesystem::create_directories(dir);
    return dir;
}

void write_solve_outputs(const rdro_result* result,
                         const std::filesystem::path& dir) {
    int n = 0;
    const double* x = rdro_result_x(result, &n);
    {
        std::ofstream out(dir / "x_star.csv", std::ios::binary);
        out << "index,value\n";
        for (int i = 0; i < n; ++i) out << i << "," << fmt(x[i]) << "\n";
    }
    int rows = 0, cols = 0;
    const double* plan = rdro_result_plan(result, &rows, &cols);
    {
        std::ofstream out(dir / "plan.csv", std::ios::binary);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                out << (j ? "," : "") << fmt(plan[i * cols + j]);
            }
            out << "\n";
        }
    }
    {
        std::ofstream out(dir / "trace.csv", std::ios::binary);
        out << "iteration,objective,residual\n";
        const int len = rdro_result_trace_length(result);
        for (int k = 0; k < len; ++k) {
            int iter = 0;
            double objective = 0, residual = 0;
            rdro_result_trace_row(result, k, &iter, &objective, &residual);
            out << iter << "," << fmt(objective) << "," << fmt(residual) << "\n";
        }
    }
    {
        nlohmann::json report;
        report["schema"] = 1;
        report["theta"] = rdro_result_theta(result);
        report["eta"] = rdro_result_eta(result);
        report["penalized_value"] = rdro_result_penalized_value(result);
        report["constrained_value"] = rdro_result_constrained_value(result);
        report["iterations"] = rdro_result_iterations(result);
        report["converged"] = rdro_result_converged(result) == 1;
        report["runtime_ms"] = rdro_result_runtime_ms(result);
        report["x_star"] = std::vector<double>(x, x + n);
        std::ofstream out(dir / "report.json", std::ios::binary);
        out << report.dump(2) << "\n";
    }
}

int cmd_solve(const std::string& config_path, const std::string& preset,
              const std::string& out_flag) {
    auto run = make_run(config_path, preset);
    rdro_result* raw = nullptr;
    if (rdro_run_solve(run.get(), &raw) != RDRO_OK) return fail("solve");
    std::unique_ptr<rdro_result, ResultDeleter> result(raw);
    const auto dir = resolve_out_dir(run.get(), out_flag);
    write_solve_outputs(result.get(), dir);
    std::cout << "solve: theta=" << fmt(rdro_result_theta(result.get()))
              << " J^p=" << fmt(rdro_result_penalized_value(result.get()))
              << " eta=" << fmt(rdro_result_eta(result.get()))
              << " J^c=" << fmt(rdro_result_constrained_value(result.get()))
              << " iterations=" << rdro_result_iterations(result.get())
              << (rdro_result_converged(result.get()) ? " (converged)"
                                                      : " (iteration cap)")
              << "\n"
              << "outputs written to " << dir.string() << "\n";
    return rdro_result_converged(result.get()) ? 0 : 2;
}

int cmd_sweep(const std::string& config_path, const std::string& preset,
              const std::string& out_flag, int threads) {
    auto run = make_run(config_path, preset);
    rdro_sweep* raw = nullptr;
    if (rdro_run_sweep(run.get(), threads, &raw) != RDRO_OK) {
        return fail("sweep");
    }
    std::unique_ptr<rdro_sweep, SweepDeleter> sweep(raw);
    const auto dir = resolve_out_dir(run.get(), out_flag);
    std::ofstream out(dir / "duality.csv", std::ios::binary);
    out << "theta,eta,value_penalized,value_constrained,iterations,runtime_ms\n";
    const int count = rdro_sweep_count(sweep.get());
    for (int i = 0; i < count; ++i) {
        double theta, eta, jp, jc, ms;
        int iterations;
        rdro_sweep_row(sweep.get(), i, &theta, &eta, &jp, &jc, &iterations, &ms);
        out << fmt(theta) << "," << fmt(eta) << "," << fmt(jp) << "," << fmt(jc)
            << "," << iterations << "," << fmt(ms) << "\n";
    }
    std::cout << "sweep: " << count << " grid points -> "
              << (dir / "duality.csv").string() << "\n";
    return rdro_sweep_exit_code(sweep.get());
}

int cmd_verify(const std::string& suite) {
    rdro_checks* raw = nullptr;
    if (rdro_verify_run(suite.c_str(), &raw) != RDRO_OK) {
        std::cerr << "error: " << rdro_last_error() << "\n";
        return 1;
    }
    std::unique_ptr<rdro_checks, ChecksDeleter> checks(raw);
    bool all_passed = true;
    const int count = rdro_checks_count(checks.get());
    for (int i = 0; i < count; ++i) {
        const char* name = nullptr;
        int passed = 0;
        double measured = 0, threshold = 0;
        rdro_checks_get(checks.get(), i, &name, &passed, &measured, &threshold);
        std::cout << (passed ? "PASS" : "FAIL") << "  " << name
                  << "  (measured " << fmt(measured) << ", allowed "
                  << fmt(threshold) << ")\n";
        all_passed = all_passed && passed;
    }
    return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random distributionally robust optimization solver"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, suite;
    int threads = 0;

    CLI::App* solve = app.add_subcommand("solve", "run a single solve");
    solve->add_option("--config", config_path, "JSON run configuration");
    solve->add_option("--preset", preset, "built-in configuration name");
    solve->add_option("--out", out_dir, "output directory");
    solve->add_option("--threads", threads, "worker threads (0 = auto)");

    CLI::App* sweep = app.add_subcommand("sweep", "run a theta grid");
    sweep->add_option("--config", config_path, "JSON run configuration");
    sweep->add_option("--preset", preset, "built-in configuration name");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--threads", threads, "worker threads (0 = auto)");

    CLI::App* verify = app.add_subcommand("verify", "run an oracle suite");
    verify->add_option("suite", suite, "suite name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            if (config_path.empty() && preset.empty()) {
                std::cerr << "error: solve needs --config or --preset\n";
                return 1;
            }
            return cmd_solve(config_path, preset, out_dir);
        }
        if (sweep->parsed()) {
            if (config_path.empty() && preset.empty()) {
                std::cerr << "error: sweep needs --config or --preset\n";
                return 1;
            }
            return cmd_sweep(config_path, preset, out_dir, threads);
        }
        return cmd_verify(suite);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
