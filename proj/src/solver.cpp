#include "rdro/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace rdro {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void PenalizedProblem::validate() const {
    if (!p.is_probability() || !nu0.is_probability()) {
        throw ConfigError("p and nu0 must be probability measures");
    }
    if (static_cast<Eigen::Index>(y_values.size()) != nu0.size()) {
        throw DimensionError("y_values count does not match nu0");
    }
    if (!(theta >= 0.0)) throw ConfigError("theta must be >= 0");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (decision_dim < 1) throw ConfigError("decision_dim must be >= 1");
    if (decision_set.dimension() != flat_size()) {
        throw DimensionError("decision set dimension " +
                             std::to_string(decision_set.dimension()) +
                             " != n*d = " + std::to_string(flat_size()));
    }
    if (!utility.value || !utility.grad_x) {
        throw ConfigError("utility value/gradient not set");
    }
}

Vector PenalizedProblem::atom(const Vector& x, Eigen::Index i) const {
    return x.segment(i * decision_dim, decision_dim);
}

Matrix cost_matrix(const PenalizedProblem& problem, const Vector& x) {
    const Eigen::Index n = problem.atoms();
    const Eigen::Index r = problem.nu0.size();
    Matrix cost(n, r);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector xi = problem.atom(x, i);
        for (Eigen::Index j = 0; j < r; ++j) {
            const double uij = problem.utility.value(xi, problem.y_values[j]);
            if (!std::isfinite(uij)) {
                throw NumericError("utility not finite at decision atom " +
                                   std::to_string(i) + ", environment atom " +
                                   std::to_string(j));
            }
            cost(i, j) = uij;
        }
    }
    return cost;
}

Vector outer_gradient(const PenalizedProblem& problem, const Vector& x,
                      const Matrix& plan) {
    if (plan.rows() != problem.atoms() ||
        plan.cols() != static_cast<Eigen::Index>(problem.y_values.size())) {
        throw DimensionError("plan shape does not match the problem");
    }
    Vector grad = Vector::Zero(problem.flat_size());
    for (Eigen::Index i = 0; i < problem.atoms(); ++i) {
        const Vector xi = problem.atom(x, i);
        Vector gi = Vector::Zero(problem.decision_dim);
        for (Eigen::Index j = 0; j < plan.cols(); ++j) {
            const double gij = plan(i, j);
            if (gij != 0.0) gi += gij * problem.utility.grad_x(xi, problem.y_values[j]);
        }
        grad.segment(i * problem.decision_dim, problem.decision_dim) = gi;
    }
    return grad;
}

Vector initial_point(const PenalizedProblem& problem,
                     const OuterConfig& config) {
    if (!config.random_init) {
        return problem.decision_set.project(Vector::Zero(problem.flat_size()));
    }
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const DecisionSet& set = problem.decision_set;
    Vector x(problem.flat_size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double hi = set.budget() / set.weights()[i];
        if (set.upper()) hi = std::min(hi, (*set.upper())[i]);
        x[i] = unif(rng) * hi;
    }
    return set.project(x);
}

namespace {

double plan_fixed_objective(const PenalizedProblem& problem, const Matrix& plan,
                            const Vector& x, double penalty_term) {
    double value = penalty_term;
    for (Eigen::Index i = 0; i < problem.atoms(); ++i) {
        const Vector xi = problem.atom(x, i);
        for (Eigen::Index j = 0; j < plan.cols(); ++j) {
            if (plan(i, j) != 0.0) {
                value += plan(i, j) * problem.utility.value(xi, problem.y_values[j]);
            }
        }
    }
    return value;
}

}  // namespace

SolveReport solve_penalized(const PenalizedProblem& problem, const Vector& x0,
                            const OuterConfig& config,
                            const ScalingConfig& scaling) {
    problem.validate();
    if (!(config.step_size > 0.0)) throw ConfigError("step_size must be > 0");
    if (x0.size() != problem.flat_size()) {
        throw DimensionError("x0 has the wrong length");
    }
    const DivergenceSpec penalty =
        DivergenceSpec::make(problem.divergence_kind, problem.theta);
    const double dir =
        config.direction == StepDirection::ascent ? 1.0 : -1.0;

    SolveReport report;
    report.theta = problem.theta;
    Vector x = problem.decision_set.project(x0);
    Matrix plan;
    ScalingWarmStart warm;
    bool have_warm = false;
    for (int k = 0; k < config.max_outer_iterations; ++k) {
        const Matrix cost = cost_matrix(problem, x);
        const ScalingReport inner =
            scaling_solve(cost, problem.p, problem.nu0, penalty, scaling,
                          have_warm ? &warm : nullptr);
        warm.dual_f = inner.dual_f;
        warm.dual_g = inner.dual_g;
        have_warm = true;
        plan = inner.plan;
        const double penalty_term =
            eval_divergence(penalty, marginals(plan).second, problem.nu0);
        const double objective =
            (plan.array() * cost.array()).sum() + penalty_term;

        const Vector grad = outer_gradient(problem, x, plan);
        double alpha = config.step_size;
        Vector x_next = problem.decision_set.project(x + dir * alpha * grad);
        if (config.backtracking) {
            const double before = plan_fixed_objective(problem, plan, x, 0.0);
            for (int halvings = 0; halvings < 30; ++halvings) {
                const double after =
                    plan_fixed_objective(problem, plan, x_next, 0.0);
                const bool improved = dir > 0 ? after >= before - 1e-14
                                              : after <= before + 1e-14;
                if (improved) break;
                alpha *= 0.5;
                x_next = problem.decision_set.project(x + dir * alpha * grad);
            }
        }

        const double residual = (x_next - x).array().abs().maxCoeff();
        report.trace.push_back({k, objective, residual});
        if (config.record_iterates) report.iterates.push_back(x);
        x = x_next;
        report.iterations = k + 1;
        if (residual < config.outer_tolerance) {
            report.converged = true;
            break;
        }
    }
    if (config.record_iterates) report.iterates.push_back(x);

    // Final inner solve at the terminal decision.
    const Matrix cost = cost_matrix(problem, x);
    const ScalingReport inner =
        scaling_solve(cost, problem.p, problem.nu0, penalty, scaling,
                      have_warm ? &warm : nullptr);
    report.x_star = x;
    report.plan = inner.plan;
    const DiscreteMeasure second = marginals(report.plan).second;
    report.penalized_value = (report.plan.array() * cost.array()).sum() +
                             eval_divergence(penalty, second, problem.nu0);
    report.eta = eval_divergence(
        DivergenceSpec::make(problem.divergence_kind, 1.0), second,
        problem.nu0);
    report.constrained_value =
        report.penalized_value - problem.theta * report.eta;
    return report;
}

std::vector<SolveReport> theta_sweep(const PenalizedProblem& problem_template,
                                     const std::vector<double>& thetas,
                                     const OuterConfig& config,
                                     const ScalingConfig& scaling,
                                     int threads) {
    if (thetas.empty()) throw ConfigError("theta grid is empty");
    for (size_t i = 1; i < thetas.size(); ++i) {
        if (!(thetas[i] > thetas[i - 1])) {
            throw ConfigError("theta grid must be strictly increasing");
        }
    }
    std::vector<SolveReport> reports(thetas.size());
    auto run_one = [&](size_t i) {
        PenalizedProblem problem = problem_template;
        problem.theta = thetas[i];
        reports[i] = solve_penalized(problem, initial_point(problem, config),
                                     config, scaling);
    };
    const int workers = threads <= 0
        ? static_cast<int>(std::thread::hardware_concurrency())
        : threads;
    if (workers <= 1 || thetas.size() == 1) {
        for (size_t i = 0; i < thetas.size(); ++i) run_one(i);
        return reports;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    const int count = std::min<size_t>(workers, thetas.size());
    pool.reserve(count);
    for (int t = 0; t < count; ++t) {
        pool.emplace_back([&] {
            for (size_t i = next++; i < thetas.size(); i = next++) run_one(i);
        });
    }
    for (auto& th : pool) th.join();
    return reports;
}

SolveReport solve_constrained(const PenalizedProblem& problem_template,
                              double eta_target,
                              std::pair<double, double> theta_bracket,
                              const OuterConfig& config,
                              const ScalingConfig& scaling,
                              double dual_tolerance) {
    if (!(eta_target >= 0.0)) throw ConfigError("eta_target must be >= 0");
    auto [lo, hi] = theta_bracket;
    if (!(lo > 0.0) || !(hi > lo)) {
        throw BracketError("theta bracket must satisfy 0 < low < high");
    }
    auto solve_at = [&](double theta) {
        PenalizedProblem problem = problem_template;
        problem.theta = theta;
        return solve_penalized(problem, initial_point(problem, config), config,
                               scaling);
    };

    SolveReport at_lo = solve_at(lo);
    if (std::abs(at_lo.eta - eta_target) <= dual_tolerance) return at_lo;
    SolveReport at_hi = solve_at(hi);
    if (std::abs(at_hi.eta - eta_target) <= dual_tolerance) return at_hi;
    // eta(theta) is nonincreasing
    if (!(at_lo.eta >= eta_target && eta_target >= at_hi.eta)) {
        throw BracketError(
            "bracket does not straddle eta_target: eta(" + std::to_string(lo) +
            ") = " + std::to_string(at_lo.eta) + ", eta(" + std::to_string(hi) +
            ") = " + std::to_string(at_hi.eta));
    }

    SolveReport best = at_lo;
    double best_gap = std::abs(at_lo.eta - eta_target);
    if (std::abs(at_hi.eta - eta_target) < best_gap) {
        best = at_hi;
        best_gap = std::abs(at_hi.eta - eta_target);
    }
    for (int it = 0; it < 60 && best_gap > dual_tolerance; ++it) {
        const double mid = std::sqrt(lo * hi);  // theta spans decades
        SolveReport at_mid = solve_at(mid);
        const double gap = std::abs(at_mid.eta - eta_target);
        if (gap < best_gap) {
            best = at_mid;
            best_gap = gap;
        }
        if (at_mid.eta > eta_target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi / lo < 1.0 + 1e-12) break;
    }
    return best;
}

double ConvergenceDiagnostics::envelope(int k) const {
    return fitted_amplitude * std::pow(1.0 - fitted_rate, k) + fitted_floor;
}

ConvergenceDiagnostics fit_convergence(const std::vector<double>& residuals) {
    if (residuals.size() < 10) {
        throw DomainError("need at least 10 residuals to fit a rate");
    }
    ConvergenceDiagnostics diag;
    diag.residual_series = residuals;
    for (size_t k = 0; k + 1 < residuals.size(); ++k) {
        if (residuals[k + 1] > 1.05 * residuals[k] + 1e-300) {
            diag.warning = "residuals increase by more than 5% at step " +
                           std::to_string(k);
            break;
        }
    }

    const double min_res = *std::min_element(residuals.begin(), residuals.end());
    // Linear fit of ln(res - floor) vs k over the pre-plateau points; returns
    // {mse, slope, intercept}.
    auto fit_at = [&](double floor) {
        double sk = 0, sy = 0, skk = 0, sky = 0;
        int count = 0;
        for (size_t k = 0; k < residuals.size(); ++k) {
            const double value = residuals[k] - floor;
            if (value <= std::max(1e-300, 1e-3 * floor)) continue;
            const double y = std::log(value);
            sk += static_cast<double>(k);
            sy += y;
            skk += static_cast<double>(k) * static_cast<double>(k);
            sky += static_cast<double>(k) * y;
            ++count;
        }
        struct Fit { double mse, slope, intercept; int count; };
        if (count < 3) return Fit{kInf, 0.0, 0.0, count};
        const double denom = count * skk - sk * sk;
        if (denom <= 0) return Fit{kInf, 0.0, 0.0, count};
        const double slope = (count * sky - sk * sy) / denom;
        const double intercept = (sy - slope * sk) / count;
        double mse = 0;
        for (size_t k = 0; k < residuals.size(); ++k) {
            const double value = residuals[k] - floor;
            if (value <= std::max(1e-300, 1e-3 * floor)) continue;
            const double e = std::log(value) - (slope * k + intercept);
            mse += e * e;
        }
        return Fit{mse / count, slope, intercept, count};
    };

    // Scan candidate floors (0 plus a log grid below min_res), then refine by
    // golden section around the best candidate.
    double best_floor = 0.0;
    double best_mse = fit_at(0.0).mse;
    const int scan = 160;
    for (int s = 0; s < scan; ++s) {
        const double frac = std::pow(10.0, -8.0 * (1.0 - s / double(scan - 1)));
        const double floor = min_res * (1.0 - 1e-9) * frac;
        const double mse = fit_at(floor).mse;
        if (mse < best_mse) {
            best_mse = mse;
            best_floor = floor;
        }
    }
    {
        double a = best_floor * 0.5;
        double b = std::min(min_res * (1.0 - 1e-9), best_floor * 2.0 + 1e-300);
        const double gr = 0.61803398874989484;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        for (int it = 0; it < 80; ++it) {
            if (fit_at(c).mse < fit_at(d).mse) b = d; else a = c;
            c = b - gr * (b - a);
            d = a + gr * (b - a);
        }
        const double refined = 0.5 * (a + b);
        if (fit_at(refined).mse < best_mse) best_floor = refined;
    }

    const auto fit = fit_at(best_floor);
    diag.fitted_floor = best_floor;
    double rate = 1.0 - std::exp(fit.slope);
    rate = std::min(std::max(rate, 1e-12), 1.0 - 1e-12);
    diag.fitted_rate = rate;

    // Calibrate the amplitude so the envelope dominates the series.
    double amplitude = 0.0;
    for (size_t k = 0; k < residuals.size(); ++k) {
        const double excess = residuals[k] - best_floor;
        const double decay = std::pow(1.0 - rate, static_cast<double>(k));
        if (excess <= 0.0 || decay < 1e-280) continue;
        amplitude = std::max(amplitude, excess / decay);
    }
    diag.fitted_amplitude = amplitude > 0.0 ? amplitude : std::exp(fit.intercept);
    return diag;
}

}  // namespace rdro
