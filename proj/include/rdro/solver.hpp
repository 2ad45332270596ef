#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rdro/entropic.hpp"
#include "rdro/projection.hpp"

namespace rdro {

// U(x, y) on atom values together with its partial gradient in x. Atom
// values are vectors so scalar-atom problems (investment) and block-atom
// problems (healthcare allocations, facility capacity levels) share one
// solver. grad_x may be any measurable subgradient selection where U kinks.
struct BivariateUtility {
    std::function<double(const Vector&, const Vector&)> value;
    std::function<Vector(const Vector&, const Vector&)> grad_x;
    std::string name = "custom";
};

// Full penalized problem instance: sup_x inf_gamma sum gamma_ij U(x_i, y_j)
// + i{pi_1 gamma = p} + theta * D_phi(pi_2 gamma, nu0).
struct PenalizedProblem {
    BivariateUtility utility;
    DiscreteMeasure p;             // n decision atoms (probability)
    DiscreteMeasure nu0;           // r environment atoms (probability)
    std::vector<Vector> y_values;  // r atom values
    double theta = 1.0;
    DivergenceKind divergence_kind = DivergenceKind::kl;
    DecisionSet decision_set;
    double epsilon = 1e-2;
    Eigen::Index decision_dim = 1;  // coordinates per decision atom

    Eigen::Index atoms() const { return p.size(); }
    Eigen::Index flat_size() const { return p.size() * decision_dim; }
    void validate() const;
    // View of atom i inside a flattened decision vector.
    Vector atom(const Vector& x, Eigen::Index i) const;
};

enum class StepDirection { ascent, paper_descent };

struct OuterConfig {
    double step_size = 0.1;
    int max_outer_iterations = 1000;
    double outer_tolerance = 1e-7;
    StepDirection direction = StepDirection::ascent;
    std::uint64_t seed = 0;
    bool random_init = false;     // seeded feasible start instead of P(0)
    bool backtracking = true;     // halve the step while the plan-fixed
                                  // objective moves the wrong way
    bool record_iterates = false;
};

struct TracePoint {
    int iteration;
    double objective;      // penalized objective at (x_k, gamma_k)
    double step_residual;  // ||x_{k+1} - x_k||_inf
};

struct SolveReport {
    Vector x_star;
    Matrix plan;
    double penalized_value = 0.0;    // J^p(theta)
    double eta = 0.0;                // R_2(gamma*) = D_phi(pi_2 gamma*, nu0)
    double constrained_value = 0.0;  // J^c(eta) = J^p(theta) - theta*eta
    double theta = 0.0;
    std::vector<TracePoint> trace;
    std::vector<Vector> iterates;  // filled when record_iterates is set
    int iterations = 0;
    bool converged = false;
};

struct ConvergenceDiagnostics {
    double fitted_rate = 0.0;       // r in (1-r)^k
    double fitted_floor = 0.0;      // plateau level
    double fitted_amplitude = 1.0;  // envelope amplitude (max-ratio calibrated)
    std::vector<double> residual_series;
    std::string warning;  // set when the series is non-monotone beyond 5%

    double envelope(int k) const;
};

Matrix cost_matrix(const PenalizedProblem& problem, const Vector& x);

// Gradient of the plan-fixed objective, stacked per atom:
//   grad block i = sum_j gamma_ij * U_x(x_i, y_j)
Vector outer_gradient(const PenalizedProblem& problem, const Vector& x,
                      const Matrix& plan);

// Deterministic start: projection of zero, or a seeded random feasible point.
Vector initial_point(const PenalizedProblem& problem, const OuterConfig& config);

// Projected-gradient outer loop with the scaling algorithm as inexact inner
// solver. The trace objective is the unregularized penalized objective at
// each iterate's plan.
SolveReport solve_penalized(const PenalizedProblem& problem, const Vector& x0,
                            const OuterConfig& config,
                            const ScalingConfig& scaling);

// Independent solves over a strictly increasing theta grid; exposes the
// (theta, eta, J^p, J^c) duality curve. Solves may run concurrently.
std::vector<SolveReport> theta_sweep(const PenalizedProblem& problem_template,
                                     const std::vector<double>& thetas,
                                     const OuterConfig& config,
                                     const ScalingConfig& scaling,
                                     int threads = 1);

// Recovers the constrained problem at a target eta by bisecting theta inside
// the bracket until |eta(theta) - eta_target| <= dual_tolerance. eta(theta)
// is nonincreasing, so the bracket must satisfy eta(low) >= target >=
// eta(high).
SolveReport solve_constrained(const PenalizedProblem& problem_template,
                              double eta_target,
                              std::pair<double, double> theta_bracket,
                              const OuterConfig& config,
                              const ScalingConfig& scaling,
                              double dual_tolerance = 1e-4);

// Fits residual_k ~ A*(1-r)^k + floor. The floor is chosen by scanning for
// the value whose log-residual fit is most linear; the amplitude is then
// calibrated as the max ratio so envelope(k) dominates the series.
ConvergenceDiagnostics fit_convergence(const std::vector<double>& residuals);

}  // namespace rdro
