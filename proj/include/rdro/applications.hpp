#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rdro/solver.hpp"

namespace rdro {

// ---- Robust investment -----------------------------------------------------

struct InvestmentInstance {
    int n = 50;
    Vector pricing_kernel;                   // m_i > 0
    double initial_wealth = 1.0;             // budget x0
    double risk_aversion = 0.5;              // CARA alpha
    std::vector<double> y_payoffs = {0.0, 1.0};
    Vector p;    // empty -> uniform over n atoms
    Vector nu0;  // empty -> uniform over payoffs
};

// Lognormal kernel m_i = exp(sigma*Z_i - sigma^2/2), Z_i iid standard normal
// under the given seed; E[m_i] = 1.
Vector make_pricing_kernel(int n, double volatility, std::uint64_t seed);

// CARA utility U(x,y) = -exp(-alpha(x+y))/alpha over the budget orthant
// {x >= 0, sum_i p_i m_i x_i <= x0}.
PenalizedProblem make_investment_problem(const InvestmentInstance& instance,
                                         double theta, double epsilon);

// ---- Healthcare resource allocation ----------------------------------------

struct HealthcareInstance {
    int hospitals = 2;
    Vector max_demands;               // M_i
    double capacity = 1.0;            // C
    double beta = 0.5;                // coverage threshold
    std::vector<Vector> demand_atoms; // environment atoms in prod [0, M_i]
    Vector nu0;                       // empty -> uniform over atoms
};

// Uniform demand atoms in the box prod [0, M_i].
std::vector<Vector> sample_demand_atoms(const Vector& max_demands, int count,
                                        std::uint64_t seed);

// Shortage utility U(x,y) = -sum_i max(y_i - x_i, 0) with the subgradient
// selection 1{x_i < y_i} (0 at the kink); the decision is a single allocation
// vector on the coverage simplex {0 <= x <= C, beta*C <= sum x <= C}, so the
// outer loop runs as a projected subgradient method.
PenalizedProblem make_healthcare_problem(const HealthcareInstance& instance,
                                         double theta, double epsilon);

// The two-hospital family X = (k*M, k*M), k in [1, 3/2], under capacity
// C = 3M and coverage beta = 1/2: every member is feasible and attains
// worst-case expected shortage 0, witnessing non-uniqueness. Returns
// (k, worst_case_value) per grid point.
std::vector<std::pair<double, double>> verify_counterexample(
    const std::vector<double>& k_grid, double max_demand, double theta);

// ---- Reliable facility location --------------------------------------------

struct FacilityInstance {
    Vector opening_costs;  // f_i
    Vector capacities;     // K_i
    Vector demands;        // d_j
    Matrix service_costs;  // c_ij >= 0
    double budget = 1.0;   // B
    std::vector<Vector> scenario_atoms;  // effective-capacity fractions
    Vector nu0;                          // empty -> uniform over atoms
};

// Second-stage assignment: min sum c_ij z_ij subject to meeting every demand
// and the effective capacities K_i x_i y_i. Solved exactly by reducing to a
// balanced transportation problem with a zero-cost slack customer. Throws
// InfeasibleError (carrying the deficit) when supply cannot cover demand.
std::pair<double, Matrix> facility_second_stage(const FacilityInstance& instance,
                                                const Vector& x,
                                                const Vector& y);

// sum_i f_i x_i + second-stage cost.
double facility_total_cost(const FacilityInstance& instance, const Vector& x,
                           const Vector& y);

// Outer RDRO problem for facility location (documented extension): utility
// -(f'x + g(x,y)) with central-difference subgradients of the piecewise
// linear g, over {x in [0,1]^F, f'x <= B}. The caller must supply scenario
// atoms that keep the second stage feasible across the decision set.
PenalizedProblem make_facility_problem(const FacilityInstance& instance,
                                       double theta, double epsilon);

}  // namespace rdro
