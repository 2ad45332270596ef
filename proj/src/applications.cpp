#include "rdro/applications.hpp"

#include <cmath>
#include <random>

#include "rdro/mincostflow.hpp"

namespace rdro {

Vector make_pricing_kernel(int n, double volatility, std::uint64_t seed) {
    if (n < 1) throw DomainError("kernel needs n >= 1");
    if (!(volatility > 0.0)) throw DomainError("volatility must be > 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector m(n);
    const double drift = -0.5 * volatility * volatility;
    for (int i = 0; i < n; ++i) m[i] = std::exp(volatility * normal(rng) + drift);
    return m;
}

PenalizedProblem make_investment_problem(const InvestmentInstance& instance,
                                         double theta, double epsilon) {
    if (instance.n < 1) throw ConfigError("investment instance needs n >= 1");
    if (instance.pricing_kernel.size() != instance.n) {
        throw DimensionError("pricing kernel length != n");
    }
    if (!(instance.pricing_kernel.minCoeff() > 0.0)) {
        throw ConfigError("pricing kernel must be strictly positive");
    }
    if (!(instance.initial_wealth > 0.0)) throw ConfigError("x0 must be > 0");
    if (!(instance.risk_aversion > 0.0)) throw ConfigError("alpha must be > 0");

    const double alpha = instance.risk_aversion;
    PenalizedProblem problem;
    problem.utility.name = "cara";
    problem.utility.value = [alpha](const Vector& x, const Vector& y) {
        return -std::exp(-alpha * (x[0] + y[0])) / alpha;
    };
    problem.utility.grad_x = [alpha](const Vector& x, const Vector& y) {
        Vector g(1);
        g[0] = std::exp(-alpha * (x[0] + y[0]));
        return g;
    };
    problem.p = instance.p.size() == 0
                    ? DiscreteMeasure::uniform(instance.n)
                    : DiscreteMeasure::probability(instance.p);
    const Eigen::Index r = static_cast<Eigen::Index>(instance.y_payoffs.size());
    problem.nu0 = instance.nu0.size() == 0 ? DiscreteMeasure::uniform(r)
                                           : DiscreteMeasure::probability(instance.nu0);
    problem.y_values.reserve(r);
    for (double y : instance.y_payoffs) {
        problem.y_values.push_back(Vector::Constant(1, y));
    }
    problem.theta = theta;
    problem.divergence_kind = DivergenceKind::kl;
    problem.epsilon = epsilon;
    problem.decision_dim = 1;
    problem.decision_set = DecisionSet::budget_orthant(
        problem.p.weights().cwiseProduct(instance.pricing_kernel),
        instance.initial_wealth);
    problem.validate();
    return problem;
}

std::vector<Vector> sample_demand_atoms(const Vector& max_demands, int count,
                                        std::uint64_t seed) {
    if (count < 1) throw DomainError("need at least one demand atom");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vector> atoms;
    atoms.reserve(count);
    for (int a = 0; a < count; ++a) {
        Vector y(max_demands.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            y[i] = unif(rng) * max_demands[i];
        }
        atoms.push_back(std::move(y));
    }
    return atoms;
}

PenalizedProblem make_healthcare_problem(const HealthcareInstance& instance,
                                         double theta, double epsilon) {
    const Eigen::Index m = instance.hospitals;
    if (m < 1) throw ConfigError("healthcare instance needs hospitals >= 1");
    if (instance.max_demands.size() != m) {
        throw DimensionError("max_demands length != hospitals");
    }
    if (!(instance.capacity > 0.0)) throw ConfigError("capacity must be > 0");
    if (instance.beta < 0.0 || instance.beta > 1.0) {
        throw ConfigError("beta must be in [0,1]");
    }
    if (instance.demand_atoms.empty()) {
        throw ConfigError("healthcare instance has no demand atoms");
    }
    for (const Vector& y : instance.demand_atoms) {
        if (y.size() != m) throw DimensionError("demand atom dimension != hospitals");
    }

    PenalizedProblem problem;
    problem.utility.name = "shortage";
    problem.utility.value = [](const Vector& x, const Vector& y) {
        return -(y - x).cwiseMax(0.0).sum();
    };
    problem.utility.grad_x = [](const Vector& x, const Vector& y) {
        Vector g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            g[i] = x[i] < y[i] ? 1.0 : 0.0;
        }
        return g;
    };
    // Deterministic allocation: one decision atom holding the vector.
    problem.p = DiscreteMeasure::probability(Vector::Ones(1));
    const Eigen::Index r = static_cast<Eigen::Index>(instance.demand_atoms.size());
    problem.nu0 = instance.nu0.size() == 0 ? DiscreteMeasure::uniform(r)
                                           : DiscreteMeasure::probability(instance.nu0);
    problem.y_values = instance.demand_atoms;
    problem.theta = theta;
    problem.divergence_kind = DivergenceKind::kl;
    problem.epsilon = epsilon;
    problem.decision_dim = m;
    problem.decision_set = DecisionSet::coverage_simplex(
        Vector::Constant(m, instance.capacity), instance.capacity,
        instance.beta);
    problem.validate();
    return problem;
}

std::vector<std::pair<double, double>> verify_counterexample(
    const std::vector<double>& k_grid, double max_demand, double theta) {
    if (!(max_demand > 0.0)) throw DomainError("max demand must be > 0");
    for (double k : k_grid) {
        if (k < 1.0 || k > 1.5) {
            throw DomainError("counterexample grid must stay inside [1, 1.5]");
        }
    }
    HealthcareInstance instance;
    instance.hospitals = 2;
    instance.max_demands = Vector::Constant(2, max_demand);
    instance.capacity = 3.0 * max_demand;
    instance.beta = 0.5;
    instance.demand_atoms = sample_demand_atoms(instance.max_demands, 4, 1234);
    PenalizedProblem problem = make_healthcare_problem(instance, theta, 1e-2);

    ScalingConfig scaling;
    scaling.epsilon = problem.epsilon;
    std::vector<std::pair<double, double>> out;
    out.reserve(k_grid.size());
    for (double k : k_grid) {
        const Vector x = Vector::Constant(2, k * max_demand);
        if (problem.decision_set.feasibility_residual(x) > 1e-12) {
            throw DomainError("counterexample decision left the feasible set");
        }
        const Matrix cost = cost_matrix(problem, x);
        auto [value, plan] = inner_value(cost, problem.p, problem.nu0, theta,
                                         scaling, problem.divergence_kind);
        // value is the worst-case expected (negated) shortage plus penalty;
        // report the shortage cost itself.
        out.emplace_back(k, -value);
    }
    return out;
}

std::pair<double, Matrix> facility_second_stage(const FacilityInstance& instance,
                                                const Vector& x,
                                                const Vector& y) {
    const Eigen::Index F = instance.opening_costs.size();
    const Eigen::Index J = instance.demands.size();
    if (instance.capacities.size() != F || x.size() != F || y.size() != F) {
        throw DimensionError("facility vectors must all have length |I|");
    }
    if (instance.service_costs.rows() != F || instance.service_costs.cols() != J) {
        throw DimensionError("service cost matrix must be |I| x |J|");
    }
    if (instance.service_costs.minCoeff() < 0.0) {
        throw ConfigError("service costs must be nonnegative");
    }
    if (instance.demands.minCoeff() < 0.0) {
        throw ConfigError("demands must be nonnegative");
    }

    const Vector supply =
        instance.capacities.cwiseProduct(x).cwiseProduct(y).cwiseMax(0.0);
    const double surplus = supply.sum() - instance.demands.sum();
    if (surplus < -1e-12 * std::max(1.0, instance.demands.sum())) {
        throw InfeasibleError("second-stage supply short of demand by " +
                                  std::to_string(-surplus),
                              -surplus);
    }

    // Balanced reduction: a slack customer absorbs the surplus at zero cost.
    Vector demand(J + 1);
    demand.head(J) = instance.demands;
    demand[J] = std::max(surplus, 0.0);
    Matrix cost(F, J + 1);
    cost.leftCols(J) = instance.service_costs;
    cost.col(J).setZero();

    TransportSolution sol = solve_transportation(supply, demand, cost);
    return {sol.cost, sol.assignment.leftCols(J)};
}

double facility_total_cost(const FacilityInstance& instance, const Vector& x,
                           const Vector& y) {
    return instance.opening_costs.dot(x) +
           facility_second_stage(instance, x, y).first;
}

PenalizedProblem make_facility_problem(const FacilityInstance& instance,
                                       double theta, double epsilon) {
    const Eigen::Index F = instance.opening_costs.size();
    if (instance.scenario_atoms.empty()) {
        throw ConfigError("facility instance has no scenario atoms");
    }
    for (const Vector& y : instance.scenario_atoms) {
        if (y.size() != F) throw DimensionError("scenario atom dimension != |I|");
    }
    FacilityInstance data = instance;

    PenalizedProblem problem;
    problem.utility.name = "facility";
    problem.utility.value = [data](const Vector& x, const Vector& y) {
        return -facility_total_cost(data, x, y);
    };
    problem.utility.grad_x = [data](const Vector& x, const Vector& y) {
        // central differences; g is convex piecewise linear, so the averaged
        // one-sided slopes form a valid subgradient selection
        Vector g(x.size());
        const double h = 1e-6;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            Vector lo = x, hi = x;
            lo[i] = std::max(0.0, x[i] - h);
            hi[i] = std::min(1.0, x[i] + h);
            const double flo = facility_total_cost(data, lo, y);
            const double fhi = facility_total_cost(data, hi, y);
            g[i] = -(fhi - flo) / (hi[i] - lo[i]);
        }
        return g;
    };
    problem.p = DiscreteMeasure::probability(Vector::Ones(1));
    const Eigen::Index r = static_cast<Eigen::Index>(instance.scenario_atoms.size());
    problem.nu0 = instance.nu0.size() == 0 ? DiscreteMeasure::uniform(r)
                                           : DiscreteMeasure::probability(instance.nu0);
    problem.y_values = instance.scenario_atoms;
    problem.theta = theta;
    problem.divergence_kind = DivergenceKind::kl;
    problem.epsilon = epsilon;
    problem.decision_dim = F;
    problem.decision_set = DecisionSet::weighted_box_budget(
        Vector::Ones(F), instance.opening_costs, instance.budget);
    problem.validate();
    return problem;
}

}  // namespace rdro
