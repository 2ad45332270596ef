#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rdro/applications.hpp"
#include "rdro/entropic.hpp"
#include "test_util.hpp"

using namespace rdro;

TEST_CASE("pricing kernel basics") {
    SUBCASE("small volatility collapses to ones") {
        const Vector m = make_pricing_kernel(100, 1e-9, 3);
        CHECK((m.array() - 1.0).abs().maxCoeff() <= 1e-7);
    }

    SUBCASE("fixed seed reproduces the kernel bit for bit") {
        const Vector a = make_pricing_kernel(64, 0.5, 42);
        const Vector b = make_pricing_kernel(64, 0.5, 42);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
        const Vector c = make_pricing_kernel(64, 0.5, 43);
        CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
    }

    SUBCASE("empirical mean is near one") {
        const Vector m = make_pricing_kernel(100000, 0.5, 7);
        CHECK(m.mean() >= 0.99);
        CHECK(m.mean() <= 1.01);
        CHECK(m.minCoeff() > 0.0);
    }
}

TEST_CASE("investment problem wiring") {
    InvestmentInstance instance;
    instance.n = 50;
    instance.pricing_kernel = make_pricing_kernel(50, 0.5, 11);
    const PenalizedProblem problem = make_investment_problem(instance, 1.0, 1e-3);
    CHECK(problem.atoms() == 50);
    CHECK(problem.y_values.size() == 2);
    CHECK(problem.y_values[0][0] == 0.0);
    CHECK(problem.y_values[1][0] == 1.0);
    CHECK(problem.decision_set.kind() == DecisionSetKind::budget_orthant);
    CHECK(problem.decision_set.budget() == 1.0);
    // CARA values: U(0,0) = -1/alpha = -2
    CHECK(problem.utility.value(Vector::Zero(1), Vector::Zero(1)) ==
          doctest::Approx(-2.0));
    CHECK(problem.utility.grad_x(Vector::Zero(1), Vector::Zero(1))[0] ==
          doctest::Approx(1.0));
}

TEST_CASE("solved investment decision anticorrelates with the kernel") {
    InvestmentInstance instance;
    instance.n = 30;
    instance.pricing_kernel = make_pricing_kernel(30, 0.5, 21);
    const PenalizedProblem problem = make_investment_problem(instance, 1.0, 1e-3);
    OuterConfig outer;
    outer.step_size = 15.0;
    outer.max_outer_iterations = 3000;
    outer.outer_tolerance = 1e-7;
    ScalingConfig scaling;
    scaling.epsilon = problem.epsilon;
    scaling.tolerance = 1e-10;
    scaling.max_iterations = 200000;
    const auto report = solve_penalized(problem, initial_point(problem, outer),
                                        outer, scaling);
    CHECK(report.converged);

    std::vector<double> x(report.x_star.data(),
                          report.x_star.data() + report.x_star.size());
    std::vector<double> kernel(instance.pricing_kernel.data(),
                               instance.pricing_kernel.data() + 30);
    CHECK(testutil::spearman(x, kernel) < -0.5);

    // the budget binds at the optimum (utility strictly increasing)
    const double spent = problem.decision_set.weights().dot(report.x_star);
    CHECK(spent == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("healthcare shortage objective") {
    HealthcareInstance instance;
    instance.hospitals = 2;
    instance.max_demands = Vector::Constant(2, 1.0);
    instance.capacity = 3.0;
    instance.beta = 0.5;
    instance.demand_atoms = sample_demand_atoms(instance.max_demands, 5, 9);
    const PenalizedProblem problem = make_healthcare_problem(instance, 1.0, 1e-2);
    CHECK(problem.atoms() == 1);
    CHECK(problem.decision_dim == 2);
    CHECK(problem.decision_set.kind() == DecisionSetKind::coverage_simplex);

    SUBCASE("allocations above every demand have zero shortage") {
        const Vector x = Vector::Constant(2, 1.0);
        ScalingConfig scaling;
        scaling.epsilon = problem.epsilon;
        const Matrix cost = cost_matrix(problem, x);
        CHECK(cost.cwiseAbs().maxCoeff() == 0.0);
        const auto [value, plan] =
            inner_value(cost, problem.p, problem.nu0, 1.0, scaling);
        CHECK(std::abs(value) <= 1e-9);
    }

    SUBCASE("single hospital, zero allocation, point demand") {
        HealthcareInstance one;
        one.hospitals = 1;
        one.max_demands = Vector::Constant(1, 2.0);
        one.capacity = 2.0;
        one.beta = 0.0;
        one.demand_atoms = {Vector::Constant(1, 1.3)};
        const PenalizedProblem p1 = make_healthcare_problem(one, 1.0, 1e-2);
        const Vector x = Vector::Zero(1);
        CHECK(p1.utility.value(x, p1.y_values[0]) == doctest::Approx(-1.3));
    }

    SUBCASE("2x2 value matches the inner oracle") {
        HealthcareInstance two;
        two.hospitals = 1;
        two.max_demands = Vector::Constant(1, 1.0);
        two.capacity = 1.0;
        two.beta = 0.0;
        two.demand_atoms = {Vector::Constant(1, 0.2), Vector::Constant(1, 0.9)};
        const PenalizedProblem p2 = make_healthcare_problem(two, 0.7, 1e-4);
        // two decision atoms would need n=2; with one vector atom the cost
        // matrix is 1x2 and the oracle applies directly
        const Vector x = Vector::Constant(1, 0.4);
        const Matrix cost = cost_matrix(p2, x);
        ScalingConfig scaling;
        scaling.epsilon = 1e-4;
        scaling.tolerance = 1e-10;
        scaling.max_iterations = 4000000;
        const double solved =
            inner_value(cost, p2.p, p2.nu0, 0.7, scaling).first;
        const double oracle = oracle_inner(cost, p2.p, p2.nu0, 0.7, 64).first;
        CHECK(std::abs(solved - oracle) <= 1e-3);
    }
}

TEST_CASE("shortage utility is midpoint concave in the allocation") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    auto shortage = [](const Vector& x, const Vector& y) {
        return -(y - x).cwiseMax(0.0).sum();
    };
    for (int trial = 0; trial < 200; ++trial) {
        Vector a(3), b(3), y(3);
        for (int i = 0; i < 3; ++i) {
            a[i] = unif(rng);
            b[i] = unif(rng);
            y[i] = unif(rng);
        }
        const double mid = shortage(0.5 * (a + b), y);
        CHECK(mid >= 0.5 * shortage(a, y) + 0.5 * shortage(b, y) - 1e-12);
    }
}

TEST_CASE("counterexample family is flat at zero") {
    const auto results = verify_counterexample({1.0, 1.25, 1.5}, 1.0, 1.0);
    REQUIRE(results.size() == 3);
    for (const auto& [k, value] : results) {
        CAPTURE(k);
        CHECK(std::abs(value) <= 1e-9);
    }
    CHECK_THROWS_AS(verify_counterexample({0.5}, 1.0, 1.0), DomainError);
}

TEST_CASE("facility second stage") {
    FacilityInstance instance;
    instance.opening_costs = Vector::Constant(1, 1.0);
    instance.capacities = Vector::Constant(1, 10.0);
    instance.demands = Vector::Constant(1, 3.0);
    instance.service_costs = Matrix::Constant(1, 1, 2.5);
    instance.budget = 1.0;

    SUBCASE("single facility serves the single customer") {
        const auto [cost, z] = facility_second_stage(
            instance, Vector::Constant(1, 1.0), Vector::Constant(1, 0.5));
        CHECK(cost == doctest::Approx(2.5 * 3.0));
        CHECK(z(0, 0) == doctest::Approx(3.0));
    }

    SUBCASE("infeasible supply carries the deficit") {
        try {
            facility_second_stage(instance, Vector::Constant(1, 0.1),
                                  Vector::Constant(1, 0.5));
            FAIL("expected InfeasibleError");
        } catch (const InfeasibleError& e) {
            CHECK(e.deficit() == doctest::Approx(3.0 - 0.5));
        }
    }

    SUBCASE("cheaper facility saturates first") {
        FacilityInstance two;
        two.opening_costs = Vector::Constant(2, 1.0);
        two.capacities = Vector::Constant(2, 5.0);
        two.demands = Vector::Constant(1, 4.0);
        two.service_costs = Matrix(2, 1);
        two.service_costs << 1.0, 2.0;
        two.budget = 2.0;
        const auto [cost, z] = facility_second_stage(
            two, Vector::Ones(2), Vector::Ones(2));
        CHECK(cost == doctest::Approx(4.0));
        CHECK(z(0, 0) == doctest::Approx(4.0));
        CHECK(z(1, 0) == doctest::Approx(0.0));
    }
}

TEST_CASE("second stage matches the vertex enumeration oracle") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int F = 3, J = 4;
        FacilityInstance instance;
        instance.opening_costs = Vector::Constant(F, 1.0);
        instance.capacities = Vector::Constant(F, 0.0);
        instance.demands = Vector::Constant(J, 0.0);
        Vector x = Vector::Ones(F), y = Vector::Ones(F);
        for (int i = 0; i < F; ++i) {
            instance.capacities[i] = 2.0 + 2.0 * unif(rng);
            y[i] = 0.5 + 0.5 * unif(rng);
        }
        for (int j = 0; j < J; ++j) instance.demands[j] = unif(rng);
        instance.service_costs = Matrix(F, J);
        for (int i = 0; i < F; ++i)
            for (int j = 0; j < J; ++j) instance.service_costs(i, j) = unif(rng);
        instance.budget = 10.0;

        const auto [cost, z] = facility_second_stage(instance, x, y);

        // balanced form with the slack column for the oracle
        const Vector supply =
            instance.capacities.cwiseProduct(x).cwiseProduct(y);
        Vector demand(J + 1);
        demand.head(J) = instance.demands;
        demand[J] = supply.sum() - instance.demands.sum();
        Matrix oracle_cost(F, J + 1);
        oracle_cost.leftCols(J) = instance.service_costs;
        oracle_cost.col(J).setZero();
        const double oracle =
            testutil::transportation_vertex_minimum(supply, demand, oracle_cost);
        CHECK(cost == doctest::Approx(oracle).epsilon(1e-9));

        // the assignment is feasible and beats random feasible assignments
        for (int j = 0; j < J; ++j) {
            CHECK(z.col(j).sum() >= instance.demands[j] - 1e-9);
        }
        for (int i = 0; i < F; ++i) {
            CHECK(z.row(i).sum() <= supply[i] + 1e-9);
        }
        std::uniform_int_distribution<int> pick_fac(0, F - 1);
        for (int probe = 0; probe < 1000; ++probe) {
            // random feasible assignment: route each customer greedily
            Matrix candidate = Matrix::Zero(F, J);
            Vector remaining = supply;
            bool ok = true;
            for (int j = 0; j < J && ok; ++j) {
                double need = instance.demands[j];
                for (int attempt = 0; attempt < 8 && need > 1e-12; ++attempt) {
                    const int i = pick_fac(rng);
                    const double amount = std::min(need, remaining[i] * unif(rng));
                    candidate(i, j) += amount;
                    remaining[i] -= amount;
                    need -= amount;
                }
                // deterministic cleanup pass
                for (int i = 0; i < F && need > 1e-12; ++i) {
                    const double amount = std::min(need, remaining[i]);
                    candidate(i, j) += amount;
                    remaining[i] -= amount;
                    need -= amount;
                }
                ok = need <= 1e-12;
            }
            if (!ok) continue;
            const double candidate_cost =
                (candidate.array() * instance.service_costs.array()).sum();
            CHECK(cost <= candidate_cost + 1e-9);
        }
    }
}

TEST_CASE("facility total cost") {
    FacilityInstance instance;
    instance.opening_costs = Vector(2);
    instance.opening_costs << 1.0, 2.0;
    instance.capacities = Vector::Constant(2, 4.0);
    instance.demands = Vector::Constant(2, 1.0);
    instance.service_costs = Matrix(2, 2);
    instance.service_costs << 0.5, 1.5, 1.0, 0.25;
    instance.budget = 3.0;

    SUBCASE("zero decisions and zero demand cost nothing") {
        FacilityInstance empty = instance;
        empty.demands = Vector::Zero(2);
        CHECK(facility_total_cost(empty, Vector::Zero(2), Vector::Ones(2)) ==
              doctest::Approx(0.0));
    }

    SUBCASE("doubling opening costs adds f'x") {
        const Vector x = Vector::Constant(2, 0.8);
        const Vector y = Vector::Ones(2);
        const double base = facility_total_cost(instance, x, y);
        FacilityInstance doubled = instance;
        doubled.opening_costs *= 2.0;
        CHECK(facility_total_cost(doubled, x, y) ==
              doctest::Approx(base + instance.opening_costs.dot(x)));
    }

    SUBCASE("convex in x for fixed y") {
        std::mt19937_64 rng(66);
        std::uniform_real_distribution<double> unif(0.5, 1.0);
        const Vector y = Vector::Ones(2);
        for (int trial = 0; trial < 50; ++trial) {
            Vector a(2), b(2);
            for (int i = 0; i < 2; ++i) {
                a[i] = unif(rng);
                b[i] = unif(rng);
            }
            const double mid =
                facility_total_cost(instance, 0.5 * (a + b), y);
            const double avg = 0.5 * facility_total_cost(instance, a, y) +
                               0.5 * facility_total_cost(instance, b, y);
            CHECK(mid <= avg + 1e-9);
        }
    }
}
