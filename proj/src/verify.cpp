#include "rdro/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rdro/applications.hpp"
#include "rdro/config.hpp"
#include "rdro/entropic.hpp"

namespace rdro {

Vector grid_projection_oracle(const DecisionSet& set, const Vector& x,
                              double step) {
    if (set.dimension() != 2) {
        throw CapacityError("grid projection oracle is 2-D only");
    }
    double hi0 = set.budget() / set.weights()[0];
    double hi1 = set.budget() / set.weights()[1];
    if (set.upper()) {
        hi0 = std::min(hi0, (*set.upper())[0]);
        hi1 = std::min(hi1, (*set.upper())[1]);
    }
    Vector best(2);
    double best_dist = std::numeric_limits<double>::infinity();
    const int n0 = static_cast<int>(hi0 / step) + 1;
    const int n1 = static_cast<int>(hi1 / step) + 1;
    Vector cand(2);
    for (int i = 0; i <= n0; ++i) {
        cand[0] = std::min(i * step, hi0);
        for (int j = 0; j <= n1; ++j) {
            cand[1] = std::min(j * step, hi1);
            if (set.feasibility_residual(cand) > 1e-12) continue;
            const double d = (cand - x).squaredNorm();
            if (d < best_dist) {
                best_dist = d;
                best = cand;
            }
        }
    }
    return best;
}

namespace {

std::vector<VerifyCheck> inner_oracle_suite() {
    std::mt19937_64 rng(7101);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ScalingConfig scaling;
    scaling.epsilon = 1e-4;
    scaling.tolerance = 1e-10;
    scaling.max_iterations = 4000000;

    double worst = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        Matrix cost(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) cost(i, j) = 2.0 * unif(rng) - 1.0;
        const double p1 = 0.2 + 0.6 * unif(rng);
        const double q1 = 0.2 + 0.6 * unif(rng);
        Vector p(2), q(2);
        p << p1, 1.0 - p1;
        q << q1, 1.0 - q1;
        const auto pm = DiscreteMeasure::probability(p);
        const auto qm = DiscreteMeasure::probability(q);
        for (double theta : {0.1, 1.0, 10.0}) {
            const double solved =
                inner_value(cost, pm, qm, theta, scaling).first;
            const double oracle = oracle_inner(cost, pm, qm, theta, 64).first;
            worst = std::max(worst, std::abs(solved - oracle));
        }
    }
    return {{"inner value vs grid oracle, 20 random 2x2, theta in {0.1,1,10}",
             worst <= 1e-3, worst, 1e-3}};
}

std::vector<VerifyCheck> projection_suite() {
    std::mt19937_64 rng(7102);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst_oracle = 0.0;
    double worst_idem = 0.0;
    double worst_expand = 0.0;
    for (int instance = 0; instance < 100; ++instance) {
        Vector w(2), u(2);
        w << 0.5 + unif(rng), 0.5 + unif(rng);
        u << 0.3 + unif(rng), 0.3 + unif(rng);
        DecisionSet set = instance % 2 == 0
            ? DecisionSet::budget_orthant(w, 0.5 + unif(rng))
            : DecisionSet::box_budget(u, 0.4 + unif(rng));
        Vector x(2), z(2);
        x << 3.0 * unif(rng) - 1.0, 3.0 * unif(rng) - 1.0;
        z << 3.0 * unif(rng) - 1.0, 3.0 * unif(rng) - 1.0;
        const Vector px = set.project(x);
        const Vector pz = set.project(z);
        worst_oracle = std::max(
            worst_oracle,
            (px - grid_projection_oracle(set, x, 1e-3)).array().abs().maxCoeff());
        worst_idem = std::max(
            worst_idem, (set.project(px) - px).array().abs().maxCoeff());
        worst_expand = std::max(
            worst_expand, (px - pz).norm() - (x - z).norm());
    }
    return {{"projection vs dense grid oracle, 100 random 2-D sets",
             worst_oracle <= 2e-3, worst_oracle, 2e-3},
            {"projection idempotence", worst_idem <= 1e-10, worst_idem, 1e-10},
            {"projection non-expansiveness", worst_expand <= 1e-10,
             worst_expand, 1e-10}};
}

std::vector<VerifyCheck> counterexample_suite() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(1.0 + 0.05 * i);
    double worst = 0.0;
    for (const auto& [k, value] : verify_counterexample(grid, 1.0, 1.0)) {
        (void)k;
        worst = std::max(worst, std::abs(value));
    }
    return {{"counterexample worst-case value == 0 on k in [1,1.5]",
             worst <= 1e-9, worst, 1e-9}};
}

std::vector<VerifyCheck> duality_suite() {
    // Reduced instance keeps the suite quick; thresholds match the full one.
    RunConfig config = parse_config(preset_config_json("investment73"));
    config.instance["n"] = 16;
    config.solver.theta = std::nullopt;
    config.solver.theta_grid = std::vector<double>{0.5, 1.0, 2.0, 4.0};
    SweepOutcome sweep = run_sweep(config, 0);

    double worst_identity = 0.0;
    double worst_cross = 0.0;
    const auto& pts = sweep.points;
    for (const SweepPoint& a : pts) {
        // bit-exact by construction: J^c is stored as J^p - theta*eta
        worst_identity = std::max(
            worst_identity,
            std::abs(a.value_constrained - (a.value_penalized - a.theta * a.eta)));
        for (const SweepPoint& b : pts) {
            if (&a == &b) continue;
            // J^p(theta_a) <= J^c(eta_b) + theta_a * eta_b
            const double slack =
                a.value_penalized - (b.value_constrained + a.theta * b.eta);
            worst_cross = std::max(worst_cross, slack);
        }
    }
    return {{"duality identity J^c + theta*eta == J^p", worst_identity == 0.0,
             worst_identity, 0.0},
            {"cross-point inequality J^p(t) <= J^c(e') + t*e'",
             worst_cross <= 1e-3, worst_cross, 1e-3}};
}

}  // namespace

std::vector<std::string> verify_suite_names() {
    return {"inner-oracle", "projection", "counterexample", "duality"};
}

std::vector<VerifyCheck> run_verify_suite(const std::string& suite) {
    if (suite == "inner-oracle") return inner_oracle_suite();
    if (suite == "projection") return projection_suite();
    if (suite == "counterexample") return counterexample_suite();
    if (suite == "duality") return duality_suite();
    std::string names;
    for (const std::string& name : verify_suite_names()) {
        names += (names.empty() ? "" : ", ") + name;
    }
    throw ConfigError("unknown verify suite '" + suite + "'; available: " + names);
}

}  // namespace rdro
