#pragma once

#include <optional>
#include <string>

#include "rdro/measure.hpp"

namespace rdro {

enum class DecisionSetKind { budget_orthant, box_budget, coverage_simplex };

std::string to_string(DecisionSetKind kind);

// A feasible decision set of the form
//   { x : lower <= x <= upper (when bounded),  w' x <= budget,
//         w' x >= min_weighted_total (when present) }
// which covers the three named families:
//   budget_orthant  : x >= 0, sum_i w_i x_i <= budget          (w > 0)
//   box_budget      : 0 <= x_i <= u_i, sum_i x_i <= capacity
//   coverage_simplex: box_budget plus sum_i x_i >= beta*capacity
// Euclidean projection is computed by bisection on the budget constraint's
// Lagrange multiplier; per-coordinate bounds are handled by clamping.
class DecisionSet {
public:
    // Placeholder unit orthant; real problems replace it via the factories.
    DecisionSet()
        : DecisionSet(DecisionSetKind::budget_orthant, Vector::Ones(1), 1.0,
                      std::nullopt, std::nullopt) {}

    static DecisionSet budget_orthant(Vector weights, double budget);
    static DecisionSet box_budget(Vector upper, double capacity);
    static DecisionSet coverage_simplex(Vector upper, double capacity,
                                        double beta);
    // Weighted box budget {x in [0, upper], w'x <= budget}; used by the
    // facility application, reported under the box_budget kind.
    static DecisionSet weighted_box_budget(Vector upper, Vector weights,
                                           double budget);

    DecisionSetKind kind() const { return kind_; }
    Eigen::Index dimension() const { return weights_.size(); }
    const Vector& weights() const { return weights_; }
    double budget() const { return budget_; }
    const std::optional<Vector>& upper() const { return upper_; }
    std::optional<double> min_weighted_total() const { return min_total_; }

    // Euclidean-nearest feasible point; idempotent.
    Vector project(const Vector& x) const;
    // 0 iff feasible, otherwise the maximum constraint violation.
    double feasibility_residual(const Vector& x) const;

private:
    DecisionSet(DecisionSetKind kind, Vector weights, double budget,
                std::optional<Vector> upper, std::optional<double> min_total);
    void check_dimension(const Vector& x) const;
    Vector clamp(const Vector& y) const;

    DecisionSetKind kind_;
    Vector weights_;
    double budget_;
    std::optional<Vector> upper_;
    std::optional<double> min_total_;
};

// Spec'd operation aliases.
inline Vector project(const DecisionSet& set, const Vector& x) {
    return set.project(x);
}
inline double feasibility_residual(const DecisionSet& set, const Vector& x) {
    return set.feasibility_residual(x);
}

}  // namespace rdro
