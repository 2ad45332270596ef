#include "rdro/projection.hpp"

#include <cmath>

namespace rdro {

namespace {
constexpr double kBisectTol = 1e-12;  // on the constraint residual
constexpr int kBisectMaxIter = 200;
}

std::string to_string(DecisionSetKind kind) {
    switch (kind) {
        case DecisionSetKind::budget_orthant: return "budget_orthant";
        case DecisionSetKind::box_budget: return "box_budget";
        case DecisionSetKind::coverage_simplex: return "coverage_simplex";
    }
    return "?";
}

DecisionSet::DecisionSet(DecisionSetKind kind, Vector weights, double budget,
                         std::optional<Vector> upper,
                         std::optional<double> min_total)
    : kind_(kind), weights_(std::move(weights)), budget_(budget),
      upper_(std::move(upper)), min_total_(min_total) {
    if (weights_.size() == 0) throw ConfigError("decision set has dimension 0");
    if (!(weights_.minCoeff() > 0.0)) {
        throw ConfigError("decision set weights must be strictly positive");
    }
    if (!(budget_ >= 0.0)) throw ConfigError("budget must be >= 0");
    if (upper_) {
        if (upper_->size() != weights_.size()) {
            throw DimensionError("upper bounds and weights differ in length");
        }
        if (!(upper_->minCoeff() >= 0.0)) {
            throw ConfigError("upper bounds must be >= 0");
        }
    }
    if (min_total_) {
        // attainable weighted total under the box and budget
        double attainable = budget_;
        if (upper_) attainable = std::min(attainable, weights_.dot(*upper_));
        if (*min_total_ > attainable + 1e-12) {
            throw ConfigError("coverage bound exceeds attainable total; set empty");
        }
    }
}

DecisionSet DecisionSet::budget_orthant(Vector weights, double budget) {
    return DecisionSet(DecisionSetKind::budget_orthant, std::move(weights),
                       budget, std::nullopt, std::nullopt);
}

DecisionSet DecisionSet::box_budget(Vector upper, double capacity) {
    Vector ones = Vector::Ones(upper.size());
    return DecisionSet(DecisionSetKind::box_budget, std::move(ones), capacity,
                       std::move(upper), std::nullopt);
}

DecisionSet DecisionSet::coverage_simplex(Vector upper, double capacity,
                                          double beta) {
    if (beta < 0.0 || beta > 1.0) throw ConfigError("beta must be in [0,1]");
    Vector ones = Vector::Ones(upper.size());
    return DecisionSet(DecisionSetKind::coverage_simplex, std::move(ones),
                       capacity, std::move(upper), beta * capacity);
}

DecisionSet DecisionSet::weighted_box_budget(Vector upper, Vector weights,
                                             double budget) {
    return DecisionSet(DecisionSetKind::box_budget, std::move(weights), budget,
                       std::move(upper), std::nullopt);
}

void DecisionSet::check_dimension(const Vector& x) const {
    if (x.size() != weights_.size()) {
        throw DimensionError("point has dimension " + std::to_string(x.size()) +
                             ", set expects " + std::to_string(weights_.size()));
    }
}

Vector DecisionSet::clamp(const Vector& y) const {
    Vector out = y.cwiseMax(0.0);
    if (upper_) out = out.cwiseMin(*upper_);
    return out;
}

Vector DecisionSet::project(const Vector& x) const {
    check_dimension(x);
    if (!x.allFinite()) throw DomainError("cannot project a non-finite point");
    if (budget_ == 0.0) return Vector::Zero(x.size());

    // Normalize the weight scale so the multiplier search is well conditioned.
    const double wscale = weights_.array().abs().maxCoeff();
    const Vector w = weights_ / wscale;
    const double cap = budget_ / wscale;

    // KKT: the projection is clamp(x - t*w) for the smallest t >= 0 with
    // w' clamp(x - t*w) <= cap; t = 0 when the clamped point already fits.
    // The bisection slack keeps re-projection of a face point exact.
    auto weighted_total = [&](double t) { return w.dot(clamp(x - t * w)); };

    if (weighted_total(0.0) > cap + kBisectTol) {
        double lo = 0.0;
        double hi = (x.cwiseMax(0.0).array() / w.array()).maxCoeff() + 1.0;
        double t = hi;
        for (int it = 0; it < kBisectMaxIter; ++it) {
            t = 0.5 * (lo + hi);
            const double total = weighted_total(t);
            if (std::abs(total - cap) < kBisectTol) break;
            (total > cap ? lo : hi) = t;
        }
        return clamp(x - t * w);
    }
    if (min_total_ && weighted_total(0.0) < *min_total_ / wscale - kBisectTol) {
        // lower bound active: push along +w instead
        const double target = *min_total_ / wscale;
        auto total_up = [&](double s) { return w.dot(clamp(x + s * w)); };
        double lo = 0.0;
        double hi = 1.0;
        while (total_up(hi) < target && hi < 1e12) hi *= 2.0;
        double t = hi;
        for (int it = 0; it < kBisectMaxIter; ++it) {
            t = 0.5 * (lo + hi);
            const double total = total_up(t);
            if (std::abs(total - target) < kBisectTol) break;
            (total < target ? lo : hi) = t;
        }
        return clamp(x + t * w);
    }
    return clamp(x);
}

double DecisionSet::feasibility_residual(const Vector& x) const {
    check_dimension(x);
    double violation = std::max(0.0, -x.minCoeff());
    if (upper_) violation = std::max(violation, (x - *upper_).maxCoeff());
    const double total = weights_.dot(x);
    violation = std::max(violation, total - budget_);
    if (min_total_) violation = std::max(violation, *min_total_ - total);
    return std::max(violation, 0.0);
}

}  // namespace rdro
