#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "rdro/errors.hpp"

namespace rdro {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A finite nonnegative measure on labelled atoms. Holds the decision
// distribution p, the nominal/true environment distributions, and coupling
// marginals. Labels are optional atom values (scalars or small vectors).
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;

    // General nonnegative mass vector.
    static DiscreteMeasure masses(Vector weights,
                                  std::vector<Vector> labels = {});
    // Probability vector; weights must sum to 1 within 1e-12.
    static DiscreteMeasure probability(Vector weights,
                                       std::vector<Vector> labels = {});
    // Uniform probability on n atoms.
    static DiscreteMeasure uniform(Eigen::Index n);

    const Vector& weights() const { return weights_; }
    const std::vector<Vector>& labels() const { return labels_; }
    bool is_probability() const { return probability_; }

    Eigen::Index size() const { return weights_.size(); }
    double total_mass() const { return weights_.sum(); }

private:
    DiscreteMeasure(Vector w, std::vector<Vector> labels, bool probability);

    Vector weights_;
    std::vector<Vector> labels_;
    bool probability_ = false;
};

// Row sums and column sums of a nonnegative coupling matrix.
std::pair<DiscreteMeasure, DiscreteMeasure> marginals(const Matrix& gamma);

}  // namespace rdro
