#pragma once

#include <string>
#include <vector>

#include "rdro/projection.hpp"

namespace rdro {

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // observed deviation
    double threshold = 0.0;  // allowed deviation
};

// Built-in oracle suites runnable from the CLI:
//   inner-oracle   scaling solve vs. brute-force grid oracle on 2x2 instances
//   projection     projections vs. dense 2-D grid search + contraction checks
//   counterexample the flat-optimum healthcare family (all values 0)
//   duality        penalized/constrained cross-point inequalities on a sweep
std::vector<std::string> verify_suite_names();
std::vector<VerifyCheck> run_verify_suite(const std::string& suite);

// Dense grid search for the Euclidean projection, used by the projection
// suite and the acceptance tests. Exhaustive over feasible grid points with
// the given step; exact up to the grid resolution.
Vector grid_projection_oracle(const DecisionSet& set, const Vector& x,
                              double step);

}  // namespace rdro
