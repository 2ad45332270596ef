#pragma once

#include <utility>

#include "rdro/divergence.hpp"

namespace rdro {

// Tuning of the Sinkhorn-type scaling loop.
struct ScalingConfig {
    double epsilon = 1e-2;      // entropic regularization
    int max_iterations = 10000; // hard cap on sweeps
    double tolerance = 1e-9;    // max log-change of b between sweeps
    ProxdivVariant proxdiv_variant = ProxdivVariant::standard;
};

struct ScalingReport {
    Matrix plan;            // gamma, n x r
    Vector scaling_a;       // plan = diag(a) * exp(-C/eps) * diag(b)
    Vector scaling_b;       // (may overflow to inf at extreme eps; see logs)
    Vector log_scaling_a;   // -inf on zero-mass atoms
    Vector log_scaling_b;
    Vector dual_f, dual_g;  // absorbed duals, reusable as a warm start
    int iterations_used = 0;
    double primal_value = 0.0;  // regularized objective at the plan
    double residual = 0.0;      // final stopping metric
};

// Optional warm start for scaling_solve: duals from a previous solve of a
// nearby instance. Initialization does not change the fixed point, only how
// fast the loop reaches it.
struct ScalingWarmStart {
    Vector dual_f, dual_g;
};

// Minimizes  sum_ij gamma_ij C_ij + i{pi_1 gamma = p} + D_F2(pi_2 gamma, nu0)
// + eps * H(gamma)  by alternating proxdiv updates on the scaling vectors
// (a, b) of the factorization gamma = diag(a) exp(-C/eps) diag(b).
//
// Rows of C are shifted by their minima before exponentiation (the shift is
// absorbed into a), and the duals are re-absorbed whenever a scaling vector
// leaves the safe floating-point range, so small eps does not underflow the
// kernel. Zero-mass atoms of p / nu0 are dropped for the solve and come back
// as zero rows/columns of the plan.
ScalingReport scaling_solve(const Matrix& cost, const DiscreteMeasure& p,
                            const DiscreteMeasure& nu0,
                            const DivergenceSpec& second_marginal_divergence,
                            const ScalingConfig& config,
                            const ScalingWarmStart* warm_start = nullptr);

// Regularized inner objective at a given coupling:
//   sum gamma.*C + i{pi_1 gamma = p} + D_F2(pi_2 gamma, nu0) + eps*H(gamma)
// where H(gamma) = sum gamma_ij (ln(gamma_ij/(p_i nu0_j)) - 1) + sum p_i nu0_j
// is the entropy relative to the product reference. The equality term is +inf
// when max_i |(pi_1 gamma)_i - p_i| exceeds kMarginalEqualityTol.
double regularized_objective(const Matrix& cost, const Matrix& gamma,
                             const DiscreteMeasure& p,
                             const DiscreteMeasure& nu0,
                             const DivergenceSpec& second_marginal_divergence,
                             double epsilon);

inline constexpr double kMarginalEqualityTol = 1e-6;

// Unregularized inner value f(x; theta, p, nu0): runs scaling_solve with a
// theta-scaled divergence on the second marginal and evaluates
// sum gamma.*C + theta * D_phi(pi_2 gamma, nu0) at the resulting plan.
std::pair<double, Matrix> inner_value(
    const Matrix& cost, const DiscreteMeasure& p, const DiscreteMeasure& nu0,
    double theta, const ScalingConfig& config,
    DivergenceKind kind = DivergenceKind::kl);

// Independent brute-force check for inner_value on desk-size instances
// (n <= 3, r <= 3). Each row i of the coupling is parameterized on the
// (r-1)-simplex scaled by p_i so the first marginal holds exactly; the joint
// grid is scanned exhaustively at `grid_resolution` points per dimension and
// the best cell is refined by shrinking per-row grids (the objective is
// convex in the free parameters, so the refinement is globally valid).
std::pair<double, Matrix> oracle_inner(
    const Matrix& cost, const DiscreteMeasure& p, const DiscreteMeasure& nu0,
    double theta, int grid_resolution,
    DivergenceKind kind = DivergenceKind::kl);

}  // namespace rdro
