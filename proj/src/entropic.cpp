#include "rdro/entropic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace rdro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Absorb the scalings into the duals when |ln u| or |ln v| passes this.
constexpr double kAbsorbLogRange = 100.0;

void check_inner_inputs(const Matrix& cost, const DiscreteMeasure& p,
                        const DiscreteMeasure& nu0) {
    if (cost.rows() != p.size() || cost.cols() != nu0.size()) {
        throw DimensionError("cost is " + std::to_string(cost.rows()) + "x" +
                             std::to_string(cost.cols()) + " but measures have " +
                             std::to_string(p.size()) + " / " +
                             std::to_string(nu0.size()) + " atoms");
    }
    for (Eigen::Index i = 0; i < cost.rows(); ++i) {
        for (Eigen::Index j = 0; j < cost.cols(); ++j) {
            if (!std::isfinite(cost(i, j))) {
                throw NumericError("cost entry (" + std::to_string(i) + "," +
                                   std::to_string(j) + ") is not finite");
            }
        }
    }
}

double log_sum_exp(const Vector& x) {
    const double m = x.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((x.array() - m).exp().sum());
}

// ln of the plan-coordinate marginal factor b for the second-marginal
// divergence, given ln of the unabsorbed kernel image t~ and ln(nu0).
//
// The standard forms are the exact block updates of the regularized problem
// whose entropy reference is the product p (x) nu0: the prox base measure is
// nu0 .* t~, e.g. for theta*KL the new marginal is nu0 .* t~^{eps/(theta+eps)}
// so the plan keeps nu = nu0 whenever the cost gives the adversary nothing to
// gain. The paper_factored variant is instead the literal transcription
// (nu0/s)^{lambda/(lambda+eps)} * e^{-eps/(lambda+eps)}, which corresponds to
// a counting-measure entropy; both reach the same plan as eps -> 0 and both
// are validated against the brute-force oracle.
void log_prox_factor(const DivergenceSpec& spec, const Vector& log_t,
                     const Vector& log_ref, double eps, ProxdivVariant variant,
                     Vector& out) {
    const Eigen::Index r = log_t.size();
    switch (spec.kind) {
        case DivergenceKind::equality_indicator:
            out = log_ref - log_t;
            break;
        case DivergenceKind::kl: {
            const double expo = spec.scale / (spec.scale + eps);
            if (variant == ProxdivVariant::paper_factored) {
                out = expo * (log_ref - log_t);
                out.array() -= eps / (spec.scale + eps);
            } else {
                out = log_ref - expo * log_t;
            }
            break;
        }
        case DivergenceKind::total_variation: {
            const double band = spec.scale / eps;
            out = log_ref - log_t.cwiseMin(band).cwiseMax(-band);
            break;
        }
        case DivergenceKind::chi_squared: {
            for (Eigen::Index j = 0; j < r; ++j) {
                // root of 2*scale*(e^z/ref - 1) + eps*(z - ln(ref) - log_t)
                auto h = [&](double z) {
                    return 2.0 * spec.scale * (std::exp(z - log_ref[j]) - 1.0) +
                           eps * (z - log_ref[j] - log_t[j]);
                };
                double lo = std::min(log_t[j] + log_ref[j], log_ref[j]) - 60.0;
                double hi = std::max(log_t[j] + log_ref[j], log_ref[j]) + 60.0;
                for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (h(mid) > 0.0 ? hi : lo) = mid;
                }
                out[j] = 0.5 * (lo + hi) - log_t[j];
            }
            break;
        }
    }
}

struct ScalingWorkspace {
    Matrix log_kernel;  // (f_i + g_j - C_ij) / eps
    Matrix kernel;      // exp(log_kernel)
    Vector f, g;        // absorbed duals
    Vector u, v;        // residual scalings

    void rebuild_kernel(const Matrix& cost, double eps) {
        log_kernel = ((-cost).colwise() + f).rowwise() + g.transpose();
        log_kernel /= eps;
        kernel = log_kernel.array().exp();
    }
};

}  // namespace

ScalingReport scaling_solve(const Matrix& cost, const DiscreteMeasure& p,
                            const DiscreteMeasure& nu0,
                            const DivergenceSpec& second_marginal_divergence,
                            const ScalingConfig& config,
                            const ScalingWarmStart* warm_start) {
    check_inner_inputs(cost, p, nu0);
    second_marginal_divergence.validate();
    if (!(config.epsilon > 0.0)) throw DomainError("epsilon must be > 0");
    if (!(config.tolerance > 0.0)) throw DomainError("tolerance must be > 0");
    if (config.max_iterations < 1) throw DomainError("max_iterations must be >= 1");

    // Zero-mass atoms carry no coupling mass at any optimum: solve the
    // positive submatrix and reinstate zero rows/columns afterwards.
    std::vector<Eigen::Index> rows, cols;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p.weights()[i] > 0.0) rows.push_back(i);
    for (Eigen::Index j = 0; j < nu0.size(); ++j)
        if (nu0.weights()[j] > 0.0) cols.push_back(j);
    if (rows.empty()) throw DomainError("first marginal has no mass");
    if (cols.empty()) throw DomainError("nu0 has no mass");

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index r = static_cast<Eigen::Index>(cols.size());
    Matrix C(n, r);
    Vector pw(n), nw(r);
    for (Eigen::Index a = 0; a < n; ++a) {
        pw[a] = p.weights()[rows[a]];
        for (Eigen::Index b = 0; b < r; ++b) C(a, b) = cost(rows[a], cols[b]);
    }
    for (Eigen::Index b = 0; b < r; ++b) nw[b] = nu0.weights()[cols[b]];
    const Vector log_p = pw.array().log();
    const Vector log_nu = nw.array().log();
    const double eps = config.epsilon;

    ScalingWorkspace w;
    w.u = Vector::Ones(n);
    w.v = Vector::Ones(r);
    auto cold_init = [&] {
        w.f = C.rowwise().minCoeff();  // row shift, absorbed into a
        w.g = Vector::Zero(r);
        w.rebuild_kernel(C, eps);
    };
    cold_init();
    if (warm_start && warm_start->dual_f.size() == p.size() &&
        warm_start->dual_g.size() == nu0.size() &&
        warm_start->dual_f.allFinite() && warm_start->dual_g.allFinite()) {
        Vector wf(n), wg(r);
        for (Eigen::Index a = 0; a < n; ++a) wf[a] = warm_start->dual_f[rows[a]];
        for (Eigen::Index b = 0; b < r; ++b) wg[b] = warm_start->dual_g[cols[b]];
        // keep the kernel exponents capped at zero rowwise
        const Vector excess =
            (((-C).colwise() + wf).rowwise() + wg.transpose()).rowwise().maxCoeff();
        w.f = wf - excess.cwiseMax(0.0);
        w.g = wg;
        w.rebuild_kernel(C, eps);
        if (!((w.kernel.array() > 0.0).rowwise().any()).all()) cold_init();
    }
    for (Eigen::Index a = 0; a < n; ++a) {
        if (!(w.kernel.row(a).maxCoeff() > 0.0)) {
            throw NumericError("kernel row " + std::to_string(rows[a]) +
                               " underflowed to zero; epsilon too small");
        }
    }

    Vector log_b_prev = w.g / eps;  // ln of effective b = g/eps + ln v
    double residual = kInf;
    int used = 0;

    // Preallocated sweep buffers; the linear path must not allocate.
    Vector s(n), t(r), log_t(r), log_t_plan(r), log_b(r), log_v_new(r);
    Vector g_over_eps = w.g / eps;
    Vector scratch_n(n), scratch_r(r);

    auto absorb = [&](const Vector& log_u_now, const Vector& log_v_now) {
        w.f += eps * log_u_now;
        w.g += eps * log_v_now;
        w.u.setOnes();
        w.v.setOnes();
        w.rebuild_kernel(C, eps);
        g_over_eps = w.g / eps;
    };

    for (int l = 1; l <= config.max_iterations; ++l) {
        used = l;
        bool need_log_path = false;

        s.noalias() = w.kernel * w.v;
        if (!(s.minCoeff() > 0.0) || !s.allFinite()) need_log_path = true;

        if (!need_log_path) {
            w.u = pw.cwiseQuotient(s);
            if (!(w.u.maxCoeff() < 1e280)) need_log_path = true;
        }
        if (!need_log_path) {
            t.noalias() = w.kernel.transpose() * w.u;
            if (!(t.minCoeff() > 0.0) || !t.allFinite()) need_log_path = true;
        }

        if (need_log_path) {
            // Resolve the whole sweep in log space against the current v.
            scratch_r = w.v.array().log();
            for (Eigen::Index a = 0; a < n; ++a) {
                scratch_n[a] = log_sum_exp(w.log_kernel.row(a).transpose() +
                                           scratch_r);
            }
            // absorb u immediately; it may be far outside double range
            w.f += eps * (log_p - scratch_n);
            w.u.setOnes();
            w.rebuild_kernel(C, eps);
            for (Eigen::Index b = 0; b < r; ++b) {
                log_t[b] = log_sum_exp(w.log_kernel.col(b));
            }
        } else {
            log_t = t.array().log();
        }

        // second-marginal update in plan coordinates: ln t~ = ln t - g/eps
        log_t_plan = log_t - g_over_eps;
        log_prox_factor(second_marginal_divergence, log_t_plan, log_nu, eps,
                        config.proxdiv_variant, log_b);
        log_v_new = log_b - g_over_eps;
        w.v = log_v_new.array().exp();

        residual = (log_b - log_b_prev).cwiseAbs().maxCoeff();
        std::swap(log_b_prev, log_b);

        const double umax = w.u.maxCoeff();
        const double umin = w.u.minCoeff();
        const double vband =
            std::max(log_v_new.maxCoeff(), -log_v_new.minCoeff());
        if (std::max(std::log(umax), -std::log(umin)) > kAbsorbLogRange ||
            vband > kAbsorbLogRange || !w.v.allFinite() ||
            !(w.v.minCoeff() > 0.0)) {
            scratch_n = w.u.array().log();
            absorb(scratch_n, log_v_new);
        }

        if (residual < config.tolerance) break;
    }

    // Final absorption so the plan is exp((f_i + g_j - C_ij)/eps) exactly.
    scratch_n = w.u.array().log();
    scratch_r = w.v.array().log();
    absorb(scratch_n, scratch_r);

    ScalingReport rep;
    rep.plan = Matrix::Zero(p.size(), nu0.size());
    rep.log_scaling_a = Vector::Constant(p.size(), -kInf);
    rep.log_scaling_b = Vector::Constant(nu0.size(), -kInf);
    rep.dual_f = Vector::Zero(p.size());
    rep.dual_g = Vector::Zero(nu0.size());
    for (Eigen::Index a = 0; a < n; ++a) {
        rep.log_scaling_a[rows[a]] = w.f[a] / eps;
        rep.dual_f[rows[a]] = w.f[a];
        for (Eigen::Index b = 0; b < r; ++b)
            rep.plan(rows[a], cols[b]) = w.kernel(a, b);
    }
    for (Eigen::Index b = 0; b < r; ++b) {
        rep.log_scaling_b[cols[b]] = w.g[b] / eps;
        rep.dual_g[cols[b]] = w.g[b];
    }
    rep.scaling_a = rep.log_scaling_a.array().exp();
    rep.scaling_b = rep.log_scaling_b.array().exp();
    rep.iterations_used = used;
    rep.residual = residual;
    rep.primal_value = regularized_objective(cost, rep.plan, p, nu0,
                                             second_marginal_divergence, eps);
    return rep;
}

double regularized_objective(const Matrix& cost, const Matrix& gamma,
                             const DiscreteMeasure& p,
                             const DiscreteMeasure& nu0,
                             const DivergenceSpec& second_marginal_divergence,
                             double epsilon) {
    check_inner_inputs(cost, p, nu0);
    if (gamma.rows() != cost.rows() || gamma.cols() != cost.cols()) {
        throw DimensionError("coupling and cost have different shapes");
    }
    if (!(gamma.array() >= 0.0).all()) {
        throw DomainError("coupling has negative entries");
    }
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");

    auto [row_marginal, col_marginal] = marginals(gamma);
    const double feas =
        (row_marginal.weights() - p.weights()).array().abs().maxCoeff();
    if (feas > kMarginalEqualityTol) return kInf;

    double value = (gamma.array() * cost.array()).sum();
    value += eval_divergence(second_marginal_divergence, col_marginal, nu0);
    if (value == kInf || epsilon == 0.0) return value;

    // H(gamma) = KL of the plan against the product reference p (x) nu0.
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
        for (Eigen::Index j = 0; j < gamma.cols(); ++j) {
            const double gij = gamma(i, j);
            if (gij == 0.0) continue;
            const double ref = p.weights()[i] * nu0.weights()[j];
            if (ref == 0.0) return kInf;  // mass outside the reference support
            entropy += gij * (std::log(gij / ref) - 1.0);
        }
    }
    entropy += p.total_mass() * nu0.total_mass();
    return value + epsilon * entropy;
}

std::pair<double, Matrix> inner_value(const Matrix& cost,
                                      const DiscreteMeasure& p,
                                      const DiscreteMeasure& nu0, double theta,
                                      const ScalingConfig& config,
                                      DivergenceKind kind) {
    const DivergenceSpec penalty = DivergenceSpec::make(kind, theta);
    ScalingReport rep = scaling_solve(cost, p, nu0, penalty, config);
    const double value =
        (rep.plan.array() * cost.array()).sum() +
        eval_divergence(penalty, marginals(rep.plan).second, nu0);
    return {value, std::move(rep.plan)};
}

namespace {

// All compositions of G into r nonnegative parts, as conditional weights.
std::vector<Vector> simplex_grid(Eigen::Index r, int G) {
    std::vector<Vector> pts;
    if (r == 1) {
        pts.push_back(Vector::Ones(1));
        return pts;
    }
    if (r == 2) {
        for (int k = 0; k <= G; ++k) {
            Vector c(2);
            c << static_cast<double>(k) / G, static_cast<double>(G - k) / G;
            pts.push_back(c);
        }
        return pts;
    }
    for (int k1 = 0; k1 <= G; ++k1) {
        for (int k2 = 0; k2 + k1 <= G; ++k2) {
            Vector c(3);
            c << static_cast<double>(k1) / G, static_cast<double>(k2) / G,
                static_cast<double>(G - k1 - k2) / G;
            pts.push_back(c);
        }
    }
    return pts;
}

}  // namespace

std::pair<double, Matrix> oracle_inner(const Matrix& cost,
                                       const DiscreteMeasure& p,
                                       const DiscreteMeasure& nu0, double theta,
                                       int grid_resolution,
                                       DivergenceKind kind) {
    check_inner_inputs(cost, p, nu0);
    const Eigen::Index n = cost.rows();
    const Eigen::Index r = cost.cols();
    if (n > 3 || r > 3) {
        throw CapacityError("oracle_inner handles at most 3x3 instances");
    }
    if (grid_resolution < 1) throw DomainError("grid_resolution must be >= 1");
    const DivergenceSpec penalty = DivergenceSpec::make(kind, theta);

    // Unregularized objective in the row-conditional parameterization; the
    // first marginal equals p by construction.
    const double recession = penalty.recession();
    auto objective = [&](const std::vector<Vector>& cond) {
        double value = 0.0;
        Vector col = Vector::Zero(r);
        for (Eigen::Index i = 0; i < n; ++i) {
            value += p.weights()[i] * cond[i].dot(cost.row(i).transpose());
            col += p.weights()[i] * cond[i];
        }
        if (penalty.scale > 0.0) {
            double div = 0.0;
            for (Eigen::Index j = 0; j < r; ++j) {
                const double nj = nu0.weights()[j];
                if (nj > 0.0) {
                    div += penalty.phi(col[j] / nj) * nj;
                } else if (col[j] > 0.0) {
                    div += recession * col[j];
                }
                if (div == kInf) return kInf;
            }
            value += penalty.scale * div;
        }
        return value;
    };

    // Exhaustive joint scan, capped so the combination count stays sane.
    int G = grid_resolution;
    auto combos = [&](int g) {
        double c = 1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            c *= r == 2 ? g + 1.0 : (r == 1 ? 1.0 : (g + 1.0) * (g + 2.0) / 2.0);
        }
        return c;
    };
    while (G > 4 && combos(G) > 4e6) --G;
    const std::vector<Vector> grid = simplex_grid(r, G);

    std::vector<Vector> best(n, grid.front()), cur(n, grid.front());
    double best_value = kInf;
    std::vector<size_t> idx(n, 0);
    while (true) {
        for (Eigen::Index i = 0; i < n; ++i) cur[i] = grid[idx[i]];
        const double value = objective(cur);
        if (value < best_value) {
            best_value = value;
            best = cur;
        }
        Eigen::Index pos = 0;
        while (pos < n && ++idx[pos] == grid.size()) idx[pos++] = 0;
        if (pos == n) break;
    }

    // Shrinking per-row local grids around the incumbent. The objective is
    // convex in the stacked conditionals, so this refines to the global
    // minimum.
    const int local = std::max(grid_resolution, 24);
    double width = 2.0 / std::max(G, 1);
    while (width > 1e-13) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::vector<Vector> locals = simplex_grid(r, local);
            Vector center = best[i];
            for (const Vector& raw : locals) {
                // map the unit simplex onto a box of half-width `width`
                // around the incumbent, then renormalize onto the simplex
                Vector cand =
                    (center.array() + width * (2.0 * raw.array() - 1.0))
                        .cwiseMax(0.0);
                const double total = cand.sum();
                if (total <= 0.0) continue;
                cand /= total;
                std::vector<Vector>& probe = cur;
                probe = best;
                probe[i] = cand;
                const double value = objective(probe);
                if (value < best_value) {
                    best_value = value;
                    best = probe;
                }
            }
        }
        width *= 0.35;
    }

    Matrix plan(n, r);
    for (Eigen::Index i = 0; i < n; ++i)
        plan.row(i) = p.weights()[i] * best[i].transpose();
    return {best_value, plan};
}

}  // namespace rdro
