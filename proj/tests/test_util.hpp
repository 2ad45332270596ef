#pragma once

// Shared helpers for the test suites: independent reference implementations
// (balanced log-domain Sinkhorn, transportation-polytope vertex enumeration,
// a fixed-distribution projected-gradient solver) and small statistics
// utilities. These stay independent of the solver paths they are used to
// check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "rdro/measure.hpp"
#include "rdro/projection.hpp"

namespace testutil {

using rdro::Matrix;
using rdro::Vector;

inline double log_sum_exp(const Vector& x) {
    const double m = x.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((x.array() - m).exp().sum());
}

// Balanced entropic transport between probability vectors p and q:
//   min <gamma, C> + eps * sum gamma (ln gamma - 1)
//   s.t. both marginals exact.
// Log-domain potential iteration, independent of the scaling loop under test.
inline Matrix balanced_sinkhorn_reference(const Matrix& cost, const Vector& p,
                                          const Vector& q, double eps,
                                          int max_iter = 50000,
                                          double tol = 1e-14) {
    const Eigen::Index n = cost.rows();
    const Eigen::Index r = cost.cols();
    Vector f = Vector::Zero(n), g = Vector::Zero(r);
    const Vector log_p = p.array().log();
    const Vector log_q = q.array().log();
    for (int it = 0; it < max_iter; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) {
            f[i] = eps * (log_p[i] -
                          log_sum_exp(((g - cost.row(i).transpose()) / eps)));
        }
        double change = 0.0;
        for (Eigen::Index j = 0; j < r; ++j) {
            const double next =
                eps * (log_q[j] - log_sum_exp(((f - cost.col(j)) / eps)));
            change = std::max(change, std::abs(next - g[j]));
            g[j] = next;
        }
        if (change < tol) break;
    }
    Matrix plan(n, r);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < r; ++j) {
            plan(i, j) = std::exp((f[i] + g[j] - cost(i, j)) / eps);
        }
    }
    return plan;
}

// Exact minimum of <gamma, C> over the balanced transportation polytope by
// enumerating basic feasible solutions (spanning-forest bases).
inline double transportation_vertex_minimum(const Vector& supply,
                                            const Vector& demand,
                                            const Matrix& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    const int cells = m * n;
    const int basis_size = m + n - 1;
    double best = std::numeric_limits<double>::infinity();

    std::vector<int> pick(basis_size);
    std::iota(pick.begin(), pick.end(), 0);
    auto advance = [&]() {
        int i = basis_size - 1;
        while (i >= 0 && pick[i] == cells - basis_size + i) --i;
        if (i < 0) return false;
        ++pick[i];
        for (int k = i + 1; k < basis_size; ++k) pick[k] = pick[k - 1] + 1;
        return true;
    };

    std::vector<int> parent(m + n);
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };

    std::vector<int> degree(m + n);
    std::vector<double> residual_s(m), residual_d(n);
    std::vector<char> used(basis_size);
    do {
        // acyclic check on the bipartite support graph
        std::iota(parent.begin(), parent.end(), 0);
        bool forest = true;
        for (int k = 0; k < basis_size && forest; ++k) {
            const int i = pick[k] / n, j = pick[k] % n;
            const int a = find(i), b = find(m + j);
            if (a == b) forest = false;
            else parent[a] = b;
        }
        if (!forest) continue;

        // solve the tree flows by leaf elimination
        std::fill(degree.begin(), degree.end(), 0);
        for (int k = 0; k < basis_size; ++k) {
            ++degree[pick[k] / n];
            ++degree[m + pick[k] % n];
        }
        for (int i = 0; i < m; ++i) residual_s[i] = supply[i];
        for (int j = 0; j < n; ++j) residual_d[j] = demand[j];
        std::fill(used.begin(), used.end(), 0);
        double value = 0.0;
        bool feasible = true;
        for (int round = 0; round < basis_size; ++round) {
            int k_leaf = -1;
            for (int k = 0; k < basis_size; ++k) {
                if (used[k]) continue;
                const int i = pick[k] / n, j = pick[k] % n;
                if (degree[i] == 1 || degree[m + j] == 1) {
                    k_leaf = k;
                    break;
                }
            }
            if (k_leaf < 0) {
                feasible = false;
                break;
            }
            const int i = pick[k_leaf] / n, j = pick[k_leaf] % n;
            const double flow =
                degree[i] == 1 ? residual_s[i] : residual_d[j];
            if (flow < -1e-9) {
                feasible = false;
                break;
            }
            value += flow * cost(i, j);
            residual_s[i] -= flow;
            residual_d[j] -= flow;
            --degree[i];
            --degree[m + j];
            used[k_leaf] = 1;
        }
        if (feasible) best = std::min(best, value);
    } while (advance());
    return best;
}

// Projected gradient maximization of the fixed-distribution expectation
//   sum_i p_i sum_j q_j U(x_i, y_j)
// for scalar decision atoms; independent route for theta -> infinity checks.
template <typename Value, typename Grad>
Vector fixed_distribution_maximizer(const Vector& p, const Vector& q,
                                    const std::vector<Vector>& y_values,
                                    Value&& utility, Grad&& grad,
                                    const rdro::DecisionSet& set, double step,
                                    int iterations) {
    Vector x = set.project(Vector::Zero(p.size()));
    for (int k = 0; k < iterations; ++k) {
        Vector g(p.size());
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            double gi = 0.0;
            for (Eigen::Index j = 0; j < q.size(); ++j) {
                gi += q[j] * grad(x[i], y_values[j][0]);
            }
            g[i] = p[i] * gi;
        }
        const Vector next = set.project(x + step * g);
        const double residual = (next - x).array().abs().maxCoeff();
        x = next;
        if (residual < 1e-12) break;
    }
    (void)utility;
    return x;
}

inline std::vector<double> ranks_with_ties(const std::vector<double>& values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double average = 0.5 * (i + j) + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = average;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& a,
                      const std::vector<double>& b) {
    const size_t n = a.size();
    double ma = 0, mb = 0;
    for (size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double>& a,
                       const std::vector<double>& b) {
    return pearson(ranks_with_ties(a), ranks_with_ties(b));
}

}  // namespace testutil
