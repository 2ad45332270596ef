#include "rdro/mincostflow.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace rdro {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TransportSolution solve_transportation(const Vector& supply,
                                       const Vector& demand,
                                       const Matrix& cost) {
    const Eigen::Index m = supply.size();
    const Eigen::Index n = demand.size();
    if (cost.rows() != m || cost.cols() != n) {
        throw DimensionError("transportation cost shape mismatch");
    }
    if (supply.minCoeff() < 0.0 || demand.minCoeff() < 0.0) {
        throw DomainError("supplies and demands must be nonnegative");
    }
    const double total_s = supply.sum();
    const double total_d = demand.sum();
    const double scale = std::max({total_s, total_d, 1.0});
    if (std::abs(total_s - total_d) > 1e-9 * scale) {
        throw DomainError("transportation problem is not balanced");
    }

    // Nodes: 0 = source, 1..m supplies, m+1..m+n demands, m+n+1 = sink.
    const int N = static_cast<int>(m + n) + 2;
    const int source = 0;
    const int sink = N - 1;
    auto supply_node = [&](Eigen::Index i) { return 1 + static_cast<int>(i); };
    auto demand_node = [&](Eigen::Index j) {
        return 1 + static_cast<int>(m) + static_cast<int>(j);
    };

    Vector remaining_s = supply;
    Vector remaining_d = demand;
    Matrix flow = Matrix::Zero(m, n);
    const double tiny = 1e-14 * scale;

    double shipped = 0.0;
    const int max_augment = 2 * N + 8;
    for (int round = 0; round < max_augment && total_d - shipped > tiny;
         ++round) {
        // Bellman-Ford over the residual graph.
        std::vector<double> dist(N, kInf);
        std::vector<int> prev(N, -1);
        dist[source] = 0.0;
        for (int pass = 0; pass < N; ++pass) {
            bool changed = false;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (remaining_s[i] > tiny && dist[source] < dist[supply_node(i)]) {
                    dist[supply_node(i)] = dist[source];
                    prev[supply_node(i)] = source;
                    changed = true;
                }
            }
            for (Eigen::Index i = 0; i < m; ++i) {
                const double di = dist[supply_node(i)];
                if (di == kInf) continue;
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (di + cost(i, j) < dist[demand_node(j)] - 1e-15) {
                        dist[demand_node(j)] = di + cost(i, j);
                        prev[demand_node(j)] = supply_node(i);
                        changed = true;
                    }
                }
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                const double dj = dist[demand_node(j)];
                if (dj == kInf) continue;
                // backward arcs demand -> supply (cancel existing flow)
                for (Eigen::Index i = 0; i < m; ++i) {
                    if (flow(i, j) > tiny &&
                        dj - cost(i, j) < dist[supply_node(i)] - 1e-15) {
                        dist[supply_node(i)] = dj - cost(i, j);
                        prev[supply_node(i)] = demand_node(j);
                        changed = true;
                    }
                }
                if (remaining_d[j] > tiny && dj < dist[sink]) {
                    dist[sink] = dj;
                    prev[sink] = demand_node(j);
                    changed = true;
                }
            }
            if (!changed) break;
        }
        if (dist[sink] == kInf) {
            throw NumericError("transportation augmentation failed");
        }

        // Bottleneck along the path.
        double push = total_d - shipped;
        for (int v = sink; v != source; v = prev[v]) {
            const int u = prev[v];
            if (u == source) {
                push = std::min(push, remaining_s[v - 1]);
            } else if (v == sink) {
                push = std::min(push, remaining_d[u - 1 - m]);
            } else if (u <= m && v > m) {
                // forward arc, uncapacitated
            } else {
                push = std::min(push, flow(v - 1, u - 1 - m));
            }
        }
        for (int v = sink; v != source; v = prev[v]) {
            const int u = prev[v];
            if (u == source) {
                remaining_s[v - 1] -= push;
            } else if (v == sink) {
                remaining_d[u - 1 - m] -= push;
            } else if (u <= m && v > m) {
                flow(u - 1, v - 1 - m) += push;
            } else {
                flow(v - 1, u - 1 - m) -= push;
            }
        }
        shipped += push;
    }

    TransportSolution out;
    out.assignment = flow;
    out.cost = (flow.array() * cost.array()).sum();
    return out;
}

}  // namespace rdro
