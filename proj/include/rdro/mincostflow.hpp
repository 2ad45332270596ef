#pragma once

#include "rdro/measure.hpp"

namespace rdro {

struct TransportSolution {
    Matrix assignment;  // flow z_ij, supplies x demands
    double cost = 0.0;
};

// Exact solution of the balanced transportation problem
//   min sum c_ij z_ij  s.t.  sum_j z_ij = supply_i, sum_i z_ij = demand_j,
//   z >= 0
// by successive shortest augmenting paths (Bellman-Ford), with real-valued
// supplies/demands. Requires sum(supply) == sum(demand) up to rounding.
TransportSolution solve_transportation(const Vector& supply,
                                       const Vector& demand,
                                       const Matrix& cost);

}  // namespace rdro
