#pragma once

#include <cstddef>
#include <vector>

namespace vlab {

// Exact solver for the balanced transportation problem
//   min sum_ij c_ij p_ij  s.t.  sum_j p_ij = a_i,  sum_i p_ij = b_j,  p >= 0
// by the primal network simplex method on the complete bipartite graph, with
// block pricing and strongly feasible spanning trees (Cunningham's leaving rule).
struct TransportSolution {
    struct Flow {
        std::size_t i;
        std::size_t j;
        double mass;
    };
    std::vector<Flow> flows;
    double cost = 0.0;
    std::size_t pivots = 0;
    // dual potentials u_i (sources) and w_j (targets) with c_ij - u_i - w_j >= -tol at optimum
    std::vector<double> u;
    std::vector<double> w;
};

// cost is row-major n1 x n2; a and b must be positive and have (nearly) equal sums.
TransportSolution solve_transport(const std::vector<double>& a, const std::vector<double>& b,
                                  const std::vector<double>& cost);

}  // namespace vlab
