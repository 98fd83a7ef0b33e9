#pragma once

#include <vector>

namespace iga1d {

struct GaussRule {
    std::vector<double> points;   // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule with n points (1 <= n <= 16), exact for polynomials of
/// degree 2n-1. Nodes are computed by Newton iteration on the Legendre
/// polynomial and cached.
const GaussRule& gauss_rule(int n);

}  // namespace iga1d
