#pragma once

#include <vector>

#include "iga1d/linalg.hpp"
#include "iga1d/spline.hpp"

namespace iga1d {

enum class DualKind { IG, AD };

/// The operator S mapping the B-spline vector to the dual test functions,
/// lambda(xi) = S N(xi). Either the inverse Gramian (global support) or the
/// approximate-dual operator S_q (bandwidth q).
struct TransformOperator {
    DualKind kind = DualKind::IG;
    int reproduction_degree = 0;
    Matrix matrix;
    bool condensed = false;
    std::vector<int> fixed_indices;

    int size() const { return matrix.rows(); }
};

/// Quadrature order used for the Gram and system integrals: exact p+1 points
/// for unit weights, p+8 for rational integrands.
int default_quad_points(const SplineSpace& space);

/// Gram matrix G_ij = int N_i N_j ds over the physical domain (geometry
/// jacobian included), by Gauss quadrature per nonempty span.
Matrix gram_matrix(const SplineSpace& space, int quad_points_per_span);

/// Inverse-Gramian duals: S = G^-1, exactly bi-orthogonal, global support.
TransformOperator ig_transform(const SplineSpace& space);

/// The symmetric polynomial F_v entering the approximate-dual coefficients:
/// the sum over v disjoint index pairs of the products of squared argument
/// differences, normalized by 2^-v / v!. Direct pair-tuple summation for
/// v <= 2, subset recursion for larger v.
double poly_F(int v, const std::vector<double>& x);

/// Approximate-dual operator S_q with reproduction degree q <= p, built from
/// the knot vector alone. Symmetric positive definite, bandwidth q; entries
/// below 1e-14 * max|S| are snapped to exact zeros.
TransformOperator ad_transform(const SplineSpace& space, int q);

/// Dual values lambda(xi) = S N(xi) with N the full (or retained, when the
/// operator is condensed) B-spline vector.
std::vector<double> eval_duals(const TransformOperator& op, const SplineSpace& space, double xi);

/// Schur-complement condensation for strongly enforced homogeneous Dirichlet
/// conditions: reorder S into [[A,B],[B^T,C]] with the fixed indices first
/// and return C - B^T A^-1 B. The condensed duals vanish at the fixed
/// boundary wherever the retained B-splines do.
TransformOperator condense_transform(const TransformOperator& op,
                                     const std::vector<int>& fixed_indices);

/// Plain deletion of the fixed rows and columns of S, no Schur correction.
/// Kept only for the degraded-convergence comparison of the boundary
/// treatments.
TransformOperator naive_reduce_transform(const TransformOperator& op,
                                         const std::vector<int>& fixed_indices);

}  // namespace iga1d
