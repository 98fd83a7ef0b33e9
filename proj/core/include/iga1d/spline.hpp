#pragma once

#include <vector>

namespace iga1d {

/// Open knot vector: non-decreasing knots with the first and last value
/// repeated degree+1 times. Indices are 0-based throughout.
struct KnotVector {
    std::vector<double> knots;
    int degree = 0;

    int num_basis() const { return static_cast<int>(knots.size()) - degree - 1; }
    int num_elements() const;

    /// Unique knot values (element boundaries).
    std::vector<double> breakpoints() const;

    double domain_start() const { return knots.front(); }
    double domain_end() const { return knots.back(); }

    /// True when every nonempty span has the same width (within rel_tol of
    /// the mean width).
    bool is_uniform(double rel_tol = 1e-12) const;

    /// Checks the open-knot-vector invariants; throws std::invalid_argument.
    void validate() const;
};

/// Maximum supported degree. The approximate-dual construction uses
/// factorials up to (2p+1)!, which stay exact in double precision here.
inline constexpr int kMaxDegree = 8;

/// Open knot vector over strictly increasing breakpoints, interior
/// multiplicity 1 (maximum C^{p-1} continuity).
KnotVector make_open_knot_vector(const std::vector<double>& breakpoints, int degree);

/// Locates the knot span containing xi: the index s with knots[s] <= xi <
/// knots[s+1]. The right endpoint maps to the last nonempty span. Throws
/// std::domain_error outside the domain.
int find_span(const KnotVector& kv, double xi);

/// Splits each nonempty span into m equal subspans; multiplicities of the
/// existing knots are preserved.
KnotVector h_refine(const KnotVector& kv, int m);

/// Order elevation of a degree-1 knot vector to degree p with single interior
/// knots, keeping the breakpoints (C^{p-1} continuity).
KnotVector k_refine(const KnotVector& kv_linear, int target_degree);

/// Greville abscissae: averages of degree consecutive interior knots.
std::vector<double> greville_abscissae(const KnotVector& kv);

/// B-spline space with per-control-point weights and 1D physical control
/// values (non-decreasing; the geometry map must not fold).
struct SplineSpace {
    KnotVector kv;
    std::vector<double> weights;
    std::vector<double> geometry;

    int num_basis() const { return kv.num_basis(); }
    bool unit_weights(double tol = 0.0) const;
    double length() const { return geometry.back() - geometry.front(); }

    void validate() const;
};

/// Values and first parametric derivatives of the degree+1 basis functions
/// that are nonzero at the evaluation point. For NURBS evaluations the
/// weighting function, its derivative, and the geometry jacobian are filled
/// in; plain B-spline evaluations report W=1, W'=0, jacobian=1.
struct BasisEval {
    int span = 0;
    int first_index = 0;
    std::vector<double> values;
    std::vector<double> derivs;
    double weight = 1.0;
    double weight_deriv = 0.0;
    double jacobian = 1.0;
};

/// Cox-de Boor evaluation with first derivatives (0/0 terms taken as zero).
BasisEval eval_bspline(const KnotVector& kv, double xi);

/// Rational basis R_i = N_i w_i / W with derivatives by the quotient rule and
/// jacobian dx/dxi = sum R_i' X_i.
BasisEval eval_nurbs(const SplineSpace& space, double xi);

/// Scatters an eval into full-length basis vectors (zeros off the support).
void scatter_values(const BasisEval& eval, int n, std::vector<double>& out_values);

enum class MeshPreset { A, B, C };

/// Default breakpoints of the paper-style meshes on [0,1]: A uniform,
/// B with two equal spans, C with five distinct spans.
std::vector<double> preset_breakpoints(MeshPreset kind);

/// Unit-weight space over the given breakpoints, k-refined to degree p and
/// h-refined m-fold, geometry set to Greville abscissae scaled by length
/// (exactly linear map x = length * xi).
SplineSpace make_space(const std::vector<double>& breakpoints, int degree, int refinement,
                       double length);

SplineSpace mesh_preset(MeshPreset kind, int degree, int refinement, double length);

/// Refines a (possibly weighted) space to target degree and m-fold span
/// subdivision. Unit-weight spaces keep the exact linear geometry; weighted
/// spaces re-express the weighting function and the weighted geometry in the
/// refined basis by parametric L2 projection (exact, the refined space is a
/// superspace).
SplineSpace refine_space(const SplineSpace& initial, int target_degree, int refinement);

/// Inverts the monotone geometry map by bisection.
double param_from_physical(const SplineSpace& space, double x);

/// Physical coordinate of the geometry map at xi.
double physical_from_param(const SplineSpace& space, double xi);

}  // namespace iga1d
