#pragma once

#include <optional>
#include <vector>

#include "iga1d/dual.hpp"
#include "iga1d/linalg.hpp"
#include "iga1d/spline.hpp"

namespace iga1d {

enum class BoundaryKind { Fixed, Free };
enum class End { Left, Right };

struct PointLoad {
    End position = End::Right;
    double value = 0.0;
};

/// Distributed and point loading. The sine profile is q(x) = P0/L sin(pi x/L);
/// custom loads are (x, q) samples interpolated linearly.
struct LoadSpec {
    enum class Kind { None, SineHalfWave, Custom };
    Kind kind = Kind::None;
    double P0 = 0.0;
    std::vector<std::pair<double, double>> samples;
    std::optional<PointLoad> point_load;

    double distributed_value(double x, double length) const;
};

/// 1D truss: length, extensional stiffness EA, mass per length mu, boundary
/// conditions, loading.
struct TrussModel {
    double length = 1.0;
    double EA = 1.0;
    double mu = 1.0;
    BoundaryKind bc_left = BoundaryKind::Fixed;
    BoundaryKind bc_right = BoundaryKind::Free;
    LoadSpec load;

    void validate() const;
    std::vector<int> fixed_indices(int n) const;
};

/// Assembled mass/stiffness/load with reduction and transformation state.
/// When lumped, M_lumped replaces the dense mass.
struct SystemMatrices {
    Matrix M;
    Matrix K;
    std::vector<double> F;
    int n_free = 0;
    int n_total = 0;
    std::vector<int> fixed_indices;
    bool reduced = false;
    bool dual_applied = false;
    bool weighted = false;
    bool lumped = false;
    std::optional<DiagonalMatrix> M_lumped;
};

/// Bubnov-Galerkin assembly over the nonempty knot spans. With weighted=true
/// the W^2-carrying integrands are used (required before applying a dual
/// transform on a space with non-unit weights):
///   m: R_I mu R_J W^2,  k: (B_I + 2 R_I W_x / W) EA B_J W^2,  f: R_I q W^2.
/// quad_points_override picks the Gauss order per span (0 = default rule).
SystemMatrices assemble(const TrussModel& model, const SplineSpace& space, bool weighted,
                        int quad_points_override = 0);

/// Strong homogeneous Dirichlet conditions: deletes the boundary rows/columns
/// (open knot vectors are boundary-interpolatory).
SystemMatrices apply_dirichlet(const SystemMatrices& sys, const TrussModel& model);

/// Applies a condensed transform to a reduced system: M <- S M, K <- S K,
/// F <- S F. K is generally non-symmetric afterwards.
SystemMatrices apply_dual(const SystemMatrices& sys, const TransformOperator& op);

/// The degraded comparison mode: transforms the full unreduced system by the
/// full operator and only then deletes the fixed rows/columns, retaining the
/// boundary cross terms the condensation would remove.
SystemMatrices apply_dual_then_reduce(const SystemMatrices& sys, const TransformOperator& op,
                                      const TrussModel& model);

/// u = K^-1 F via LU (handles non-symmetric K).
std::vector<double> static_solve(const SystemMatrices& sys);

/// Reduced solution re-expanded with zeros at the fixed control points.
std::vector<double> expand_solution(const SystemMatrices& sys, const std::vector<double>& u);

struct FieldSample {
    double u = 0.0;
    double du_dx = 0.0;
    double normal_force = 0.0;
};

/// Field value, physical derivative, and normal force EA u' at xi from full
/// (re-expanded) coefficients.
FieldSample field_eval(const SplineSpace& space, const std::vector<double>& coeffs, double xi,
                       double EA);

enum class TestFunction { Nurbs, IG, AD };
enum class LumpingRule { None, RowSum };
enum class BcMode { Schur, Naive };

/// Test-function / lumping / boundary-handling combination of a run.
struct Scheme {
    TestFunction test_fn = TestFunction::Nurbs;
    int q = 0;  // AD reproduction degree
    LumpingRule lumping = LumpingRule::None;
    BcMode bc_mode = BcMode::Schur;

    bool is_dual() const { return test_fn != TestFunction::Nurbs; }
};

/// Full pipeline: assemble (W^2-weighted when a dual transform meets non-unit
/// weights), reduce, transform, lump.
SystemMatrices build_system(const TrussModel& model, const SplineSpace& space,
                            const Scheme& scheme);

}  // namespace iga1d
