#pragma once

#include <functional>
#include <vector>

#include "iga1d/assembly.hpp"
#include "iga1d/dynamics.hpp"

namespace iga1d {

enum class AnalyticBc { FixedFree, FixedFixed };

/// Exact circular frequencies of the uniform truss:
/// fixed-free  omega_n = pi (2n-1) / (2L) sqrt(EA/mu),
/// fixed-fixed omega_n = pi n / L sqrt(EA/mu).
double analytic_omega(const TrussModel& model, AnalyticBc bc, int n);

/// Matching mode shapes, sin(pi (2n-1) x / (2L)) resp. sin(pi n x / L).
double analytic_mode(const TrussModel& model, AnalyticBc bc, int n, double x);

struct StaticSineRef {
    double u = 0.0;
    double normal_force = 0.0;
};

/// Closed form of EA u'' = -q for the half-wave sine load with fixed-fixed
/// supports: u = P0 L / (pi^2 EA) sin(pi x / L), F_N = P0/pi cos(pi x / L).
StaticSineRef analytic_static_sine(const TrussModel& model, double x);

/// Standing wave of the unit fixed-fixed truss started from the sinusoidal
/// velocity field: u(x,t) = sin(2 pi x / L) sin(2 pi t).
double analytic_standing_wave(const TrussModel& model, double x, double t);

enum class FieldQuantity { Displacement, NormalForce };

/// Relative L2 norm of (f_h - f_ref) over the physical domain by Gauss
/// quadrature (p+2 points per span unless overridden). Coefficients are the
/// full re-expanded vector.
double l2_error_field(const SplineSpace& space, const std::vector<double>& coeffs,
                      const std::function<double(double)>& ref, FieldQuantity quantity, double EA,
                      int quad_points_override = 0);

/// Mode-shape error: both the discrete mode and the reference are normalized
/// to unit L2 norm and sign-aligned before taking the L2 difference.
double l2_error_mode(const SplineSpace& space, const std::vector<double>& coeffs,
                     const std::function<double(double)>& ref_mode);

/// Discrete relative L2 over the time samples of u at one probe. The grids
/// must coincide.
double l2_error_history(const TimeHistory& hist, const TimeHistory& ref, int probe_index = 0);

/// Discrete spectrum paired with the analytic frequencies. n_outliers counts
/// the spurious top frequencies by the uniform-mesh rule (p for even, p-1 for
/// odd degree); non-uniform meshes report zero.
struct Spectrum {
    std::vector<double> omega_h;
    std::vector<double> omega_ref;
    std::vector<double> ratio;
    int n_outliers = 0;
    bool uniform_mesh = false;
    Matrix mode_shapes;  // columns, reduced coordinates
};

/// Eigenfrequencies of the scheme. Consistent and IG formulations share the
/// plain symmetric pencil (K, M) by the transformation equivalence. Row-sum
/// lumped NURBS uses (K, rowsum(M)). Row-sum lumped AD uses the lumped dual
/// pencil brought to symmetric-definite form, (S^1/2 K S^1/2, rowsum(S M)),
/// so the non-symmetric dual stiffness never enters the eigensolver.
Spectrum compute_spectrum(const TrussModel& model, const SplineSpace& space, const Scheme& scheme);

/// L2 error of the scheme's mode_number-th mode shape against the analytic
/// one.
double mode_shape_error(const TrussModel& model, const SplineSpace& space, const Scheme& scheme,
                        int mode_number);

struct ConvergenceRow {
    int n_el = 0;
    double h_max = 0.0;
    double error = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

/// Least-squares slope of log(error) against log(h) over the last three rows
/// (the asymptotic regime).
double convergence_rate(const ConvergenceTable& table);

}  // namespace iga1d
