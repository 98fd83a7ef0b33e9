#include "iga1d/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iga1d/errors.hpp"
#include "iga1d/lumping.hpp"
#include "iga1d/quadrature.hpp"

namespace iga1d {

namespace {
const double kPi = std::acos(-1.0);
}

double analytic_omega(const TrussModel& model, AnalyticBc bc, int n) {
    if (n < 1) throw std::invalid_argument("analytic_omega: n must be >= 1");
    const double c = std::sqrt(model.EA / model.mu);
    if (bc == AnalyticBc::FixedFree) return kPi / (2.0 * model.length) * (2.0 * n - 1.0) * c;
    return kPi / model.length * n * c;
}

double analytic_mode(const TrussModel& model, AnalyticBc bc, int n, double x) {
    if (bc == AnalyticBc::FixedFree)
        return std::sin(kPi / (2.0 * model.length) * (2.0 * n - 1.0) * x);
    return std::sin(kPi * n * x / model.length);
}

StaticSineRef analytic_static_sine(const TrussModel& model, double x) {
    if (model.load.kind != LoadSpec::Kind::SineHalfWave)
        throw std::invalid_argument("analytic_static_sine: model must carry the sine load");
    if (model.bc_left != BoundaryKind::Fixed || model.bc_right != BoundaryKind::Fixed)
        throw std::invalid_argument("analytic_static_sine: fixed-fixed supports required");
    const double P0 = model.load.P0;
    StaticSineRef r;
    r.u = P0 * model.length / (kPi * kPi * model.EA) * std::sin(kPi * x / model.length);
    r.normal_force = P0 / kPi * std::cos(kPi * x / model.length);
    return r;
}

double analytic_standing_wave(const TrussModel& model, double x, double t) {
    if (std::fabs(model.EA - 1.0) > 1e-12 || std::fabs(model.mu - 1.0) > 1e-12 ||
        std::fabs(model.length - 1.0) > 1e-12)
        throw std::invalid_argument("analytic_standing_wave: unit truss {EA, mu, L} = 1 required");
    if (model.bc_left != BoundaryKind::Fixed || model.bc_right != BoundaryKind::Fixed)
        throw std::invalid_argument("analytic_standing_wave: fixed-fixed supports required");
    return std::sin(2.0 * kPi * x / model.length) * std::sin(2.0 * kPi * t);
}

namespace {

// Visits the Gauss points of every nonempty span with their parametric
// quadrature weights.
template <typename Fn>
void for_each_gauss_point(const SplineSpace& space, int nq, Fn&& fn) {
    const GaussRule& rule = gauss_rule(nq);
    const auto breaks = space.kv.breakpoints();
    for (size_t el = 0; el + 1 < breaks.size(); ++el) {
        const double a = breaks[el], b = breaks[el + 1];
        for (int g = 0; g < nq; ++g) {
            const double xi = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[g];
            const double wq = 0.5 * (b - a) * rule.weights[g];
            fn(xi, wq);
        }
    }
}

double field_x(const SplineSpace& space, const BasisEval& e) {
    double x = 0.0;
    for (size_t r = 0; r < e.values.size(); ++r)
        x += e.values[r] * space.geometry[e.first_index + r];
    return x;
}

}  // namespace

double l2_error_field(const SplineSpace& space, const std::vector<double>& coeffs,
                      const std::function<double(double)>& ref, FieldQuantity quantity, double EA,
                      int quad_points_override) {
    const int nq = quad_points_override > 0 ? quad_points_override : space.kv.degree + 2;
    double num = 0.0, den = 0.0;
    for_each_gauss_point(space, nq, [&](double xi, double wq) {
        const BasisEval e = eval_nurbs(space, xi);
        const double x = field_x(space, e);
        double fh = 0.0;
        for (size_t r = 0; r < e.values.size(); ++r) {
            const double c = coeffs[e.first_index + r];
            fh += (quantity == FieldQuantity::Displacement ? e.values[r]
                                                           : EA * e.derivs[r] / e.jacobian) *
                  c;
        }
        const double fr = ref(x);
        num += (fh - fr) * (fh - fr) * e.jacobian * wq;
        den += fr * fr * e.jacobian * wq;
    });
    if (den == 0.0) throw numerical_error("l2_error_field: zero reference norm");
    return std::sqrt(num / den);
}

double l2_error_mode(const SplineSpace& space, const std::vector<double>& coeffs,
                     const std::function<double(double)>& ref_mode) {
    const int nq = space.kv.degree + 2;
    double nh = 0.0, nr = 0.0, dot = 0.0;
    for_each_gauss_point(space, nq, [&](double xi, double wq) {
        const BasisEval e = eval_nurbs(space, xi);
        const double x = field_x(space, e);
        double fh = 0.0;
        for (size_t r = 0; r < e.values.size(); ++r) fh += e.values[r] * coeffs[e.first_index + r];
        const double fr = ref_mode(x);
        nh += fh * fh * e.jacobian * wq;
        nr += fr * fr * e.jacobian * wq;
        dot += fh * fr * e.jacobian * wq;
    });
    if (nh == 0.0) throw numerical_error("l2_error_mode: zero discrete mode");
    if (nr == 0.0) throw numerical_error("l2_error_mode: zero reference mode");
    const double sign = dot >= 0.0 ? 1.0 : -1.0;
    const double ih = sign / std::sqrt(nh), ir = 1.0 / std::sqrt(nr);
    double err2 = 0.0;
    for_each_gauss_point(space, nq, [&](double xi, double wq) {
        const BasisEval e = eval_nurbs(space, xi);
        const double x = field_x(space, e);
        double fh = 0.0;
        for (size_t r = 0; r < e.values.size(); ++r) fh += e.values[r] * coeffs[e.first_index + r];
        const double d = fh * ih - ref_mode(x) * ir;
        err2 += d * d * e.jacobian * wq;
    });
    return std::sqrt(err2);
}

double l2_error_history(const TimeHistory& hist, const TimeHistory& ref, int probe_index) {
    if (hist.times.size() != ref.times.size())
        throw std::invalid_argument("l2_error_history: time grids differ in length");
    const double span = std::max(std::fabs(ref.times.back()), 1.0);
    for (size_t k = 0; k < hist.times.size(); ++k)
        if (std::fabs(hist.times[k] - ref.times[k]) > 1e-10 * span)
            throw std::invalid_argument("l2_error_history: time grids do not coincide");
    double num = 0.0, den = 0.0;
    const auto& uh = hist.u[probe_index];
    const auto& ur = ref.u[probe_index];
    for (size_t k = 0; k < uh.size(); ++k) {
        num += (ur[k] - uh[k]) * (ur[k] - uh[k]);
        den += ur[k] * ur[k];
    }
    if (den == 0.0) throw numerical_error("l2_error_history: zero reference history");
    return std::sqrt(num / den);
}

namespace {

int outlier_rule(int p) { return p % 2 == 0 ? p : p - 1; }

Matrix sym_sqrt(const Matrix& A, bool inverse) {
    const EigenResult e = sym_eig(A);
    const int n = A.rows();
    Matrix S(n, n);
    for (int k = 0; k < n; ++k) {
        if (e.eigenvalues[k] <= 0.0) throw numerical_error("sym_sqrt: matrix not positive definite");
        const double s = inverse ? 1.0 / std::sqrt(e.eigenvalues[k]) : std::sqrt(e.eigenvalues[k]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) S(i, j) += s * e.eigenvectors(i, k) * e.eigenvectors(j, k);
    }
    return S;
}

}  // namespace

Spectrum compute_spectrum(const TrussModel& model, const SplineSpace& space, const Scheme& scheme) {
    const bool fixed_free =
        model.bc_left == BoundaryKind::Fixed && model.bc_right == BoundaryKind::Free;
    const bool fixed_fixed =
        model.bc_left == BoundaryKind::Fixed && model.bc_right == BoundaryKind::Fixed;
    if (!fixed_free && !fixed_fixed)
        throw std::invalid_argument("compute_spectrum: supports fixed-free or fixed-fixed models");
    const AnalyticBc bc = fixed_free ? AnalyticBc::FixedFree : AnalyticBc::FixedFixed;

    const SystemMatrices red = apply_dirichlet(assemble(model, space, /*weighted=*/false), model);
    EigenResult eig;
    const bool lumped = scheme.lumping == LumpingRule::RowSum;
    if (!lumped || scheme.test_fn == TestFunction::IG) {
        // consistent formulations (and IG, whose dual mass is already the
        // consistent diagonal) share the plain pencil by the transformation
        // equivalence
        eig = sym_generalized_eig(red.K, red.M);
    } else if (scheme.test_fn == TestFunction::Nurbs) {
        eig = sym_generalized_eig(red.K, row_sum_lump(red.M));
    } else {
        if (!space.unit_weights())
            throw std::invalid_argument(
                "compute_spectrum: lumped AD spectra require unit weights (the weighted dual "
                "stiffness is non-symmetric)");
        const TransformOperator op =
            condense_transform(ad_transform(space, scheme.q), red.fixed_indices);
        const DiagonalMatrix D = row_sum_lump(op.matrix * red.M);
        const Matrix half = sym_sqrt(op.matrix, /*inverse=*/false);
        eig = sym_generalized_eig(half * red.K * half, D);
        eig.eigenvectors = half * eig.eigenvectors;  // back to reduced coordinates
    }

    Spectrum s;
    const int nfree = red.n_free;
    s.omega_h.resize(nfree);
    s.omega_ref.resize(nfree);
    s.ratio.resize(nfree);
    for (int k = 0; k < nfree; ++k) {
        s.omega_h[k] = std::sqrt(std::max(eig.eigenvalues[k], 0.0));
        s.omega_ref[k] = analytic_omega(model, bc, k + 1);
        s.ratio[k] = s.omega_h[k] / s.omega_ref[k];
    }
    s.mode_shapes = std::move(eig.eigenvectors);
    s.uniform_mesh = space.kv.is_uniform();
    s.n_outliers = s.uniform_mesh ? outlier_rule(space.kv.degree) : 0;
    return s;
}

double mode_shape_error(const TrussModel& model, const SplineSpace& space, const Scheme& scheme,
                        int mode_number) {
    const Spectrum s = compute_spectrum(model, space, scheme);
    if (mode_number < 1 || mode_number > static_cast<int>(s.omega_h.size()))
        throw std::invalid_argument("mode_shape_error: mode number out of range");
    const int n = space.num_basis();
    const auto fixed = model.fixed_indices(n);
    std::vector<double> coeffs(n, 0.0);
    int r = 0;
    for (int i = 0; i < n; ++i) {
        if (std::find(fixed.begin(), fixed.end(), i) != fixed.end()) continue;
        coeffs[i] = s.mode_shapes(r++, mode_number - 1);
    }
    const AnalyticBc bc = model.bc_right == BoundaryKind::Free ? AnalyticBc::FixedFree
                                                               : AnalyticBc::FixedFixed;
    return l2_error_mode(space, coeffs,
                         [&](double x) { return analytic_mode(model, bc, mode_number, x); });
}

double convergence_rate(const ConvergenceTable& table) {
    if (table.rows.size() < 3)
        throw std::invalid_argument("convergence_rate: need at least three rows");
    const size_t first = table.rows.size() - 3;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t k = first; k < table.rows.size(); ++k) {
        if (!(table.rows[k].error > 0.0))
            throw std::invalid_argument("convergence_rate: errors must be positive");
        const double x = std::log(table.rows[k].h_max);
        const double y = std::log(table.rows[k].error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = 3.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace iga1d
