#include "iga1d/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iga1d/errors.hpp"
#include "iga1d/lumping.hpp"
#include "iga1d/quadrature.hpp"

namespace iga1d {

double LoadSpec::distributed_value(double x, double length) const {
    switch (kind) {
        case Kind::None: return 0.0;
        case Kind::SineHalfWave: return P0 / length * std::sin(std::acos(-1.0) * x / length);
        case Kind::Custom: {
            if (samples.size() < 2) throw std::invalid_argument("load: custom samples need >= 2 points");
            if (x <= samples.front().first) return samples.front().second;
            if (x >= samples.back().first) return samples.back().second;
            auto it = std::upper_bound(samples.begin(), samples.end(), x,
                                       [](double v, const auto& s) { return v < s.first; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double f = (x - lo.first) / (hi.first - lo.first);
            return lo.second + f * (hi.second - lo.second);
        }
    }
    return 0.0;
}

void TrussModel::validate() const {
    if (length <= 0.0) throw std::invalid_argument("model: length must be positive");
    if (EA <= 0.0) throw std::invalid_argument("model: EA must be positive");
    if (mu <= 0.0) throw std::invalid_argument("model: mu must be positive");
}

std::vector<int> TrussModel::fixed_indices(int n) const {
    std::vector<int> fixed;
    if (bc_left == BoundaryKind::Fixed) fixed.push_back(0);
    if (bc_right == BoundaryKind::Fixed) fixed.push_back(n - 1);
    return fixed;
}

SystemMatrices assemble(const TrussModel& model, const SplineSpace& space, bool weighted,
                        int quad_points_override) {
    model.validate();
    space.validate();
    const int n = space.num_basis();
    const int p = space.kv.degree;
    const int nq = quad_points_override > 0 ? quad_points_override : default_quad_points(space);
    const GaussRule& rule = gauss_rule(nq);

    SystemMatrices sys;
    sys.M = Matrix(n, n);
    sys.K = Matrix(n, n);
    sys.F.assign(n, 0.0);
    sys.n_free = n;
    sys.n_total = n;
    sys.weighted = weighted;

    const auto breaks = space.kv.breakpoints();
    for (size_t el = 0; el + 1 < breaks.size(); ++el) {
        const double a = breaks[el], b = breaks[el + 1];
        for (size_t g = 0; g < rule.points.size(); ++g) {
            const double xi = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[g];
            const double wq = 0.5 * (b - a) * rule.weights[g];
            const BasisEval e = eval_nurbs(space, xi);
            const double jac = e.jacobian;
            if (jac <= 0.0) throw numerical_error("assemble: non-positive geometry jacobian");
            const double dV = wq * jac;

            double x = 0.0;
            for (int r = 0; r <= p; ++r) x += e.values[r] * space.geometry[e.first_index + r];
            const double q = model.load.distributed_value(x, model.length);
            const double W2 = weighted ? e.weight * e.weight : 1.0;
            const double Wx_over_W = weighted ? (e.weight_deriv / jac) / e.weight : 0.0;

            for (int r = 0; r <= p; ++r) {
                const int I = e.first_index + r;
                const double RI = e.values[r];
                const double BI = e.derivs[r] / jac;
                sys.F[I] += RI * q * W2 * dV;
                for (int c = 0; c <= p; ++c) {
                    const int J = e.first_index + c;
                    const double RJ = e.values[c];
                    const double BJ = e.derivs[c] / jac;
                    sys.M(I, J) += RI * model.mu * RJ * W2 * dV;
                    sys.K(I, J) += (BI + 2.0 * RI * Wx_over_W) * model.EA * BJ * W2 * dV;
                }
            }
        }
    }

    if (model.load.point_load) {
        const PointLoad& pl = *model.load.point_load;
        const double xi_end =
            pl.position == End::Left ? space.kv.domain_start() : space.kv.domain_end();
        const BasisEval e = eval_nurbs(space, xi_end);
        const double W2 = weighted ? e.weight * e.weight : 1.0;
        for (int r = 0; r <= p; ++r) sys.F[e.first_index + r] += e.values[r] * W2 * pl.value;
    }
    return sys;
}

namespace {

std::vector<int> retained(int n, const std::vector<int>& fixed) {
    std::vector<int> keep;
    keep.reserve(n - fixed.size());
    for (int i = 0; i < n; ++i)
        if (std::find(fixed.begin(), fixed.end(), i) == fixed.end()) keep.push_back(i);
    return keep;
}

SystemMatrices reduce(const SystemMatrices& sys, const std::vector<int>& fixed) {
    const auto keep = retained(sys.n_total, fixed);
    const int r = static_cast<int>(keep.size());
    SystemMatrices out = sys;
    out.M = Matrix(r, r);
    out.K = Matrix(r, r);
    out.F.assign(r, 0.0);
    for (int i = 0; i < r; ++i) {
        out.F[i] = sys.F[keep[i]];
        for (int j = 0; j < r; ++j) {
            out.M(i, j) = sys.M(keep[i], keep[j]);
            out.K(i, j) = sys.K(keep[i], keep[j]);
        }
    }
    out.n_free = r;
    out.fixed_indices = fixed;
    out.reduced = true;
    return out;
}

}  // namespace

SystemMatrices apply_dirichlet(const SystemMatrices& sys, const TrussModel& model) {
    if (sys.reduced) throw std::invalid_argument("apply_dirichlet: system already reduced");
    return reduce(sys, model.fixed_indices(sys.n_total));
}

SystemMatrices apply_dual(const SystemMatrices& sys, const TransformOperator& op) {
    if (!sys.reduced) throw std::invalid_argument("apply_dual: reduce the system first");
    if (!op.condensed || op.fixed_indices != sys.fixed_indices)
        throw std::invalid_argument("apply_dual: operator not condensed with the system's fixed indices");
    if (op.size() != sys.n_free) throw std::invalid_argument("apply_dual: dimension mismatch");
    SystemMatrices out = sys;
    out.M = op.matrix * sys.M;
    out.K = op.matrix * sys.K;
    out.F = op.matrix * sys.F;
    out.dual_applied = true;
    return out;
}

SystemMatrices apply_dual_then_reduce(const SystemMatrices& sys, const TransformOperator& op,
                                      const TrussModel& model) {
    if (sys.reduced) throw std::invalid_argument("apply_dual_then_reduce: expects the unreduced system");
    if (op.condensed || op.size() != sys.n_total)
        throw std::invalid_argument("apply_dual_then_reduce: expects the full operator");
    SystemMatrices full = sys;
    full.M = op.matrix * sys.M;
    full.K = op.matrix * sys.K;
    full.F = op.matrix * sys.F;
    full.dual_applied = true;
    return reduce(full, model.fixed_indices(sys.n_total));
}

std::vector<double> static_solve(const SystemMatrices& sys) {
    if (!sys.reduced) throw std::invalid_argument("static_solve: reduce the system first");
    if (sys.fixed_indices.empty())
        throw std::invalid_argument("static_solve: at least one fixed end is required");
    return lu_solve(sys.K, sys.F);
}

std::vector<double> expand_solution(const SystemMatrices& sys, const std::vector<double>& u) {
    if (static_cast<int>(u.size()) != sys.n_free)
        throw std::invalid_argument("expand_solution: size mismatch");
    std::vector<double> full(sys.n_total, 0.0);
    const auto keep = retained(sys.n_total, sys.fixed_indices);
    for (size_t i = 0; i < keep.size(); ++i) full[keep[i]] = u[i];
    return full;
}

FieldSample field_eval(const SplineSpace& space, const std::vector<double>& coeffs, double xi,
                       double EA) {
    if (coeffs.size() != static_cast<size_t>(space.num_basis()))
        throw std::invalid_argument("field_eval: expects full-length coefficients");
    const BasisEval e = eval_nurbs(space, xi);
    FieldSample s;
    for (size_t r = 0; r < e.values.size(); ++r) {
        const double c = coeffs[e.first_index + r];
        s.u += e.values[r] * c;
        s.du_dx += e.derivs[r] / e.jacobian * c;
    }
    s.normal_force = EA * s.du_dx;
    return s;
}

SystemMatrices build_system(const TrussModel& model, const SplineSpace& space,
                            const Scheme& scheme) {
    const bool weighted = scheme.is_dual() && !space.unit_weights();
    const SystemMatrices full = assemble(model, space, weighted);
    SystemMatrices sys;
    if (scheme.is_dual()) {
        TransformOperator op = scheme.test_fn == TestFunction::IG
                                   ? ig_transform(space)
                                   : ad_transform(space, scheme.q);
        const auto fixed = model.fixed_indices(space.num_basis());
        if (scheme.bc_mode == BcMode::Naive) {
            sys = apply_dual_then_reduce(full, op, model);
        } else {
            sys = apply_dual(apply_dirichlet(full, model), condense_transform(op, fixed));
        }
    } else {
        sys = apply_dirichlet(full, model);
    }
    if (scheme.lumping == LumpingRule::RowSum) {
        sys.M_lumped = row_sum_lump(sys.M);
        sys.lumped = true;
    }
    return sys;
}

}  // namespace iga1d
