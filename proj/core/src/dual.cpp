#include "iga1d/dual.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "iga1d/errors.hpp"
#include "iga1d/quadrature.hpp"

namespace iga1d {

int default_quad_points(const SplineSpace& space) {
    // p+1 is exact for the polynomial integrands of unit-weight spaces. The
    // rational integrands of weighted spaces converge geometrically; p+8
    // holds the doubled-rule drift below 1e-8 relative even on the coarse
    // varying-weight mesh.
    return space.kv.degree + (space.unit_weights() ? 1 : 8);
}

Matrix gram_matrix(const SplineSpace& space, int quad_points_per_span) {
    space.validate();
    const int n = space.num_basis();
    const int p = space.kv.degree;
    Matrix G(n, n);
    const GaussRule& rule = gauss_rule(quad_points_per_span);
    const auto breaks = space.kv.breakpoints();
    for (size_t el = 0; el + 1 < breaks.size(); ++el) {
        const double a = breaks[el], b = breaks[el + 1];
        for (size_t g = 0; g < rule.points.size(); ++g) {
            const double xi = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[g];
            const double wq = 0.5 * (b - a) * rule.weights[g];
            const BasisEval bs = eval_bspline(space.kv, xi);
            // A degree-0 space has no usable geometry map; its knots are read
            // as physical coordinates.
            const double jac = p == 0 ? 1.0 : eval_nurbs(space, xi).jacobian;
            for (int r = 0; r <= p; ++r)
                for (int c = 0; c <= p; ++c)
                    G(bs.first_index + r, bs.first_index + c) += bs.values[r] * bs.values[c] * jac * wq;
        }
    }
    return G;
}

TransformOperator ig_transform(const SplineSpace& space) {
    TransformOperator op;
    op.kind = DualKind::IG;
    op.reproduction_degree = space.kv.degree;
    op.matrix = invert(gram_matrix(space, default_quad_points(space)));
    return op;
}

namespace {

// Sum over all sets of v disjoint unordered index pairs of the product of
// squared differences. Equals 2^-v/v! times the 2v-fold summation over
// distinct indices.
double matching_sum(const std::vector<double>& x, int v) {
    const int r = static_cast<int>(x.size());
    std::vector<double> sq(static_cast<size_t>(r) * r);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) sq[static_cast<size_t>(a) * r + b] = (x[a] - x[b]) * (x[a] - x[b]);

    // Recursion over the lowest unused index: leave it out or pair it.
    const auto rec = [&](auto&& self, std::uint32_t mask, int k) -> double {
        if (k == 0) return 1.0;
        if (std::popcount(mask) < 2 * k) return 0.0;
        const int a = std::countr_zero(mask);
        const std::uint32_t rest = mask & (mask - 1);
        double total = self(self, rest, k);
        std::uint32_t m = rest;
        while (m) {
            const int b = std::countr_zero(m);
            m &= m - 1;
            total += sq[static_cast<size_t>(a) * r + b] * self(self, rest & ~(1u << b), k - 1);
        }
        return total;
    };
    return rec(rec, (1u << r) - 1u, v);
}

// Direct 2v-fold tuple summation over distinct indices, v <= 2 only.
double direct_sum(const std::vector<double>& x, int v) {
    const int r = static_cast<int>(x.size());
    double total = 0.0;
    if (v == 1) {
        for (int i1 = 0; i1 < r; ++i1)
            for (int i2 = 0; i2 < r; ++i2) {
                if (i2 == i1) continue;
                const double d = x[i1] - x[i2];
                total += d * d;
            }
        return total / 2.0;
    }
    for (int i1 = 0; i1 < r; ++i1)
        for (int i2 = 0; i2 < r; ++i2) {
            if (i2 == i1) continue;
            const double d1 = (x[i1] - x[i2]) * (x[i1] - x[i2]);
            for (int i3 = 0; i3 < r; ++i3) {
                if (i3 == i1 || i3 == i2) continue;
                for (int i4 = 0; i4 < r; ++i4) {
                    if (i4 == i1 || i4 == i2 || i4 == i3) continue;
                    const double d2 = (x[i3] - x[i4]) * (x[i3] - x[i4]);
                    total += d1 * d2;
                }
            }
        }
    return total / 8.0;  // 2^-v/v! with v=2
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

double poly_F(int v, const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("poly_F: empty argument list");
    if (v < 1) throw std::invalid_argument("poly_F: v must be >= 1");
    if (x.size() > 31) throw std::invalid_argument("poly_F: too many arguments");
    if (v <= 2) return direct_sum(x, v);
    return matching_sum(x, v);
}

TransformOperator ad_transform(const SplineSpace& space, int q) {
    space.validate();
    const int p = space.kv.degree;
    if (q < 0 || q > p) throw std::invalid_argument("ad_transform: need 0 <= q <= degree");
    const int n = space.num_basis();
    const auto& t = space.kv.knots;

    // S_q = U_0 + sum_v (prod_k D_{p+k}) U_v (prod_k D_{p+k})^T
    Matrix S(n, n);
    for (int j = 0; j < n; ++j) {
        const double denom = t[j + p + 1] - t[j];
        if (denom <= 0.0) throw numerical_error("ad_transform: zero-width knot window");
        S(j, j) = (p + 1) / denom;
    }

    Matrix P = Matrix::identity(n);  // running product of the D matrices, n x (n-v)
    for (int v = 1; v <= q; ++v) {
        // D_{p+v}: (n+1-v) x (n-v), first differences scaled by (p+v)/window
        const int rows = n + 1 - v, cols = n - v;
        Matrix D(rows, cols);
        for (int j = 0; j < rows; ++j) {
            const double denom = t[j + p + v] - t[j];
            if (denom <= 0.0) throw numerical_error("ad_transform: zero-width knot window");
            const double d = (p + v) / denom;
            if (j < cols) D(j, j) = d;
            if (j >= 1) D(j, j - 1) = -d;
        }
        P = P * D;

        std::vector<double> u(n - v);
        const double coef = factorial(p + 1) * factorial(p - v) / (factorial(p + v + 1) * factorial(p + v));
        for (int j = 0; j < n - v; ++j) {
            const double denom = t[j + p + v + 1] - t[j];
            if (denom <= 0.0) throw numerical_error("ad_transform: zero-width knot window");
            const std::vector<double> window(t.begin() + j + 1, t.begin() + j + p + v + 1);
            u[j] = (p + v + 1) / denom * coef * poly_F(v, window);
        }

        for (int i = 0; i < n; ++i)
            for (int jj = 0; jj < n; ++jj) {
                double s = 0.0;
                for (int k = std::max(0, std::max(i, jj) - v); k <= std::min(n - v - 1, std::min(i, jj)); ++k)
                    s += P(i, k) * u[k] * P(jj, k);
                S(i, jj) += s;
            }
    }

    // snap negligible entries to exact zeros for deterministic bandwidth
    const double cutoff = 1e-14 * S.max_abs();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::fabs(S(i, j)) < cutoff) S(i, j) = 0.0;

    TransformOperator op;
    op.kind = DualKind::AD;
    op.reproduction_degree = q;
    op.matrix = std::move(S);
    return op;
}

std::vector<double> eval_duals(const TransformOperator& op, const SplineSpace& space, double xi) {
    const int n = space.num_basis();
    std::vector<double> N;
    scatter_values(eval_bspline(space.kv, xi), n, N);
    if (op.condensed) {
        std::vector<double> retained;
        retained.reserve(n - op.fixed_indices.size());
        for (int i = 0; i < n; ++i)
            if (std::find(op.fixed_indices.begin(), op.fixed_indices.end(), i) == op.fixed_indices.end())
                retained.push_back(N[i]);
        N = std::move(retained);
    }
    if (static_cast<int>(N.size()) != op.matrix.cols())
        throw std::invalid_argument("eval_duals: operator/space size mismatch");
    return op.matrix * N;
}

namespace {

std::vector<int> retained_indices(int n, const std::vector<int>& fixed) {
    std::vector<int> keep;
    keep.reserve(n - fixed.size());
    for (int i = 0; i < n; ++i)
        if (std::find(fixed.begin(), fixed.end(), i) == fixed.end()) keep.push_back(i);
    return keep;
}

}  // namespace

TransformOperator condense_transform(const TransformOperator& op,
                                     const std::vector<int>& fixed_indices) {
    if (op.condensed) throw std::invalid_argument("condense_transform: operator already condensed");
    const int n = op.size();
    const int k = static_cast<int>(fixed_indices.size());
    const auto keep = retained_indices(n, fixed_indices);
    const int r = static_cast<int>(keep.size());

    Matrix A(k, k), B(k, r), C(r, r);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) A(i, j) = op.matrix(fixed_indices[i], fixed_indices[j]);
        for (int j = 0; j < r; ++j) B(i, j) = op.matrix(fixed_indices[i], keep[j]);
    }
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) C(i, j) = op.matrix(keep[i], keep[j]);

    TransformOperator out;
    out.kind = op.kind;
    out.reproduction_degree = op.reproduction_degree;
    out.condensed = true;
    out.fixed_indices = fixed_indices;
    if (k == 0) {
        out.matrix = std::move(C);
        return out;
    }
    const Matrix X = LuFactor(A).solve(B);  // A^-1 B
    out.matrix = C - B.transpose() * X;
    return out;
}

TransformOperator naive_reduce_transform(const TransformOperator& op,
                                         const std::vector<int>& fixed_indices) {
    if (op.condensed) throw std::invalid_argument("naive_reduce_transform: operator already condensed");
    const int n = op.size();
    const auto keep = retained_indices(n, fixed_indices);
    const int r = static_cast<int>(keep.size());
    Matrix C(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) C(i, j) = op.matrix(keep[i], keep[j]);
    TransformOperator out;
    out.kind = op.kind;
    out.reproduction_degree = op.reproduction_degree;
    out.condensed = true;
    out.fixed_indices = fixed_indices;
    out.matrix = std::move(C);
    return out;
}

}  // namespace iga1d
