#include "iga1d/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iga1d/linalg.hpp"
#include "iga1d/quadrature.hpp"

namespace iga1d {

int KnotVector::num_elements() const {
    int n = 0;
    for (size_t k = 0; k + 1 < knots.size(); ++k)
        if (knots[k + 1] > knots[k]) ++n;
    return n;
}

std::vector<double> KnotVector::breakpoints() const {
    std::vector<double> b;
    for (double k : knots)
        if (b.empty() || k > b.back()) b.push_back(k);
    return b;
}

bool KnotVector::is_uniform(double rel_tol) const {
    const auto b = breakpoints();
    if (b.size() < 2) return true;
    const double mean = (b.back() - b.front()) / (static_cast<double>(b.size()) - 1.0);
    for (size_t k = 0; k + 1 < b.size(); ++k)
        if (std::fabs(b[k + 1] - b[k] - mean) > rel_tol * std::fabs(mean)) return false;
    return true;
}

void KnotVector::validate() const {
    if (degree < 0 || degree > kMaxDegree)
        throw std::invalid_argument("knot vector: degree out of range");
    const int n = num_basis();
    if (n < degree + 1) throw std::invalid_argument("knot vector: too few knots");
    for (size_t k = 0; k + 1 < knots.size(); ++k)
        if (knots[k + 1] < knots[k]) throw std::invalid_argument("knot vector: knots must be non-decreasing");
    const int p = degree;
    const size_t m = knots.size();
    for (int k = 0; k <= p; ++k) {
        if (knots[k] != knots[0] || knots[m - 1 - k] != knots[m - 1])
            throw std::invalid_argument("knot vector: not open (boundary multiplicity != degree+1)");
    }
    if (knots[p + 1] == knots[0] || knots[m - p - 2] == knots[m - 1])
        throw std::invalid_argument("knot vector: boundary multiplicity exceeds degree+1");
    // interior multiplicity at most p
    int run = 1;
    for (size_t k = p + 1; k + p + 1 < m; ++k) {
        run = (k > static_cast<size_t>(p) + 1 && knots[k] == knots[k - 1]) ? run + 1 : 1;
        if (run > p) throw std::invalid_argument("knot vector: interior multiplicity exceeds degree");
    }
}

KnotVector make_open_knot_vector(const std::vector<double>& breakpoints, int degree) {
    if (degree < 1 || degree > kMaxDegree)
        throw std::invalid_argument("make_open_knot_vector: degree must be in [1, 8]");
    if (breakpoints.size() < 2)
        throw std::invalid_argument("make_open_knot_vector: need at least two breakpoints");
    for (size_t k = 0; k + 1 < breakpoints.size(); ++k)
        if (breakpoints[k + 1] <= breakpoints[k])
            throw std::invalid_argument("make_open_knot_vector: breakpoints must be strictly increasing");
    KnotVector kv;
    kv.degree = degree;
    kv.knots.assign(degree, breakpoints.front());
    kv.knots.insert(kv.knots.end(), breakpoints.begin(), breakpoints.end());
    kv.knots.insert(kv.knots.end(), degree, breakpoints.back());
    return kv;
}

int find_span(const KnotVector& kv, double xi) {
    const int p = kv.degree;
    const int n = kv.num_basis();
    const auto& t = kv.knots;
    if (xi < t.front() || xi > t.back()) throw std::domain_error("find_span: xi outside knot range");
    if (xi >= t[n]) return n - 1;  // right-endpoint convention, span [t_{n-1}, t_n)
    int lo = p, hi = n;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (xi < t[mid] ? hi : lo) = mid;
    }
    return lo;
}

KnotVector h_refine(const KnotVector& kv, int m) {
    if (m < 1) throw std::invalid_argument("h_refine: m must be >= 1");
    if (m == 1) return kv;
    KnotVector out;
    out.degree = kv.degree;
    const auto& t = kv.knots;
    for (size_t k = 0; k < t.size(); ++k) {
        out.knots.push_back(t[k]);
        if (k + 1 < t.size() && t[k + 1] > t[k]) {
            const double a = t[k], b = t[k + 1];
            for (int j = 1; j < m; ++j) out.knots.push_back(a + (b - a) * j / m);
        }
    }
    return out;
}

KnotVector k_refine(const KnotVector& kv_linear, int target_degree) {
    if (kv_linear.degree != 1) throw std::invalid_argument("k_refine: input must have degree 1");
    return make_open_knot_vector(kv_linear.breakpoints(), target_degree);
}

std::vector<double> greville_abscissae(const KnotVector& kv) {
    const int p = kv.degree;
    const int n = kv.num_basis();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 1; k <= p; ++k) s += kv.knots[i + k];
        g[i] = s / p;
    }
    return g;
}

bool SplineSpace::unit_weights(double tol) const {
    for (double w : weights)
        if (std::fabs(w - 1.0) > tol) return false;
    return true;
}

void SplineSpace::validate() const {
    kv.validate();
    const size_t n = static_cast<size_t>(kv.num_basis());
    if (weights.size() != n || geometry.size() != n)
        throw std::invalid_argument("spline space: weights/geometry size mismatch");
    for (double w : weights)
        if (!(w > 0.0)) throw std::invalid_argument("spline space: weights must be positive");
    for (size_t i = 0; i + 1 < n; ++i)
        if (geometry[i + 1] < geometry[i])
            throw std::invalid_argument("spline space: geometry must be non-decreasing");
}

BasisEval eval_bspline(const KnotVector& kv, double xi) {
    const int p = kv.degree;
    const auto& t = kv.knots;
    BasisEval e;
    e.span = find_span(kv, xi);
    e.first_index = e.span - p;
    e.values.assign(p + 1, 0.0);
    e.derivs.assign(p + 1, 0.0);
    if (p == 0) {
        e.values[0] = 1.0;
        return e;
    }

    std::vector<double> left(p + 1), right(p + 1), N(p + 1), low(p);
    N[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        if (j == p)
            for (int r = 0; r < p; ++r) low[r] = N[r];  // degree p-1 values
        left[j] = xi - t[e.span + 1 - j];
        right[j] = t[e.span + j] - xi;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double tmp = N[r] / (right[r + 1] + left[j - r]);
            N[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        N[j] = saved;
    }
    e.values = N;

    // two-term degree-reduction derivative; 0/0 terms defined as 0
    for (int r = 0; r <= p; ++r) {
        const int g = e.first_index + r;
        double term1 = 0.0, term2 = 0.0;
        if (r >= 1) {
            const double d = t[g + p] - t[g];
            if (d > 0.0) term1 = low[r - 1] / d;
        }
        if (r <= p - 1) {
            const double d = t[g + p + 1] - t[g + 1];
            if (d > 0.0) term2 = low[r] / d;
        }
        e.derivs[r] = p * (term1 - term2);
    }
    return e;
}

BasisEval eval_nurbs(const SplineSpace& space, double xi) {
    BasisEval e = eval_bspline(space.kv, xi);
    const int p = space.kv.degree;
    double W = 0.0, Wd = 0.0;
    for (int r = 0; r <= p; ++r) {
        const double w = space.weights[e.first_index + r];
        W += e.values[r] * w;
        Wd += e.derivs[r] * w;
    }
    double jac = 0.0;
    for (int r = 0; r <= p; ++r) {
        const double w = space.weights[e.first_index + r];
        const double R = e.values[r] * w / W;
        const double Rd = w * (e.derivs[r] * W - e.values[r] * Wd) / (W * W);
        e.values[r] = R;
        e.derivs[r] = Rd;
        jac += Rd * space.geometry[e.first_index + r];
    }
    e.weight = W;
    e.weight_deriv = Wd;
    e.jacobian = jac;
    return e;
}

void scatter_values(const BasisEval& eval, int n, std::vector<double>& out_values) {
    out_values.assign(n, 0.0);
    for (size_t r = 0; r < eval.values.size(); ++r) out_values[eval.first_index + r] = eval.values[r];
}

std::vector<double> preset_breakpoints(MeshPreset kind) {
    switch (kind) {
        case MeshPreset::A: return {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        case MeshPreset::B: return {0.0, 0.3, 0.5, 0.7, 0.8, 1.0};
        case MeshPreset::C: return {0.0, 0.25, 0.45, 0.6, 0.7, 1.0};
    }
    throw std::invalid_argument("preset_breakpoints: unknown mesh kind");
}

SplineSpace make_space(const std::vector<double>& breakpoints, int degree, int refinement,
                       double length) {
    if (length <= 0.0) throw std::invalid_argument("make_space: length must be positive");
    SplineSpace s;
    s.kv = h_refine(make_open_knot_vector(breakpoints, degree), refinement);
    const int n = s.kv.num_basis();
    s.weights.assign(n, 1.0);
    s.geometry = greville_abscissae(s.kv);
    const double x0 = breakpoints.front();
    const double span = breakpoints.back() - x0;
    for (double& g : s.geometry) g = (g - x0) / span * length;
    s.validate();
    return s;
}

SplineSpace mesh_preset(MeshPreset kind, int degree, int refinement, double length) {
    return make_space(preset_breakpoints(kind), degree, refinement, length);
}

namespace {

// Parametric L2 projection of a function onto the span of the B-splines of
// kv. Exact (up to roundoff) when the function lies in the space.
std::vector<double> project_parametric(const KnotVector& kv, const std::vector<double>& breaks,
                                       int nq, const auto& fn) {
    const int n = kv.num_basis();
    Matrix G(n, n);
    std::vector<double> m(n, 0.0);
    const GaussRule& rule = gauss_rule(nq);
    for (size_t el = 0; el + 1 < breaks.size(); ++el) {
        const double a = breaks[el], b = breaks[el + 1];
        for (int g = 0; g < nq; ++g) {
            const double xi = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[g];
            const double w = 0.5 * (b - a) * rule.weights[g];
            const BasisEval e = eval_bspline(kv, xi);
            const double f = fn(xi);
            for (size_t r = 0; r < e.values.size(); ++r) {
                const int i = e.first_index + static_cast<int>(r);
                m[i] += e.values[r] * f * w;
                for (size_t c = 0; c < e.values.size(); ++c)
                    G(i, e.first_index + static_cast<int>(c)) += e.values[r] * e.values[c] * w;
            }
        }
    }
    return lu_solve(G, m);
}

}  // namespace

SplineSpace refine_space(const SplineSpace& initial, int target_degree, int refinement) {
    initial.validate();
    if (target_degree < initial.kv.degree)
        throw std::invalid_argument("refine_space: target degree below the initial degree");
    const auto breaks = initial.kv.breakpoints();
    if (initial.unit_weights()) {
        SplineSpace s = make_space(breaks, target_degree, refinement, initial.length());
        const double x0 = initial.geometry.front();
        for (double& g : s.geometry) g += x0;
        return s;
    }

    // Order elevation keeps the original continuity C^{p_init-1} at the
    // existing interior breakpoints (multiplicity p_t - p_init + 1), so the
    // weighting function stays exactly representable; new knots get
    // multiplicity 1.
    SplineSpace s;
    s.kv.degree = target_degree;
    const int elevated_mult = target_degree - initial.kv.degree + 1;
    s.kv.knots.assign(target_degree + 1, breaks.front());
    for (size_t k = 1; k + 1 < breaks.size(); ++k)
        s.kv.knots.insert(s.kv.knots.end(), elevated_mult, breaks[k]);
    s.kv.knots.insert(s.kv.knots.end(), target_degree + 1, breaks.back());
    s.kv = h_refine(s.kv, refinement);
    const auto fine_breaks = s.kv.breakpoints();
    const int nq = target_degree + 2;
    auto weight_fn = [&](double xi) { return eval_nurbs(initial, xi).weight; };
    auto xw_fn = [&](double xi) {
        const BasisEval e = eval_nurbs(initial, xi);
        double x = 0.0;
        for (size_t r = 0; r < e.values.size(); ++r)
            x += e.values[r] * initial.geometry[e.first_index + r];
        return x * e.weight;
    };
    s.weights = project_parametric(s.kv, fine_breaks, nq, weight_fn);
    s.geometry = project_parametric(s.kv, fine_breaks, nq, xw_fn);
    for (size_t i = 0; i < s.geometry.size(); ++i) s.geometry[i] /= s.weights[i];
    s.validate();
    return s;
}

double physical_from_param(const SplineSpace& space, double xi) {
    const BasisEval e = eval_nurbs(space, xi);
    double x = 0.0;
    for (size_t r = 0; r < e.values.size(); ++r)
        x += e.values[r] * space.geometry[e.first_index + r];
    return x;
}

double param_from_physical(const SplineSpace& space, double x) {
    double lo = space.kv.domain_start(), hi = space.kv.domain_end();
    const double xlo = physical_from_param(space, lo);
    const double xhi = physical_from_param(space, hi);
    const double tol = 1e-12 * (std::fabs(xhi - xlo) + 1.0);
    if (x <= xlo + tol && x >= xlo - tol) return lo;
    if (x <= xhi + tol && x >= xhi - tol) return hi;
    if (x < xlo || x > xhi) throw std::domain_error("param_from_physical: x outside the geometry");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (physical_from_param(space, mid) < x)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * (space.kv.domain_end() - space.kv.domain_start())) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace iga1d
