#include "iga1d/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace iga1d {

namespace {

GaussRule compute_rule(int n) {
    GaussRule r;
    r.points.resize(n);
    r.weights.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-style initial guess for the i-th positive root.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and P'_n(x).
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.points[i] = -x;
        r.points[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.points[n / 2] = 0.0;
    return r;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
    if (n < 1 || n > 16) throw std::invalid_argument("gauss_rule: n must be in [1, 16]");
    static const std::array<GaussRule, 16> cache = [] {
        std::array<GaussRule, 16> c;
        for (int k = 1; k <= 16; ++k) c[k - 1] = compute_rule(k);
        return c;
    }();
    return cache[n - 1];
}

}  // namespace iga1d
