#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "iga1d/assembly.hpp"
#include "iga1d/errors.hpp"
#include "iga1d/lumping.hpp"
#include "iga1d/quadrature.hpp"
#include "test_util.hpp"

using namespace iga1d;

namespace {

TrussModel bar_model() {
    TrussModel m;
    m.length = 1.0;
    m.EA = 1.0;
    m.mu = 1.0;
    m.bc_left = BoundaryKind::Fixed;
    m.bc_right = BoundaryKind::Free;
    return m;
}

SplineSpace weighted_space(int p = 2, int m = 1) {
    SplineSpace s;
    s.kv = make_open_knot_vector({0, 0.25, 0.5, 0.75, 1}, 2);
    s.weights = {1, 1.5, 1.05, 1.25, 0.95, 1};
    s.geometry = greville_abscissae(s.kv);
    for (double& g : s.geometry) g *= 10.0;
    s.validate();
    if (p != 2 || m != 1) return refine_space(s, p, m);
    return s;
}

}  // namespace

TEST_CASE("gauss_rule") {
    const GaussRule& r1 = gauss_rule(1);
    CHECK(r1.points[0] == doctest::Approx(0.0));
    CHECK(r1.weights[0] == doctest::Approx(2.0));

    const GaussRule& r2 = gauss_rule(2);
    CHECK(r2.points[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r2.points[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));

    // int_{-1}^{1} x^4 dx = 2/5 exactly with three points
    const GaussRule& r3 = gauss_rule(3);
    double integral = 0.0;
    for (int g = 0; g < 3; ++g) integral += r3.weights[g] * std::pow(r3.points[g], 4);
    CHECK(integral == doctest::Approx(0.4).epsilon(1e-15));

    for (int n = 1; n <= 16; ++n) {
        const GaussRule& r = gauss_rule(n);
        double sum = 0.0;
        for (double w : r.weights) sum += w;
        CHECK(std::fabs(sum - 2.0) < 1e-14);
        // exactness up to degree 2n-1 against analytic monomial moments
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double q = 0.0;
            for (int g = 0; g < n; ++g) q += r.weights[g] * std::pow(r.points[g], d);
            const double exact = d % 2 == 1 ? 0.0 : 2.0 / (d + 1);
            CHECK(std::fabs(q - exact) < 1e-13);
        }
    }
    CHECK_THROWS_AS(gauss_rule(0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_rule(17), std::invalid_argument);
}

TEST_CASE("single linear element: classical bar matrices") {
    const SplineSpace s = make_space({0, 1}, 1, 1, 1.0);
    const SystemMatrices sys = assemble(bar_model(), s, false);
    CHECK(sys.K(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sys.K(0, 1) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(sys.K(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sys.M(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(sys.M(0, 1) == doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(sys.M(1, 1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("weighted assembly with unit weights matches the plain one") {
    TrussModel m = testutil::static_sine_model();
    const SplineSpace s = mesh_preset(MeshPreset::A, 3, 2, m.length);
    const SystemMatrices plain = assemble(m, s, false);
    const SystemMatrices weighted = assemble(m, s, true);
    const double scaleK = plain.K.max_abs(), scaleM = plain.M.max_abs();
    for (int i = 0; i < plain.K.rows(); ++i)
        for (int j = 0; j < plain.K.cols(); ++j) {
            CHECK(std::fabs(plain.K(i, j) - weighted.K(i, j)) < 1e-13 * scaleK);
            CHECK(std::fabs(plain.M(i, j) - weighted.M(i, j)) < 1e-13 * scaleM);
        }
}

TEST_CASE("total mass and rigid-body mode") {
    for (int p : {1, 2, 4}) {
        TrussModel m = testutil::static_sine_model();
        m.mu = 2.5;
        const SplineSpace s = mesh_preset(MeshPreset::B, p, 2, m.length);
        const SystemMatrices sys = assemble(m, s, false);
        double total = 0.0;
        for (int i = 0; i < sys.n_total; ++i)
            for (int j = 0; j < sys.n_total; ++j) total += sys.M(i, j);
        CHECK(total == doctest::Approx(m.mu * m.length).epsilon(1e-10));

        const std::vector<double> ones(sys.n_total, 1.0);
        for (double v : sys.K * ones) CHECK(std::fabs(v) < 1e-10 * sys.K.max_abs());
    }
}

TEST_CASE("pre-dual symmetry of M and K") {
    const SplineSpace s = mesh_preset(MeshPreset::C, 4, 2, 10.0);
    const SystemMatrices sys = assemble(testutil::static_sine_model(), s, false);
    CHECK(sys.K.is_symmetric(1e-12));
    CHECK(sys.M.is_symmetric(1e-12));
    // with genuine weights the W^2 system keeps a symmetric mass; the
    // stiffness becomes a Petrov pairing and loses symmetry
    const SplineSpace w = weighted_space();
    const SystemMatrices wsys = assemble(testutil::static_sine_model(), w, true);
    CHECK(wsys.M.is_symmetric(1e-12));
}

TEST_CASE("apply_dirichlet bookkeeping") {
    const SplineSpace s1 = make_space({0, 1}, 1, 1, 1.0);
    TrussModel fixed_free = bar_model();
    const SystemMatrices red = apply_dirichlet(assemble(fixed_free, s1, false), fixed_free);
    CHECK(red.n_free == 1);
    CHECK(red.K(0, 0) == doctest::Approx(1.0));
    CHECK(red.fixed_indices == std::vector<int>{0});

    TrussModel free_free = bar_model();
    free_free.bc_left = BoundaryKind::Free;
    const SplineSpace s5 = make_space({0, 0.25, 0.5, 0.75, 1}, 1, 1, 1.0);
    const SystemMatrices nored = apply_dirichlet(assemble(free_free, s5, false), free_free);
    CHECK(nored.n_free == 5);

    TrussModel ff = bar_model();
    ff.bc_right = BoundaryKind::Fixed;
    const SystemMatrices both = apply_dirichlet(assemble(ff, s5, false), ff);
    CHECK(both.n_free == 3);
}

TEST_CASE("apply_dual") {
    TrussModel m = testutil::static_sine_model();
    const SplineSpace s = mesh_preset(MeshPreset::A, 2, 2, m.length);
    const SystemMatrices red = apply_dirichlet(assemble(m, s, false), m);

    SUBCASE("identity leaves the system unchanged") {
        TransformOperator id;
        id.matrix = Matrix::identity(red.n_free);
        id.condensed = true;
        id.fixed_indices = red.fixed_indices;
        const SystemMatrices out = apply_dual(red, id);
        CHECK(out.K(1, 1) == doctest::Approx(red.K(1, 1)));
        CHECK(out.dual_applied);
    }

    SUBCASE("row scaling cancels in the static solution") {
        TransformOperator twice;
        twice.matrix = Matrix::identity(red.n_free);
        for (int i = 0; i < red.n_free; ++i) twice.matrix(i, i) = 2.0;
        twice.condensed = true;
        twice.fixed_indices = red.fixed_indices;
        const SystemMatrices out = apply_dual(red, twice);
        const auto u0 = static_solve(red);
        const auto u1 = static_solve(out);
        for (size_t i = 0; i < u0.size(); ++i)
            CHECK(u1[i] == doctest::Approx(u0[i]).epsilon(1e-12));
    }

    SUBCASE("IG makes the mass diagonal") {
        const SplineSpace s10 = mesh_preset(MeshPreset::A, 2, 2, m.length);
        const SystemMatrices red10 = apply_dirichlet(assemble(m, s10, false), m);
        const TransformOperator ig = condense_transform(ig_transform(s10), red10.fixed_indices);
        const SystemMatrices out = apply_dual(red10, ig);
        double dmax = 0.0, offmax = 0.0;
        for (int i = 0; i < out.n_free; ++i) {
            dmax = std::max(dmax, std::fabs(out.M(i, i)));
            for (int j = 0; j < out.n_free; ++j)
                if (i != j) offmax = std::max(offmax, std::fabs(out.M(i, j)));
        }
        CHECK(offmax < 1e-9 * dmax);
    }

    SUBCASE("mismatched fixed indices are rejected") {
        TransformOperator bad;
        bad.matrix = Matrix::identity(red.n_free);
        bad.condensed = true;
        bad.fixed_indices = {0};
        CHECK_THROWS_AS(apply_dual(red, bad), std::invalid_argument);
    }
}

TEST_CASE("transformation invariance of the static solution") {
    TrussModel m = testutil::static_sine_model();
    for (int p : {1, 3}) {
        const SplineSpace s = mesh_preset(MeshPreset::A, p, 2, m.length);
        const SystemMatrices red = apply_dirichlet(assemble(m, s, false), m);
        const auto base = static_solve(red);
        double base_norm = 0.0;
        for (double v : base) base_norm = std::max(base_norm, std::fabs(v));
        for (int q : {1, p}) {
            const TransformOperator ad =
                condense_transform(ad_transform(s, q), red.fixed_indices);
            const auto u = static_solve(apply_dual(red, ad));
            for (size_t i = 0; i < u.size(); ++i)
                CHECK(std::fabs(u[i] - base[i]) < 1e-9 * base_norm);
        }
        const TransformOperator ig = condense_transform(ig_transform(s), red.fixed_indices);
        const auto u = static_solve(apply_dual(red, ig));
        for (size_t i = 0; i < u.size(); ++i) CHECK(std::fabs(u[i] - base[i]) < 1e-9 * base_norm);
    }
}

TEST_CASE("quadrature sufficiency: doubling the rule changes nothing material") {
    TrussModel m = testutil::static_sine_model();
    const SplineSpace s = mesh_preset(MeshPreset::A, 3, 1, m.length);
    const SystemMatrices a = assemble(m, s, false);
    const SystemMatrices b = assemble(m, s, false, 2 * (3 + 1));
    for (int i = 0; i < a.n_total; ++i)
        for (int j = 0; j < a.n_total; ++j) {
            CHECK(std::fabs(a.K(i, j) - b.K(i, j)) <= 1e-10 * a.K.max_abs());
            CHECK(std::fabs(a.M(i, j) - b.M(i, j)) <= 1e-10 * a.M.max_abs());
        }

    // the weighted integrands are rational; the default rule must sit within
    // 1e-8 of the fully converged 16-point reference
    const SplineSpace w = weighted_space();
    const SystemMatrices wa = assemble(m, w, true);
    const SystemMatrices wb = assemble(m, w, true, 16);
    for (int i = 0; i < wa.n_total; ++i)
        for (int j = 0; j < wa.n_total; ++j) {
            CHECK(std::fabs(wa.K(i, j) - wb.K(i, j)) <= 1e-8 * wa.K.max_abs());
            CHECK(std::fabs(wa.M(i, j) - wb.M(i, j)) <= 1e-8 * wa.M.max_abs());
        }
}

TEST_CASE("weighted transformation invariance on the varying-weight mesh") {
    // the W^2 assembly feeds the dual transform; the static solution must
    // stay that of the W^2 Bubnov system for any SPD transform
    TrussModel m = testutil::static_sine_model();
    const SplineSpace w = weighted_space();
    const SystemMatrices red = apply_dirichlet(assemble(m, w, true), m);
    const auto base = static_solve(red);
    const TransformOperator ad = condense_transform(ad_transform(w, 2), red.fixed_indices);
    const auto u = static_solve(apply_dual(red, ad));
    double base_norm = 0.0;
    for (double v : base) base_norm = std::max(base_norm, std::fabs(v));
    for (size_t i = 0; i < u.size(); ++i) CHECK(std::fabs(u[i] - base[i]) < 1e-9 * base_norm);
}

TEST_CASE("static solve with a tip load") {
    TrussModel m = bar_model();
    m.load.point_load = PointLoad{End::Right, 1.0};
    const SplineSpace s = make_space({0, 1}, 1, 1, 1.0);
    const SystemMatrices red = apply_dirichlet(assemble(m, s, false), m);
    const auto u = static_solve(red);
    CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-13));  // u = FL/EA

    const auto full = expand_solution(red, u);
    for (double xi : {0.1, 0.5, 0.9}) {
        const FieldSample f = field_eval(s, full, xi, m.EA);
        CHECK(f.normal_force == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("field_eval") {
    const SplineSpace s = mesh_preset(MeshPreset::A, 3, 2, 2.0);
    const int n = s.num_basis();

    SUBCASE("zero coefficients give the zero field") {
        const std::vector<double> zero(n, 0.0);
        CHECK(field_eval(s, zero, 0.37, 5.0).u == doctest::Approx(0.0));
    }

    SUBCASE("linear reproduction by the Greville coefficients") {
        const auto coeffs = s.geometry;  // Greville x L reproduces x(xi)
        for (double xi : {0.0, 0.2, 0.63, 1.0}) {
            const FieldSample f = field_eval(s, coeffs, xi, 1.0);
            CHECK(f.u == doctest::Approx(2.0 * xi).epsilon(1e-13));
            CHECK(f.du_dx == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("dual stiffness fill-in: global for IG, banded for AD") {
    TrussModel m = testutil::static_sine_model();
    const SplineSpace s = mesh_preset(MeshPreset::A, 3, 2, m.length);
    const SystemMatrices red = apply_dirichlet(assemble(m, s, false), m);
    const int n = red.n_free;

    const TransformOperator ig = condense_transform(ig_transform(s), red.fixed_indices);
    CHECK(bandwidth(apply_dual(red, ig).K, 1e-12) == n - 1);

    int prev = 0;
    for (int q : {1, 3}) {
        const TransformOperator ad = condense_transform(ad_transform(s, q), red.fixed_indices);
        const int bw = bandwidth(apply_dual(red, ad).K, 1e-12);
        CHECK(bw >= prev);
        CHECK(bw <= 3 + q + 2);  // stays narrowly banded, far below n-1
        prev = bw;
    }
}

TEST_CASE("build_system pipelines") {
    TrussModel m = testutil::static_sine_model();
    const SplineSpace s = mesh_preset(MeshPreset::A, 2, 2, m.length);

    Scheme nurbs;
    const SystemMatrices plain = build_system(m, s, nurbs);
    CHECK(plain.reduced);
    CHECK_FALSE(plain.dual_applied);

    Scheme ad{TestFunction::AD, 2, LumpingRule::RowSum, BcMode::Schur};
    const SystemMatrices lumped = build_system(m, s, ad);
    CHECK(lumped.lumped);
    REQUIRE(lumped.M_lumped.has_value());
    CHECK(static_cast<int>(lumped.M_lumped->diag.size()) == lumped.n_free);

    Scheme naive{TestFunction::AD, 2, LumpingRule::None, BcMode::Naive};
    const SystemMatrices nv = build_system(m, s, naive);
    CHECK(nv.dual_applied);
    // the naive reduction keeps boundary cross terms, so its static solution
    // deviates from the Bubnov one
    const auto u_naive = static_solve(nv);
    const auto u_ref = static_solve(plain);
    double diff = 0.0, scale = 0.0;
    for (size_t i = 0; i < u_ref.size(); ++i) {
        diff = std::max(diff, std::fabs(u_naive[i] - u_ref[i]));
        scale = std::max(scale, std::fabs(u_ref[i]));
    }
    CHECK(diff > 1e-6 * scale);
}

TEST_CASE("geometry error on a folded map") {
    SplineSpace s = make_space({0, 1}, 1, 1, 1.0);
    s.geometry = {0.0, 0.0};  // zero jacobian
    TrussModel m = bar_model();
    CHECK_THROWS_AS(assemble(m, s, false), numerical_error);
}
