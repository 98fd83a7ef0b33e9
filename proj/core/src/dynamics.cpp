#include "iga1d/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iga1d/errors.hpp"
#include "iga1d/lumping.hpp"
#include "iga1d/quadrature.hpp"

namespace iga1d {

namespace {

void check_finite(const std::vector<double>& u) {
    for (double x : u)
        if (!std::isfinite(x) || std::fabs(x) > 1e12)
            throw numerical_error("time integration diverged (|u| > 1e12)");
}

std::vector<double> mass_times(const SystemMatrices& sys, const std::vector<double>& x) {
    if (sys.lumped) return *sys.M_lumped * x;
    return sys.M * x;
}

}  // namespace

MassSolver::MassSolver(const SystemMatrices& sys) {
    if (sys.lumped) {
        diag_ = sys.M_lumped->diag;
        for (double d : diag_)
            if (d <= 0.0) throw numerical_error("mass solver: non-positive diagonal mass");
    } else {
        lu_.emplace(sys.M);
    }
}

std::vector<double> MassSolver::solve(const std::vector<double>& rhs) const {
    if (!diag_.empty()) {
        std::vector<double> x(rhs.size());
        for (size_t i = 0; i < rhs.size(); ++i) x[i] = rhs[i] / diag_[i];
        return x;
    }
    return lu_->solve(rhs);
}

double critical_time_step(const Matrix& K, const Matrix& M) {
    const auto eig = sym_generalized_eig(K, M);
    const double lmax = eig.eigenvalues.back();
    if (lmax <= 0.0) throw numerical_error("critical_time_step: non-positive max eigenvalue");
    return 2.0 / std::sqrt(lmax);
}

double critical_time_step(const Matrix& K, const DiagonalMatrix& M) {
    const auto eig = sym_generalized_eig(K, M);
    const double lmax = eig.eigenvalues.back();
    if (lmax <= 0.0) throw numerical_error("critical_time_step: non-positive max eigenvalue");
    return 2.0 / std::sqrt(lmax);
}

TimeState cdm_init(const SystemMatrices& sys, const std::vector<double>& u0,
                   const std::vector<double>& v0, double dt, const std::vector<double>& F0) {
    if (dt <= 0.0) throw std::invalid_argument("cdm_init: dt must be positive");
    const size_t n = static_cast<size_t>(sys.n_free);
    if (u0.size() != n || v0.size() != n || F0.size() != n)
        throw std::invalid_argument("cdm_init: vector size mismatch");

    std::vector<double> rhs = sys.K * u0;
    for (size_t i = 0; i < n; ++i) rhs[i] = F0[i] - rhs[i];
    const MassSolver mass(sys);
    TimeState s;
    s.t = 0.0;
    s.dt = dt;
    s.u = u0;
    s.v = v0;
    s.a = mass.solve(rhs);
    s.u_prev.resize(n);
    for (size_t i = 0; i < n; ++i) s.u_prev[i] = u0[i] - dt * v0[i] + 0.5 * dt * dt * s.a[i];
    return s;
}

TimeState cdm_step(const TimeState& state, const SystemMatrices& sys, const MassSolver& mass,
                   const std::vector<double>& F_t) {
    const size_t n = state.u.size();
    const double dt = state.dt;
    const double inv_dt2 = 1.0 / (dt * dt);

    // F* = F - K u + (2/dt^2) M u - (1/dt^2) M u_prev; u_next = dt^2 M^-1 F*
    const std::vector<double> Ku = sys.K * state.u;
    const std::vector<double> Mu = mass_times(sys, state.u);
    const std::vector<double> Mup = mass_times(sys, state.u_prev);
    std::vector<double> feff(n);
    for (size_t i = 0; i < n; ++i)
        feff[i] = F_t[i] - Ku[i] + 2.0 * inv_dt2 * Mu[i] - inv_dt2 * Mup[i];
    std::vector<double> u_next = mass.solve(feff);
    for (double& x : u_next) x *= dt * dt;
    check_finite(u_next);

    TimeState out;
    out.t = state.t + dt;
    out.dt = dt;
    out.u = u_next;
    out.u_prev = state.u;
    out.v.resize(n);
    out.a.resize(n);
    for (size_t i = 0; i < n; ++i) {
        out.v[i] = (u_next[i] - state.u_prev[i]) / (2.0 * dt);
        out.a[i] = (u_next[i] - 2.0 * state.u[i] + state.u_prev[i]) * inv_dt2;
    }
    return out;
}

TimeState cdm_step(const TimeState& state, const SystemMatrices& sys,
                   const std::vector<double>& F_t) {
    return cdm_step(state, sys, MassSolver(sys), F_t);
}

TimeState rk4_step(const TimeState& state, const SystemMatrices& sys, const MassSolver& mass,
                   const std::function<std::vector<double>(double)>& forcing) {
    const size_t n = state.u.size();
    const double dt = state.dt;

    auto accel = [&](const std::vector<double>& u, double t) {
        std::vector<double> rhs = forcing(t);
        const std::vector<double> Ku = sys.K * u;
        for (size_t i = 0; i < n; ++i) rhs[i] -= Ku[i];
        return mass.solve(rhs);
    };
    auto axpy = [n](const std::vector<double>& x, double h, const std::vector<double>& d) {
        std::vector<double> y(n);
        for (size_t i = 0; i < n; ++i) y[i] = x[i] + h * d[i];
        return y;
    };

    const std::vector<double>& k1u = state.v;
    const std::vector<double> k1v = accel(state.u, state.t);
    const std::vector<double> k2u = axpy(state.v, 0.5 * dt, k1v);
    const std::vector<double> k2v = accel(axpy(state.u, 0.5 * dt, k1u), state.t + 0.5 * dt);
    const std::vector<double> k3u = axpy(state.v, 0.5 * dt, k2v);
    const std::vector<double> k3v = accel(axpy(state.u, 0.5 * dt, k2u), state.t + 0.5 * dt);
    const std::vector<double> k4u = axpy(state.v, dt, k3v);
    const std::vector<double> k4v = accel(axpy(state.u, dt, k3u), state.t + dt);

    TimeState out;
    out.t = state.t + dt;
    out.dt = dt;
    out.u.resize(n);
    out.v.resize(n);
    for (size_t i = 0; i < n; ++i) {
        out.u[i] = state.u[i] + dt / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
        out.v[i] = state.v[i] + dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
    }
    check_finite(out.u);
    out.a = accel(out.u, out.t);
    out.u_prev = state.u;
    return out;
}

std::vector<double> ground_force(const SystemMatrices& sys, const Signal& signal, double t) {
    signal.validate();
    const double ag = interp_signal(signal, t);
    const std::vector<double> ones(sys.n_free, 1.0);
    std::vector<double> f = mass_times(sys, ones);
    for (double& x : f) x *= ag;
    return f;
}

std::vector<double> project_field(const TrussModel& model, const SplineSpace& space,
                                  const std::function<double(double)>& field) {
    const int n = space.num_basis();
    const int p = space.kv.degree;
    const int nq = p + 2;
    const GaussRule& rule = gauss_rule(nq);
    Matrix G(n, n);
    std::vector<double> m(n, 0.0);
    const auto breaks = space.kv.breakpoints();
    for (size_t el = 0; el + 1 < breaks.size(); ++el) {
        const double a = breaks[el], b = breaks[el + 1];
        for (int g = 0; g < nq; ++g) {
            const double xi = 0.5 * (a + b) + 0.5 * (b - a) * rule.points[g];
            const double wq = 0.5 * (b - a) * rule.weights[g];
            const BasisEval e = eval_nurbs(space, xi);
            double x = 0.0;
            for (int r = 0; r <= p; ++r) x += e.values[r] * space.geometry[e.first_index + r];
            const double f = field(x);
            const double dV = wq * e.jacobian;
            for (int r = 0; r <= p; ++r) {
                const int I = e.first_index + r;
                m[I] += e.values[r] * f * dV;
                for (int c = 0; c <= p; ++c)
                    G(I, e.first_index + c) += e.values[r] * e.values[c] * dV;
            }
        }
    }
    const auto fixed = model.fixed_indices(n);
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (std::find(fixed.begin(), fixed.end(), i) == fixed.end()) keep.push_back(i);
    const int r = static_cast<int>(keep.size());
    Matrix Gr(r, r);
    std::vector<double> mr(r);
    for (int i = 0; i < r; ++i) {
        mr[i] = m[keep[i]];
        for (int j = 0; j < r; ++j) Gr(i, j) = G(keep[i], keep[j]);
    }
    return lu_solve(Gr, mr);
}

TimeHistory run_transient(const TrussModel& model, const SplineSpace& space, const Scheme& scheme,
                          const TransientSetup& setup) {
    if (setup.t_end <= 0.0) throw std::invalid_argument("run_transient: t_end must be positive");
    const SystemMatrices sys = build_system(model, space, scheme);
    const MassSolver mass(sys);
    const int n = sys.n_free;
    const int p = space.kv.degree;

    // time step
    double dt = 0.0;
    switch (setup.dt_rule.kind) {
        case DtRule::Kind::Fixed:
            dt = setup.dt_rule.value;
            if (dt <= 0.0) throw std::invalid_argument("run_transient: fixed dt must be positive");
            break;
        case DtRule::Kind::HOver10: {
            const auto breaks = space.kv.breakpoints();
            double hmin = breaks.back() - breaks.front();
            for (size_t k = 0; k + 1 < breaks.size(); ++k) {
                const double h = physical_from_param(space, breaks[k + 1]) -
                                 physical_from_param(space, breaks[k]);
                hmin = std::min(hmin, h);
            }
            dt = hmin / 10.0;
            break;
        }
        case DtRule::Kind::AdaptedP: {
            const int nel = space.kv.num_elements();
            dt = std::pow(static_cast<double>(p) / (2.0 * nel), p);
            break;
        }
    }
    if (setup.t_eval) {
        const long k = std::max(1L, std::lround(*setup.t_eval / dt));
        dt = *setup.t_eval / static_cast<double>(k);
    }
    const long nsteps = static_cast<long>(std::ceil(setup.t_end / dt - 1e-9));

    // forcing
    std::vector<double> carrier(n, 0.0);
    if (setup.forcing.kind == ForcingKind::GroundAccel) {
        setup.forcing.signal.validate();
        const std::vector<double> ones(n, 1.0);
        if (setup.ground_mass == GroundMassMode::Scheme) {
            carrier = mass_times(sys, ones);
        } else {
            const SystemMatrices plain =
                apply_dirichlet(assemble(model, space, /*weighted=*/false), model);
            carrier = plain.M * ones;
        }
    }
    auto forcing = [&](double t) -> std::vector<double> {
        switch (setup.forcing.kind) {
            case ForcingKind::None: return std::vector<double>(n, 0.0);
            case ForcingKind::StaticLoadHeld: return sys.F;
            case ForcingKind::GroundAccel: {
                const double ag = interp_signal(setup.forcing.signal, t);
                std::vector<double> f(n);
                for (int i = 0; i < n; ++i) f[i] = ag * carrier[i];
                return f;
            }
        }
        return std::vector<double>(n, 0.0);
    };

    // initial conditions
    std::vector<double> u0(n, 0.0), v0(n, 0.0);
    if (setup.u0) u0 = project_field(model, space, setup.u0);
    if (setup.v0) v0 = project_field(model, space, setup.v0);

    // probes
    std::vector<double> probes = setup.probes;
    if (probes.empty()) probes = {physical_from_param(space, space.kv.domain_end())};
    std::vector<double> probe_xi(probes.size());
    for (size_t i = 0; i < probes.size(); ++i) probe_xi[i] = param_from_physical(space, probes[i]);

    const int stride = setup.output_stride > 0
                           ? setup.output_stride
                           : std::max(1L, nsteps / 4000);

    TimeHistory hist;
    hist.probe_positions = probes;
    hist.dt = dt;
    hist.steps = nsteps;
    hist.u.resize(probes.size());
    hist.v.resize(probes.size());
    hist.a.resize(probes.size());

    auto record = [&](double t, const std::vector<double>& u, const std::vector<double>& v,
                      const std::vector<double>& a) {
        hist.times.push_back(t);
        const auto uf = expand_solution(sys, u);
        const auto vf = expand_solution(sys, v);
        const auto af = expand_solution(sys, a);
        hist.final_u = uf;
        hist.final_t = t;
        for (size_t pr = 0; pr < probe_xi.size(); ++pr) {
            const BasisEval e = eval_nurbs(space, probe_xi[pr]);
            double su = 0.0, sv = 0.0, sa = 0.0;
            for (size_t r = 0; r < e.values.size(); ++r) {
                su += e.values[r] * uf[e.first_index + r];
                sv += e.values[r] * vf[e.first_index + r];
                sa += e.values[r] * af[e.first_index + r];
            }
            hist.u[pr].push_back(su);
            hist.v[pr].push_back(sv);
            hist.a[pr].push_back(sa);
        }
    };
    auto want = [&](long step) { return step % stride == 0 || step == nsteps; };

    if (setup.integrator == Integrator::CDM) {
        TimeState st = cdm_init(sys, u0, v0, dt, forcing(0.0));
        record(0.0, st.u, st.v, st.a);
        // One step past t_end closes the central v/a recovery of the last row.
        for (long step = 1; step <= nsteps + 1; ++step) {
            st = cdm_step(st, sys, mass, forcing(st.t));
            const long done = step - 1;  // v/a in st belong to time done*dt
            if (done >= 1 && want(done)) record(done * dt, st.u_prev, st.v, st.a);
        }
    } else {
        TimeState st;
        st.t = 0.0;
        st.dt = dt;
        st.u = u0;
        st.v = v0;
        std::vector<double> rhs = forcing(0.0);
        const std::vector<double> Ku = sys.K * u0;
        for (int i = 0; i < n; ++i) rhs[i] -= Ku[i];
        st.a = mass.solve(rhs);
        record(0.0, st.u, st.v, st.a);
        for (long step = 1; step <= nsteps; ++step) {
            st = rk4_step(st, sys, mass, forcing);
            if (want(step)) record(st.t, st.u, st.v, st.a);
        }
    }
    return hist;
}

}  // namespace iga1d
