#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "iga1d/assembly.hpp"
#include "iga1d/signal.hpp"

namespace iga1d {

/// Explicit-integration state. For the central difference method u_prev holds
/// the displacement one step behind the front; v and a carry the central
/// recoveries one step behind u (standard CDM post-processing).
struct TimeState {
    double t = 0.0;
    double dt = 0.0;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> a;
    std::vector<double> u_prev;
};

enum class ForcingKind { None, GroundAccel, StaticLoadHeld };

struct ForcingSpec {
    ForcingKind kind = ForcingKind::None;
    Signal signal;  // GroundAccel
};

/// Which mass builds the earthquake force vector F = M u''_g 1: the scheme's
/// own (possibly dual-transformed/lumped) mass, or the plain consistent one.
enum class GroundMassMode { Scheme, Consistent };

/// Solves M x = rhs; elementwise for lumped systems, one reused LU
/// factorization for consistent ones.
class MassSolver {
public:
    explicit MassSolver(const SystemMatrices& sys);
    std::vector<double> solve(const std::vector<double>& rhs) const;

private:
    std::vector<double> diag_;  // empty when dense
    std::optional<LuFactor> lu_;
};

/// dt_crit = 2 / omega_max from the generalized eigenproblem of the
/// (symmetric, untransformed) pair.
double critical_time_step(const Matrix& K, const Matrix& M);
double critical_time_step(const Matrix& K, const DiagonalMatrix& M);

/// Central differences start-up: M a0 = F0 - K u0 and
/// u_{-dt} = u0 - dt v0 + dt^2/2 a0.
TimeState cdm_init(const SystemMatrices& sys, const std::vector<double>& u0,
                   const std::vector<double>& v0, double dt, const std::vector<double>& F0);

/// One central-difference step: K* = M/dt^2, F* = F - (K - 2M/dt^2) u_t
/// - M u_{t-dt}/dt^2. Velocity and acceleration are recovered centrally at
/// the pre-step time. Throws numerical_error on blow-up (|u| > 1e12).
TimeState cdm_step(const TimeState& state, const SystemMatrices& sys, const MassSolver& mass,
                   const std::vector<double>& F_t);
TimeState cdm_step(const TimeState& state, const SystemMatrices& sys,
                   const std::vector<double>& F_t);

/// Classical 4-stage Runge-Kutta on the stacked (u, v) state; the
/// acceleration is recovered from the equation of motion at t+dt.
TimeState rk4_step(const TimeState& state, const SystemMatrices& sys, const MassSolver& mass,
                   const std::function<std::vector<double>(double)>& forcing);

/// F(t) = u''_g(t) * (M 1) with the scheme's own mass and linear
/// interpolation of the record; zero outside the recorded window.
std::vector<double> ground_force(const SystemMatrices& sys, const Signal& signal, double t);

enum class Integrator { CDM, RK4 };

struct DtRule {
    enum class Kind { Fixed, HOver10, AdaptedP };
    Kind kind = Kind::HOver10;
    double value = 0.0;  // Fixed

    static DtRule fixed(double dt) { return {Kind::Fixed, dt}; }
    static DtRule h_over_10() { return {Kind::HOver10, 0.0}; }
    static DtRule adapted_p() { return {Kind::AdaptedP, 0.0}; }
};

/// Probe samples of displacement/velocity/acceleration over time, plus the
/// full (re-expanded) displacement coefficients of the last recorded time for
/// field-error evaluation.
struct TimeHistory {
    std::vector<double> times;
    std::vector<double> probe_positions;        // physical x
    std::vector<std::vector<double>> u, v, a;   // [probe][sample]
    std::vector<double> final_u;
    double final_t = 0.0;
    double dt = 0.0;
    long steps = 0;
};

struct TransientSetup {
    Integrator integrator = Integrator::CDM;
    DtRule dt_rule = DtRule::h_over_10();
    double t_end = 1.0;
    std::vector<double> probes;     // physical x, defaults to {L}
    int output_stride = 0;          // 0 = auto
    std::function<double(double)> u0;  // initial fields over physical x,
    std::function<double(double)> v0;  // L2-projected; null = zero
    ForcingSpec forcing;
    std::optional<double> t_eval;   // when set, dt is rounded so this time
                                    // falls exactly on the step grid
    GroundMassMode ground_mass = GroundMassMode::Scheme;
};

/// Builds the scheme's system once (linear problem), integrates, and samples
/// the probes. The returned history always contains the final time row.
TimeHistory run_transient(const TrussModel& model, const SplineSpace& space, const Scheme& scheme,
                          const TransientSetup& setup);

/// L2 projection of a physical-coordinate field onto the reduced (free)
/// shape-function space.
std::vector<double> project_field(const TrussModel& model, const SplineSpace& space,
                                  const std::function<double(double)>& field);

}  // namespace iga1d
