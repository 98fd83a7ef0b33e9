#include <benchmark/benchmark.h>

#include "iga1d/analysis.hpp"
#include "iga1d/assembly.hpp"
#include "iga1d/dual.hpp"
#include "iga1d/dynamics.hpp"

using namespace iga1d;

namespace {

TrussModel modal_model() {
    TrussModel m;
    m.length = 10.0;
    m.EA = 0.785398163397448;
    m.mu = 0.785398163397448e-4;
    m.bc_left = BoundaryKind::Fixed;
    m.bc_right = BoundaryKind::Free;
    return m;
}

void BM_EvalBspline(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const SplineSpace s = mesh_preset(MeshPreset::A, p, 8, 1.0);
    double xi = 0.0;
    for (auto _ : state) {
        xi += 0.001;
        if (xi > 1.0) xi -= 1.0;
        benchmark::DoNotOptimize(eval_bspline(s.kv, xi));
    }
}
BENCHMARK(BM_EvalBspline)->Arg(2)->Arg(5);

void BM_Assemble(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const TrussModel m = modal_model();
    const SplineSpace s = mesh_preset(MeshPreset::A, p, 20, m.length);
    for (auto _ : state) benchmark::DoNotOptimize(assemble(m, s, false));
}
BENCHMARK(BM_Assemble)->Arg(2)->Arg(5);

void BM_AdTransform(benchmark::State& state) {
    const int p = 5;
    const int q = static_cast<int>(state.range(0));
    const SplineSpace s = mesh_preset(MeshPreset::A, p, 20, 10.0);
    for (auto _ : state) benchmark::DoNotOptimize(ad_transform(s, q));
}
BENCHMARK(BM_AdTransform)->Arg(1)->Arg(5);

void BM_Spectrum(benchmark::State& state) {
    const TrussModel m = modal_model();
    const SplineSpace s = mesh_preset(MeshPreset::A, 4, static_cast<int>(state.range(0)), m.length);
    for (auto _ : state) benchmark::DoNotOptimize(compute_spectrum(m, s, Scheme{}));
}
BENCHMARK(BM_Spectrum)->Arg(10)->Arg(20);

void BM_CdmStep(benchmark::State& state) {
    const TrussModel m = modal_model();
    const SplineSpace s = mesh_preset(MeshPreset::A, 3, static_cast<int>(state.range(0)), m.length);
    Scheme scheme{TestFunction::AD, 3, LumpingRule::RowSum, BcMode::Schur};
    const SystemMatrices sys = build_system(m, s, scheme);
    const MassSolver mass(sys);
    const std::vector<double> F(sys.n_free, 0.0);
    std::vector<double> v0(sys.n_free, 1e-3);
    const SystemMatrices plain = build_system(m, s, Scheme{});
    const double dt = 0.5 * critical_time_step(plain.K, plain.M);
    TimeState st = cdm_init(sys, std::vector<double>(sys.n_free, 0.0), v0, dt, F);
    for (auto _ : state) {
        st = cdm_step(st, sys, mass, F);
        benchmark::DoNotOptimize(st.u.data());
    }
}
BENCHMARK(BM_CdmStep)->Arg(8)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
