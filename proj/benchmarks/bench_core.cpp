#include <benchmark/benchmark.h>

#include "qrabi/adiabatic.hpp"
#include "qrabi/dynamics.hpp"
#include "qrabi/hilbert.hpp"
#include "qrabi/lindblad.hpp"
#include "qrabi/rabi_exact.hpp"
#include "qrabi/spectroscopy.hpp"

using namespace qrabi;

namespace {

const RabiParams kFig{1.0, 0.3, 0.1};

MasterEquation two_tone(const DressedBasis& b) {
    const SpectroscopyConfig ref = reference_config(kFig, 1.0);
    const MasterEquation driven = build_driven_rotating(b, ref.rates, ref.pump);
    return add_spectroscopy_tone(driven, b, {ref.spec_amplitude, b.omega_tilde[0]}, ref.pump.frequency);
}

void BM_Displacement(benchmark::State& state) {
    const int n_cut = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(oscillator_displacement(Complex(0.2, 0.0), n_cut));
}
BENCHMARK(BM_Displacement)->Arg(40)->Arg(80);

void BM_RabiSpectrum(benchmark::State& state) {
    const SpaceDims dims(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(build_h_rabi(kFig, dims), 12));
}
BENCHMARK(BM_RabiSpectrum)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_BuildBasis(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(build_basis(kFig, 12, SpaceDims(40), EnergyMode::truncated));
}
BENCHMARK(BM_BuildBasis)->Unit(benchmark::kMillisecond);

void BM_IntegratorStep(benchmark::State& state) {
    const DressedBasis b = build_basis(kFig, static_cast<int>(state.range(0)), SpaceDims(40), EnergyMode::truncated);
    const CompiledGenerator gen(two_tone(b));
    Matrix rho = Matrix::Zero(gen.dim(), gen.dim());
    rho(b.index(0, Branch::minus), b.index(0, Branch::minus)) = 1.0;
    double t = 0.0;
    for (auto _ : state) {
        gen.step(t, 3.0, rho);
        t += 3.0;
    }
}
BENCHMARK(BM_IntegratorStep)->Arg(8)->Arg(12)->Arg(17);

void BM_Nullspace(benchmark::State& state) {
    const DressedBasis b = build_basis(kFig, static_cast<int>(state.range(0)), SpaceDims(40), EnergyMode::truncated);
    const SpectroscopyConfig ref = reference_config(kFig, 1.0);
    const MasterEquation me = build_driven_rotating(b, ref.rates, ref.pump);
    for (auto _ : state) benchmark::DoNotOptimize(steady_state_nullspace(me));
}
BENCHMARK(BM_Nullspace)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ScanPoint(benchmark::State& state) {
    SpectroscopyConfig cfg = reference_config(kFig, 1.0);
    cfg.omega_s_grid = {omega_s_at(kFig, 1.0)};
    for (auto _ : state) benchmark::DoNotOptimize(run_scan(cfg));
}
BENCHMARK(BM_ScanPoint)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
