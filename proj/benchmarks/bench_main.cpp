#include <benchmark/benchmark.h>

#include <memory>

#include "pulselab/campaigns.hpp"
#include "pulselab/random.hpp"

using namespace pulselab;

namespace {

const SpectralGrid& grid() {
    static const SpectralGrid g = make_grid(640, 320, 800.0, 0.155);
    return g;
}

PhaseMask chirped() { return eval_polynomial_phase({4000.0, 20000.0, 0.0, grid().omega(320)}, grid()); }

std::shared_ptr<const LaserSystem> system_one() {
    static const auto s = [] {
        LaserSystem sys = make_laser_system(system_one_spec());
        calibrate_tl(sys, calibration_ga_config(sys), 1);
        return std::make_shared<const LaserSystem>(std::move(sys));
    }();
    return s;
}

void BM_Synthesis(benchmark::State& state) {
    const auto amp = gaussian_amplitude(grid(), 57.5);
    const auto field = make_spectral_field(amp, chirped(), grid());
    for (auto _ : state) benchmark::DoNotOptimize(synthesize_temporal(field, 375.0));
}
BENCHMARK(BM_Synthesis);

void BM_IonSignals(benchmark::State& state) {
    const auto field = synthesize_temporal(make_spectral_field(gaussian_amplitude(grid(), 57.5), chirped(), grid()), 375.0);
    const auto sub = default_registry().find("CH2BrCl");
    const double peak = peak_intensity(field, 40.0);
    for (auto _ : state) benchmark::DoNotOptimize(ion_signals(sub, field, peak));
}
BENCHMARK(BM_IonSignals);

// Full objective: shaping, synthesis and ion yields on a calibrated system.
void BM_Objective(benchmark::State& state) {
    const Assay assay(system_one(), default_registry().find("CH2BrCl"));
    const auto mask = chirped();
    for (auto _ : state) benchmark::DoNotOptimize(assay.objective(mask, ObjectiveMode::ga));
}
BENCHMARK(BM_Objective);

// One GA generation is population objective calls; report it per generation.
void BM_GaGeneration(benchmark::State& state) {
    const Assay assay(system_one(), default_registry().find("CH2BrCl"));
    GAConfig cfg = default_ga_config(assay.system().grid());
    cfg.population = static_cast<int>(state.range(0));
    cfg.generations = 1;
    cfg.workers = 1;
    for (auto _ : state) benchmark::DoNotOptimize(optimize_reagent(assay, cfg));
    state.SetItemsProcessed(state.iterations() * 2);
}
BENCHMARK(BM_GaGeneration)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
