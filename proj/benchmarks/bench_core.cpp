#include <benchmark/benchmark.h>

#include <vector>

#include "alphahyper/inversion.hpp"
#include "alphahyper/mc.hpp"
#include "alphahyper/morse.hpp"
#include "alphahyper/pricing.hpp"
#include "alphahyper/specialfn.hpp"
#include "alphahyper/vswap.hpp"

using namespace alphahyper;

namespace {

ModelParams ref_alpha1() { return ModelParams::from_variance(1.0, 0.1, 0.3, 0.5, -0.5, 0.04); }
ModelParams ref_alpha2() { return ModelParams::from_variance(2.0, 0.1, 0.2, 0.3, 0.0, 0.04); }

}  // namespace

static void BM_KummerPhi(benchmark::State& state) {
    const cplx a(0.7, 0.3), b(2.4, 0.1);
    const double z = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(specialfn::kummer_phi(a, b, z));
}
BENCHMARK(BM_KummerPhi)->Arg(1)->Arg(10)->Arg(40);

static void BM_TricomiPsi(benchmark::State& state) {
    const cplx a(0.7, 0.3), b(2.4, 0.1);
    const double z = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(specialfn::tricomi_psi(a, b, z));
}
BENCHMARK(BM_TricomiPsi)->Arg(1)->Arg(10)->Arg(40);

static void BM_TalbotInvert(benchmark::State& state) {
    inversion::TalbotConfig cfg;
    cfg.node_count = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(inversion::talbot_invert([](cplx p) { return 1.0 / (p * std::sqrt(p + 1.0)); }, 1.0, cfg));
}
BENCHMARK(BM_TalbotInvert)->Arg(24)->Arg(48);

static void BM_DoubleTransform(benchmark::State& state) {
    const auto m = ref_alpha1();
    const auto lv = morse::LaplaceVar::make(m, cplx(4.0, 2.0));
    const cplx lambda(1.5, 3.0);
    for (auto _ : state) benchmark::DoNotOptimize(morse::g_double_transform(m, lambda, lv));
}
BENCHMARK(BM_DoubleTransform);

static void BM_VarianceSwapAlpha1(benchmark::State& state) {
    const auto m = ref_alpha1();
    for (auto _ : state) benchmark::DoNotOptimize(morse::variance_swap_alpha1(m, 1.0));
}
BENCHMARK(BM_VarianceSwapAlpha1)->Unit(benchmark::kMillisecond);

static void BM_VarianceSwapResolvent(benchmark::State& state) {
    const auto m = ref_alpha2();
    for (auto _ : state) benchmark::DoNotOptimize(vswap::variance_swap(m, 1.0));
}
BENCHMARK(BM_VarianceSwapResolvent)->Unit(benchmark::kMillisecond);

static void BM_Smile(benchmark::State& state) {
    const auto m = ref_alpha1();
    const std::vector<double> ks{0.8, 0.9, 1.0, 1.1, 1.2};
    for (auto _ : state) benchmark::DoNotOptimize(pricing::smile(m, ks, 0.5, 0.0));
}
BENCHMARK(BM_Smile)->Unit(benchmark::kSecond)->Iterations(1);

static void BM_Simulate(benchmark::State& state) {
    const auto m = ref_alpha1();
    mc::SimConfig cfg;
    cfg.n_paths = state.range(0);
    cfg.n_steps = 100;
    for (auto _ : state) benchmark::DoNotOptimize(mc::simulate(m, cfg));
    state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps);
}
BENCHMARK(BM_Simulate)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
