#include <benchmark/benchmark.h>

#include "twirlbench/decay_analysis.hpp"
#include "twirlbench/iteration.hpp"
#include "twirlbench/noise_models.hpp"
#include "twirlbench/rb_simulator.hpp"

using namespace twirlbench;

namespace {

TransferMatrix16 some_noise() {
    return noise_to_ptm(noise::Composite{{noise::AmplitudeDamping{0.02, 0.01}, noise::CorrelatedZZ{0.1}}});
}

void BM_TwirlExact(benchmark::State& state) {
    const auto lambda = some_noise();
    for (auto _ : state) benchmark::DoNotOptimize(twirl_exact(lambda));
}
BENCHMARK(BM_TwirlExact);

void BM_BuildM0FromGate(benchmark::State& state) {
    CounterRng rng(1);
    const auto u = haar_unitary4(rng);
    for (auto _ : state) benchmark::DoNotOptimize(build_m0_from_gate(u));
}
BENCHMARK(BM_BuildM0FromGate);

void BM_M0FromInvariants(benchmark::State& state) {
    CounterRng rng(2);
    const auto u = haar_unitary4(rng);
    for (auto _ : state) benchmark::DoNotOptimize(m0_matrix(m0_entries_from_invariants(local_invariants(u))));
}
BENCHMARK(BM_M0FromInvariants);

void BM_Eig3(benchmark::State& state) {
    CounterRng rng(3);
    const Eigen::Matrix3d m = build_m_with_noise(haar_unitary4(rng), some_noise()).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(eig3(m));
}
BENCHMARK(BM_Eig3);

void BM_SampleSequence(benchmark::State& state) {
    CounterRng rng(4);
    const auto u = haar_unitary4(rng);
    const auto lambda = some_noise();
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_sequence_channel(u, lambda, n, rng));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SampleSequence)->RangeMultiplier(4)->Range(1, 256)->Complexity(benchmark::oN);

void BM_RunIrb(benchmark::State& state) {
    const auto lambda = noise_to_ptm(noise::GlobalDepolarizing{0.01});
    const SequenceSpec spec{{1, 2, 4, 8, 16, 32}, 20, 500, 5};
    SimulationOptions options;
    options.threads = static_cast<unsigned>(state.range(0));  // 0 = all cores
    for (auto _ : state) benchmark::DoNotOptimize(run_irb(gates::cnot(), lambda, spec, options));
}
BENCHMARK(BM_RunIrb)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_FitSingleExponential(benchmark::State& state) {
    const auto lambda = noise_to_ptm(noise::GlobalDepolarizing{0.01});
    const auto recs = run_irb(gates::cnot(), lambda, {{1, 2, 4, 8, 16, 32, 64}, 20, 500, 6});
    for (auto _ : state) benchmark::DoNotOptimize(fit_single_exponential(recs));
}
BENCHMARK(BM_FitSingleExponential);

void BM_FitSwapCase(benchmark::State& state) {
    const auto lambda = noise_to_ptm(noise::Iso{0.99, 0.97, 0.962});
    const auto recs = run_irb(gates::swap(), lambda, {{1, 2, 3, 4, 7, 8, 15, 16}, 20, 500, 7});
    for (auto _ : state) benchmark::DoNotOptimize(fit_swap_case(recs));
}
BENCHMARK(BM_FitSwapCase);

}  // namespace

BENCHMARK_MAIN();
