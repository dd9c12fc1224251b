#include <benchmark/benchmark.h>

#include <random>

#include "levin/construct.hpp"
#include "levin/discrepancy.hpp"
#include "levin/ffmat.hpp"
#include "levin/lowerbound.hpp"
#include "levin/necklace.hpp"

using namespace levin;
using ffmat::Prime;

static void BM_BinomMod(benchmark::State& state) {
    const Prime p(static_cast<std::uint32_t>(state.range(0)));
    std::mt19937_64 rng(1);
    std::uint64_t n = rng() >> 4, r = n / 3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ffmat::binom_mod(n, r, p));
        ++n;
        r += 7;
        if (r > n) r = 0;
    }
}
BENCHMARK(BM_BinomMod)->Arg(2)->Arg(3)->Arg(7);

static void BM_Block(benchmark::State& state) {
    const auto params = construct::levin_params(static_cast<unsigned>(state.range(1)),
                                                Prime(static_cast<std::uint32_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(construct::block(params));
}
BENCHMARK(BM_Block)->Args({2, 3})->Args({2, 4})->Args({3, 2})->Unit(benchmark::kMillisecond);

static void BM_NestedCheck(benchmark::State& state) {
    const auto w = construct::block(construct::levin_params(4, Prime(2)));
    for (auto _ : state) benchmark::DoNotOptimize(necklace::is_nested_perfect(w, 16, 16));
}
BENCHMARK(BM_NestedCheck)->Unit(benchmark::kMillisecond);

static void BM_StreamSlice(benchmark::State& state) {
    const construct::DigitStream s(Prime(2), 5);
    const auto len = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(s.slice(2120, len));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StreamSlice)->Arg(1 << 12)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

static void BM_StarDiscrepancy(benchmark::State& state) {
    const construct::DigitStream s(Prime(2), 5);
    const auto N = static_cast<std::uint64_t>(state.range(0));
    const auto ps = discrepancy::extract_points(s, 0, N, discrepancy::default_precision(N, Prime(2)));
    for (auto _ : state) benchmark::DoNotOptimize(discrepancy::star_discrepancy(ps));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StarDiscrepancy)->Arg(1 << 10)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_Scan(benchmark::State& state) {
    const construct::DigitStream s(Prime(2), 4);
    std::vector<std::uint64_t> Ns(2120);
    for (std::uint64_t i = 0; i < 2120; ++i) Ns[i] = i + 1;
    for (auto _ : state) benchmark::DoNotOptimize(discrepancy::scan(s, Ns));
}
BENCHMARK(BM_Scan)->Unit(benchmark::kMillisecond);

static void BM_PredictGamma(benchmark::State& state) {
    const Prime p(2);
    const auto plan = lowerbound::make_plan(8, p);
    const auto params = construct::levin_params(8, p);
    std::vector<Residue> U(plan.w[1], 1);
    std::size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lowerbound::predict_gamma(params, plan, 1, k, U));
        k = (k + 1) % (256 - plan.w[1]);
    }
}
BENCHMARK(BM_PredictGamma);

static void BM_VerifyGamma(benchmark::State& state) {
    const Prime p(2);
    const auto plan = lowerbound::make_custom_plan(p, 4, {7, 5, 3});
    const construct::DigitStream s(p, 5);
    for (auto _ : state) benchmark::DoNotOptimize(lowerbound::verify_gamma(plan, s));
}
BENCHMARK(BM_VerifyGamma)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
