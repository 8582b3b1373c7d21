#include "spk/bounds.hpp"
#include "spk/exact_mixing.hpp"
#include "spk/profiles.hpp"
#include "spk/zoo.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

void BM_ExhaustiveSurvey(benchmark::State& state) {
    const auto c = spk::cycle(static_cast<int>(state.range(0)));
    spk::SurveyOptions so;
    so.mode = spk::EnumerationMode::Exhaustive;
    so.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(spk::survey_subsets(c, so).records.size());
}
BENCHMARK(BM_ExhaustiveSurvey)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ConnectedSurveyTorus(benchmark::State& state) {
    const auto c = spk::torus_product(3, static_cast<int>(state.range(0)));
    spk::SurveyOptions so;
    so.r_max = 0.25;
    so.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(spk::survey_subsets(c, so).records.size());
}
BENCHMARK(BM_ConnectedSurveyTorus)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_ConductanceTreeDp(benchmark::State& state) {
    const auto c = spk::viscek(4, static_cast<int>(state.range(0))).second;
    for (auto _ : state)
        benchmark::DoNotOptimize(spk::conductance_profile(c, spk::ConductanceMethod::TreeDynamicProgram).phi.size());
}
BENCHMARK(BM_ConductanceTreeDp)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_HeatKernelDistance(benchmark::State& state) {
    const auto c = spk::cycle(static_cast<int>(state.range(0)));
    const spk::DistanceEvaluator eval(c);
    double t = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval.continuous(spk::kInfinityNorm, t));
        t = t < 100.0 ? t * 1.1 : 1.0;
    }
}
BENCHMARK(BM_HeatKernelDistance)->Arg(16)->Arg(64)->Arg(256);

void BM_ExactTau(benchmark::State& state) {
    const auto c = spk::cycle(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(spk::exact_tau(c, spk::kInfinityNorm, std::exp(-1.0)).value);
}
BENCHMARK(BM_ExactTau)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_VFunction(benchmark::State& state) {
    const int pieces = static_cast<int>(state.range(0));
    std::vector<double> r, v;
    for (int i = 1; i <= pieces; ++i) {
        r.push_back(static_cast<double>(i) / pieces);
        v.push_back(1.0 / (1.0 + i));
    }
    const spk::StepProfile L(r, v, spk::ProfileKind::Exact, spk::ProfileSource::Enumeration);
    const spk::VFunction V(L, 0.5 / pieces);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(V(t));
        t = t < 1e3 ? t + 0.37 : 0.0;
    }
}
BENCHMARK(BM_VFunction)->Arg(16)->Arg(1024);

void BM_SpectralUpperBound(benchmark::State& state) {
    const auto c = spk::cycle(static_cast<int>(state.range(0)));
    const auto band = spk::spectral_profile_exhaustive(c);
    for (auto _ : state)
        benchmark::DoNotOptimize(spk::tau_upper_spectral(band.lower, std::exp(-1.0), c.pi().minCoeff()).value);
}
BENCHMARK(BM_SpectralUpperBound)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
