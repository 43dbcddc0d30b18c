#include "wds/crossval.hpp"
#include "wds/rng.hpp"
#include "wds/shape.hpp"

#include <benchmark/benchmark.h>

namespace {

wds::PcaModel fitted_model(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    wds::SplitMix64 rng(seed);
    wds::DataMatrix data;
    data.values.resize(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            data.values(r, c) = rng.next_gaussian();
        }
    }
    return wds::fit(data);
}

void BM_DrawWeights(benchmark::State& state) {
    static const wds::PcaModel model = fitted_model(32, 256, 4);
    const auto rows = static_cast<Eigen::Index>(state.range(0));
    const auto threads = static_cast<unsigned>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(wds::draw_weights(model, rows, 9, threads));
    }
    state.SetItemsProcessed(state.iterations() * rows * model.n_components());
}

void BM_CounterGaussian(benchmark::State& state) {
    std::uint64_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wds::counter_gaussian(7, i, 3));
        ++i;
    }
}

void BM_CrossVal(benchmark::State& state) {
    wds::SplitMix64 rng(11);
    wds::DataMatrix data;
    data.values.resize(80, 96);
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        for (Eigen::Index c = 0; c < data.cols(); ++c) {
            data.values(r, c) = rng.next_gaussian();
        }
    }
    std::vector<Eigen::Index> m_values;
    for (Eigen::Index m = 0; m <= 60; m += 10) {
        m_values.push_back(m);
    }
    const auto threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(wds::run_crossval(data, 8, 0, m_values, threads));
    }
}

} // namespace

BENCHMARK(BM_DrawWeights)
    ->Args({10000, 1})
    ->Args({10000, 2})
    ->Args({10000, 4})
    ->Unit(benchmark::kMillisecond);

BENCHMARK(BM_CounterGaussian);

BENCHMARK(BM_CrossVal)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
