#include "wds/data_matrix.hpp"
#include "wds/metrics.hpp"
#include "wds/pca.hpp"
#include "wds/rng.hpp"

#include <benchmark/benchmark.h>

namespace {

wds::DataMatrix make_data(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    wds::SplitMix64 rng(seed);
    wds::DataMatrix data;
    data.values.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            data.values(r, c) = rng.next_gaussian();
        }
    }
    return data;
}

// Snapshot fit cost is driven by the N x N Gram matrix, not by D.
void BM_FitWide(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const auto d = static_cast<Eigen::Index>(state.range(1));
    const wds::DataMatrix data = make_data(n, d, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wds::fit(data));
    }
    state.SetItemsProcessed(state.iterations() * n * d);
}

void BM_TransformReconstruct(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const auto d = static_cast<Eigen::Index>(state.range(1));
    const wds::DataMatrix data = make_data(n, d, 2);
    const wds::PcaModel model = wds::fit(data);
    for (auto _ : state) {
        const wds::WeightMatrix weights = wds::transform(model, data);
        benchmark::DoNotOptimize(wds::reconstruct(model, weights));
    }
    state.SetItemsProcessed(state.iterations() * n * d);
}

void BM_ErrorCurveFullSweep(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const wds::DataMatrix data = make_data(n, 512, 3);
    const wds::PcaModel model = wds::fit(data);
    std::vector<Eigen::Index> m_values;
    for (Eigen::Index m = 0; m <= model.n_components(); ++m) {
        m_values.push_back(m);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(wds::error_curve(model, data, m_values));
    }
}

} // namespace

BENCHMARK(BM_FitWide)
    ->Args({32, 4096})
    ->Args({64, 4096})
    ->Args({128, 4096})
    ->Args({64, 16384})
    ->Unit(benchmark::kMillisecond);

BENCHMARK(BM_TransformReconstruct)
    ->Args({64, 4096})
    ->Args({64, 16384})
    ->Unit(benchmark::kMillisecond);

BENCHMARK(BM_ErrorCurveFullSweep)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
