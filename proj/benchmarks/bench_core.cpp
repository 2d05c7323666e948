// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <benchmark/benchmark.h>

#include <ucsl/optimizer.hpp>
#include <ucsl/rng.hpp>
#include <ucsl/scenario.hpp>
#include <ucsl/tracker.hpp>

namespace {

ucsl::FrameTriple make_triple(int count, int dim, std::uint64_t seed) {
    ucsl::SeededRng rng(seed);
    ucsl::FrameTriple t;
    for (auto& f : t) {
        Eigen::MatrixXd m(dim, count);
        for (int j = 0; j < count; ++j) {
            m.col(j) = rng.unit_vector(dim);
        }
        f = ucsl::EmbeddingMatrix(std::move(m));
    }
    return t;
}

void BM_RowSoftmax(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ucsl::SeededRng rng(7);
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            s(i, j) = rng.uniform(-1.0, 1.0);
        }
    }
    const ucsl::SimilarityMatrix sim(s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ucsl::row_softmax(sim, 0.1));
    }
}
BENCHMARK(BM_RowSoftmax)->Arg(8)->Arg(32)->Arg(128);

void BM_TotalLoss(benchmark::State& state) {
    const auto triple = make_triple(static_cast<int>(state.range(0)), 128, 11);
    const ucsl::LossConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ucsl::total_loss(triple[0], triple[1], triple[2], cfg));
    }
}
BENCHMARK(BM_TotalLoss)->Arg(8)->Arg(32);

void BM_AnalyticGradient(benchmark::State& state) {
    const auto triple = make_triple(static_cast<int>(state.range(0)), 64, 13);
    const ucsl::LossConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ucsl::analytic_gradient(triple, cfg));
    }
}
BENCHMARK(BM_AnalyticGradient)->Arg(4)->Arg(8)->Arg(16);

void BM_TrackerSequence(benchmark::State& state) {
    ucsl::ScenarioSpec spec;
    spec.seed = 5;
    spec.num_identities = static_cast<int>(state.range(0));
    spec.num_frames = 50;
    spec.embed_dim = 128;
    spec.embed_noise = 0.02;
    const auto detections = ucsl::flatten_detections(ucsl::generate(spec).detections);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ucsl::run_tracker(detections));
    }
}
BENCHMARK(BM_TrackerSequence)->Arg(10)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
