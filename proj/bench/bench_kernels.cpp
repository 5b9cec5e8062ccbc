// Serial reference kernels against their OpenMP versions.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>
#include <numbers>

#include "symp/pathindex.hpp"
#include "symp/recurrence.hpp"

using namespace symp;

namespace {

// Rotation-plus-shear path in dimension 2m with a few thousand samples.
SampledPath make_path(int m, int steps) {
    GeneratedPath g;
    g.m = m;
    Mat H0 = Mat::Zero(2 * m, 2 * m), H1 = Mat::Zero(2 * m, 2 * m);
    for (int i = 0; i < 2 * m; ++i) {
        H0(i, i) = 2 * std::numbers::pi * (0.3 + 0.17 * i);
        H1(i, i) = 2 * std::numbers::pi * (0.7 - 0.05 * i);
    }
    H1(0, 2 * m - 1) = H1(2 * m - 1, 0) = 0.4;
    g.samples = {{0.0, H0}, {1.0, H1}};
    g.steps = steps;
    return integrate(g);
}

RecurrenceQuery make_query(int r) {
    RecurrenceQuery q;
    const double alphas[] = {std::sqrt(2.0) - 1, std::sqrt(3.0) - 1.5, std::numbers::pi - 3, std::numbers::e - 2.5};
    for (int i = 0; i < r; ++i) {
        OrbitModel x;
        x.rotations = {RotationBlock::irrational(alphas[i]), RotationBlock::irrational(alphas[(i + 1) % 4])};
        x.loop_index = 2 * (i + 1);
        q.models.push_back(x);
    }
    q.ell0 = 2;
    q.eta = 0.3;
    q.count = 3;
    return q;
}

void BM_RhoSerial(benchmark::State& st) {
    const auto path = make_path(static_cast<int>(st.range(0)), 4000);
    for (auto _ : st) benchmark::DoNotOptimize(rho_samples_serial(path, kDefaultTol));
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(path.matrices.size()));
}

void BM_RhoParallel(benchmark::State& st) {
    const auto path = make_path(static_cast<int>(st.range(0)), 4000);
    for (auto _ : st) benchmark::DoNotOptimize(rho_samples_parallel(path, kDefaultTol));
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(path.matrices.size()));
    st.counters["threads"] = omp_get_max_threads();
}

void BM_RecurrenceSerial(benchmark::State& st) {
    const auto q = make_query(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(find_recurrence_serial(q));
}

void BM_RecurrenceParallel(benchmark::State& st) {
    const auto q = make_query(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(find_recurrence_parallel(q));
    st.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_RhoSerial)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RhoParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecurrenceSerial)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecurrenceParallel)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
