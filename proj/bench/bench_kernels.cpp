// Serial reference against the OpenMP variant of each kernel.

#include <benchmark/benchmark.h>

#include <cmath>

#include "lexind/kernels.hpp"
#include "lexind/random.hpp"

using namespace lexind;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    DenseMatrix m(r, c);
    for (auto& v : m.data()) v = rng.normal();
    return m;
}

DenseMatrix unit_rows(std::size_t n, std::size_t dim) {
    DenseMatrix m = random_matrix(n, dim, 7);
    for (std::size_t i = 0; i < n; ++i) {
        double s = norm2(m.row(i));
        for (auto& v : m.row(i)) v /= s;
    }
    return m;
}

// Minibatch forward pass of the first hidden layer: 256 x 300 inputs, 256 units.
template <bool Omp>
void bm_matmul_abt(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    DenseMatrix a = random_matrix(m, 300, 1), b = random_matrix(256, 300, 2), c(m, 256);
    std::vector<double> bias(256, 0.1);
    for (auto _ : state) {
        if constexpr (Omp) kernels::omp::matmul_abt(a, b, bias, c);
        else kernels::serial::matmul_abt(a, b, bias, c);
        benchmark::DoNotOptimize(c.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(m * 300 * 256));
}

template <bool Omp>
void bm_matmul_ab(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    DenseMatrix a = random_matrix(m, 256, 1), b = random_matrix(256, 300, 2), c(m, 300);
    for (auto _ : state) {
        if constexpr (Omp) kernels::omp::matmul_ab(a, b, c);
        else kernels::serial::matmul_ab(a, b, c);
        benchmark::DoNotOptimize(c.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(m * 300 * 256));
}

// Weight gradient: delta^T * activations.
template <bool Omp>
void bm_matmul_atb(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    DenseMatrix a = random_matrix(m, 256, 1), b = random_matrix(m, 300, 2), c(256, 300);
    for (auto _ : state) {
        if constexpr (Omp) kernels::omp::matmul_atb(a, b, c);
        else kernels::serial::matmul_atb(a, b, c);
        benchmark::DoNotOptimize(c.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(m * 300 * 256));
}

template <bool Omp>
void bm_centroids(benchmark::State& state) {
    const std::size_t dim = 300, words = 20000;
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(3);
    std::vector<float> table((words + 1) * dim, 0.0f);
    for (std::size_t i = 0; i < words * dim; ++i) table[i] = static_cast<float>(rng.normal());
    std::vector<std::vector<std::size_t>> docs(n);
    for (auto& d : docs)
        for (std::size_t t = 0; t < 15 + rng.index(30); ++t) d.push_back(rng.index(words));
    DenseMatrix out(n, dim);
    for (auto _ : state) {
        if constexpr (Omp) kernels::omp::centroids(docs, table, dim, out);
        else kernels::serial::centroids(docs, table, dim, out);
        benchmark::DoNotOptimize(out.data().data());
    }
}

template <bool Omp>
void bm_knn(benchmark::State& state) {
    DenseMatrix u = unit_rows(static_cast<std::size_t>(state.range(0)), 300);
    for (auto _ : state) {
        auto nb = Omp ? kernels::omp::knn_unit_rows(u, 20) : kernels::serial::knn_unit_rows(u, 20);
        benchmark::DoNotOptimize(nb.data());
    }
}

template <bool Omp>
void bm_assign(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    DenseMatrix pts = random_matrix(n, 50, 4), centers = random_matrix(50, 50, 5);
    std::vector<std::size_t> assignment(n);
    std::vector<double> dist(n);
    for (auto _ : state) {
        if constexpr (Omp) kernels::omp::assign_nearest(pts, centers, assignment, dist);
        else kernels::serial::assign_nearest(pts, centers, assignment, dist);
        benchmark::DoNotOptimize(dist.data());
    }
}

}  // namespace

BENCHMARK(bm_matmul_abt<false>)->Name("matmul_abt/serial")->Arg(32)->Arg(1024);
BENCHMARK(bm_matmul_abt<true>)->Name("matmul_abt/omp")->Arg(32)->Arg(1024)->UseRealTime();
BENCHMARK(bm_matmul_ab<false>)->Name("matmul_ab/serial")->Arg(32)->Arg(1024);
BENCHMARK(bm_matmul_ab<true>)->Name("matmul_ab/omp")->Arg(32)->Arg(1024)->UseRealTime();
BENCHMARK(bm_matmul_atb<false>)->Name("matmul_atb/serial")->Arg(32)->Arg(1024);
BENCHMARK(bm_matmul_atb<true>)->Name("matmul_atb/omp")->Arg(32)->Arg(1024)->UseRealTime();
BENCHMARK(bm_centroids<false>)->Name("centroids/serial")->Arg(2000);
BENCHMARK(bm_centroids<true>)->Name("centroids/omp")->Arg(2000)->UseRealTime();
BENCHMARK(bm_knn<false>)->Name("knn_unit_rows/serial")->Arg(2000);
BENCHMARK(bm_knn<true>)->Name("knn_unit_rows/omp")->Arg(2000)->UseRealTime();
BENCHMARK(bm_assign<false>)->Name("assign_nearest/serial")->Arg(20000);
BENCHMARK(bm_assign<true>)->Name("assign_nearest/omp")->Arg(20000)->UseRealTime();

BENCHMARK_MAIN();
