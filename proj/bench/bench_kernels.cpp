// Serial reference kernels against the OpenMP ones. Argument = matrix size n.
#include <benchmark/benchmark.h>

#include "vnagen/algebra.hpp"
#include "vnagen/harness.hpp"
#include "vnagen/kernels.hpp"

namespace {

using namespace vnagen;

std::vector<ComplexMatrix> operators(std::size_t n, std::size_t count) {
    std::vector<ComplexMatrix> ops;
    for (std::size_t k = 0; k < count; ++k) {
        const ComplexMatrix u = random_unitary(child_seed(7, k), n);
        ops.push_back(u + u.adjoint());
    }
    return ops;
}

// A full matrix algebra is the worst case for the closure check (k = n^2).
ComplexMatrix full_algebra(std::size_t n) { return commutant(OperatorSet{n, {}}).stacked(); }

void BM_commutator_system_serial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto ops = operators(n, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::serial::commutator_system(ops, n));
    }
}

void BM_commutator_system_parallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto ops = operators(n, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::commutator_system(ops, n));
    }
}

void BM_product_residual_serial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ComplexMatrix stacked = full_algebra(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::serial::max_product_residual(stacked, n));
    }
}

void BM_product_residual_parallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ComplexMatrix stacked = full_algebra(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::max_product_residual(stacked, n));
    }
}

void BM_commutant_serial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const OperatorSet x{n, operators(n, 2)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(commutant_serial(x));
    }
}

void BM_commutant_parallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const OperatorSet x{n, operators(n, 2)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(commutant(x));
    }
}

} // namespace

BENCHMARK(BM_commutator_system_serial)->Arg(4)->Arg(8);
BENCHMARK(BM_commutator_system_parallel)->Arg(4)->Arg(8);
BENCHMARK(BM_product_residual_serial)->Arg(4)->Arg(8);
BENCHMARK(BM_product_residual_parallel)->Arg(4)->Arg(8);
BENCHMARK(BM_commutant_serial)->Arg(4)->Arg(8);
BENCHMARK(BM_commutant_parallel)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
