// Compares the OpenMP simulation kernel against the naive serial reference
// used by the test suite. Run with --benchmark_time_unit=ms for large sizes.

#include <random>

#include <benchmark/benchmark.h>

#include "snncal/if_core.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

namespace {

constexpr std::size_t kSteps = 32;

snncal::InputCurrents make_inputs(std::size_t neurons) {
    std::mt19937_64 rng(2024);
    return snncal::gen::random_currents(rng, kSteps, neurons, -1.5, 1.5);
}

void bm_run_layer(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    snncal::InputCurrents in = make_inputs(n);
    snncal::Vec v0(n, 0.5);
    for (auto _ : state) {
        snncal::LayerTrace tr = snncal::run_layer(1.0, v0, in, kSteps);
        benchmark::DoNotOptimize(tr.v.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n * kSteps));
}

void bm_serial_reference(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    snncal::InputCurrents in = make_inputs(n);
    std::vector<std::vector<double>> rows = snncal::gen::as_rows(in);
    std::vector<double> v0(n, 0.5);
    for (auto _ : state) {
        snncal::oracle::OracleTrace tr = snncal::oracle::oracle_simulate(1.0, v0, rows);
        benchmark::DoNotOptimize(tr.v.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n * kSteps));
}

void bm_project_currents(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(2025);
    snncal::Matrix W = snncal::gen::random_matrix(rng, n, n, -0.2, 0.2);
    snncal::Matrix presyn = snncal::gen::random_matrix(rng, kSteps, n, 0.0, 1.0);
    for (auto _ : state) {
        snncal::InputCurrents out = snncal::project_currents(W, presyn);
        benchmark::DoNotOptimize(out.I.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n * kSteps));
}

}  // namespace

BENCHMARK(bm_run_layer)->Arg(64)->Arg(512)->Arg(4096)->Arg(32768);
BENCHMARK(bm_serial_reference)->Arg(64)->Arg(512)->Arg(4096)->Arg(32768);
BENCHMARK(bm_project_currents)->Arg(64)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
