#include <polyhom/classify.hpp>
#include <polyhom/galois.hpp>
#include <polyhom/generate.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace polyhom;

namespace {

Backend backend_of(const benchmark::State& state) { return state.range(0) ? Backend::OpenMP : Backend::Serial; }

// Random unary and binary operations on `universe` points.
struct Ops
{
    std::vector<std::vector<std::uint32_t>> tables;
    std::vector<std::size_t> arities;
};

Ops random_ops(std::size_t universe)
{
    std::mt19937_64 rng(7);
    Ops ops;
    for (std::size_t ar : {1, 2}) {
        std::vector<std::uint32_t> t(ar == 1 ? universe : universe * universe);
        for (auto& c : t)
            c = static_cast<std::uint32_t>(rng() % universe);
        ops.tables.push_back(std::move(t));
        ops.arities.push_back(ar);
    }
    return ops;
}

void BM_closed_subsets(benchmark::State& state)
{
    const auto universe = static_cast<std::size_t>(state.range(1));
    const auto ops = random_ops(universe);
    for (auto _ : state)
        benchmark::DoNotOptimize(closed_subsets(universe, ops.tables, ops.arities, backend_of(state)));
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << universe));
}
BENCHMARK(BM_closed_subsets)->ArgsProduct({{0, 1}, {16, 20}})->ArgNames({"omp", "universe"})->Unit(benchmark::kMillisecond);

FiniteStructure three_chain()
{
    return canonical_structure(Family::Poset, 3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}, {0, 2}}, "C3");
}

void BM_invariant_relations(benchmark::State& state)
{
    auto fs = enumerate_polymorphisms(three_chain(), 2, 1 << 12).functions;
    InvOptions o;
    o.backend = backend_of(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(invariant_relations(fs, 3, 2, o));
}
BENCHMARK(BM_invariant_relations)->Arg(0)->Arg(1)->ArgName("omp")->Unit(benchmark::kMillisecond);

void BM_gamma_closure(benchmark::State& state)
{
    const auto a = three_chain();
    const RelationSet tau(2, 3, {{0, 2}, {2, 0}, {1, 1}});
    for (auto _ : state)
        benchmark::DoNotOptimize(gamma_closure(a, tau, {}, backend_of(state)));
}
BENCHMARK(BM_gamma_closure)->Arg(0)->Arg(1)->ArgName("omp")->Unit(benchmark::kMillisecond);

void BM_decide_ph(benchmark::State& state)
{
    const auto a = three_chain();
    DecideOptions o;
    o.backend = backend_of(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(decide_ph(a, o));
}
BENCHMARK(BM_decide_ph)->Arg(0)->Arg(1)->ArgName("omp")->Unit(benchmark::kMillisecond);

void BM_kaarli_sweep(benchmark::State& state)
{
    KaarliOptions o;
    o.backend = backend_of(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(kaarli_cross_check(4, o));
}
BENCHMARK(BM_kaarli_sweep)->Arg(0)->Arg(1)->ArgName("omp")->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
