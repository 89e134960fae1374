#include <benchmark/benchmark.h>

#include "akvf/analysis.hpp"
#include "akvf/driver.hpp"

using namespace akvf;

namespace {

const Mesh& bench_mesh(int level) {
    static std::vector<std::unique_ptr<Mesh>> cache(8);
    if (!cache[level]) {
        Mesh base = generate_mesh(DomainSpec::square(4.0 / 3.0), 1.0);
        cache[level] = std::make_unique<Mesh>(refine_uniform(base, level));
    }
    return *cache[level];
}

void BM_AssembleStrain(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const Mesh& mesh = bench_mesh(4);
    const FESpace v = build_space(mesh, k, 2);
    const QuadratureRule rule = triangle_rule(2 * k);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_strain(v, rule));
    state.SetItemsProcessed(state.iterations() * mesh.num_triangles());
}
BENCHMARK(BM_AssembleStrain)->Arg(1)->Arg(2)->Arg(3);

void BM_AssembleConstraint(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const ProblemSpec p = synthetic_problem();
    const Mesh& mesh = bench_mesh(4);
    const FESpace v = build_space(mesh, k, 2);
    const FESpace s = build_space(mesh, k, 1);
    const FieldSpec f = p.make_field(DegeneracyPolicy::fail);
    const QuadratureRule rule = triangle_rule(2 * k);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_b(s, v, f, 0.0, rule));
    state.SetItemsProcessed(state.iterations() * mesh.num_triangles());
}
BENCHMARK(BM_AssembleConstraint)->Arg(1)->Arg(2)->Arg(3);

void BM_SolveSynthetic(benchmark::State& state) {
    SolveOptions o;
    o.k = static_cast<int>(state.range(0));
    o.level = static_cast<int>(state.range(1));
    const ProblemSpec p = synthetic_problem();
    for (auto _ : state) benchmark::DoNotOptimize(solve_problem(p, o));
}
BENCHMARK(BM_SolveSynthetic)->Args({1, 3})->Args({2, 3})->Args({1, 4});

void BM_Locate(benchmark::State& state) {
    const Mesh& mesh = bench_mesh(5);
    const PointLocator loc(mesh);
    std::vector<Vec2> pts;
    for (int i = 0; i < 1000; ++i) {
        const double a = 2.0 * i / 999.0 - 1.0;
        pts.emplace_back(1.3 * a, -1.2 * a * a + 0.5);
    }
    for (auto _ : state)
        for (const Vec2& p : pts) benchmark::DoNotOptimize(loc.locate(p));
    state.SetItemsProcessed(state.iterations() * pts.size());
}
BENCHMARK(BM_Locate);

} // namespace

BENCHMARK_MAIN();
