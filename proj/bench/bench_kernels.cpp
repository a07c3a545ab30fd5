#include <benchmark/benchmark.h>

#include <string>

#include "maxpot/bench.hpp"
#include "maxpot/potency.hpp"
#include "maxpot/reduce.hpp"
#include "maxpot/solve.hpp"

using namespace maxpot;

namespace {

std::string data(const std::string& name) { return std::string(MAXPOT_DATA_DIR) + "/" + name; }

const Admg& fig1b() {
    static const Admg g = read_graph(data("fig1b.graph"));
    return g;
}

void compatible(benchmark::State& st, bool parallel) {
    const auto& g = fig1b();
    ResponseSpace space(g);
    const auto s = parse_statement(g, "CF{Y=1 | do(M=1); Y=0 | do(M=0)}", false);
    for (auto _ : st) {
        auto set = parallel ? compatible_set(g, space, s) : compatible_set_serial(g, space, s);
        benchmark::DoNotOptimize(set.data());
    }
}

void sweep(benchmark::State& st, bool parallel) {
    SweepConfig cfg;
    cfg.sizes = {15};
    cfg.densities = {0.5, 2.0};
    cfg.sims = 20;
    cfg.candidates = 100;
    for (auto _ : st) {
        auto r = parallel ? run_er_sweep(cfg) : run_er_sweep_serial(cfg);
        benchmark::DoNotOptimize(r.records.data());
    }
}

// Multilinear bounds on the two-district chain.
void polynomial(benchmark::State& st, bool parallel) {
    const auto g = read_graph(data("two_district_chain.graph"));
    ProgramContext ctx(g, JointDistribution::uniform(g));
    const auto q = parse_query(g, "P(D=1 | do(A=1))");
    const auto p = build_base(ctx, q);
    SolverOptions o;
    o.restarts = 16;
    for (auto _ : st) {
        auto r = parallel ? solve_poly(p, Sense::maximize, o) : solve_poly_serial(p, Sense::maximize, o);
        benchmark::DoNotOptimize(r.value);
    }
}

// Six-item knapsack reduction: 64 subsets, one LP each.
void max_potency(benchmark::State& st, bool parallel) {
    const auto r = knapsack_to_max_potency({{3, 1, 4, 1, 5, 2}, {2, 1, 3, 1, 4, 2}, 7});
    ProgramContext ctx(r.graph, r.distribution);
    for (auto _ : st) {
        auto s = parallel ? solve_max_potency(ctx, r.query, r.experiments, r.costs)
                          : solve_max_potency_serial(ctx, r.query, r.experiments, r.costs);
        benchmark::DoNotOptimize(s.potency);
    }
}

}  // namespace

BENCHMARK_CAPTURE(compatible, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(compatible, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sweep, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sweep, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(polynomial, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(polynomial, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(max_potency, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(max_potency, parallel, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
