// Acceptance checks on the reference fixtures. Prints one line per criterion
// and exits nonzero if any of them fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "maxpot/bench.hpp"
#include "maxpot/brute_force.hpp"
#include "maxpot/potency.hpp"
#include "maxpot/prune.hpp"
#include "maxpot/reduce.hpp"
#include "support.hpp"

using namespace maxpot;

namespace {

constexpr double kBoundsTol = 1e-6;
constexpr double kPotencyTol = 1e-4;
constexpr double kCurveTol = 1e-6;
constexpr double kExpectedTol = 5e-3;
constexpr double kBestTol = 1e-6;
constexpr double kTpTol = 1e-6;
constexpr double kPrunedTol = 1e-6;
constexpr double kOracleTol = 1e-4;
constexpr double kIdentityTol = 1e-9;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [" << what << "]";
        }
    }
    void near(double got, double want, double tol, const std::string& what) {
        if (!(std::abs(got - want) <= tol)) {
            pass = false;
            detail << " [" << what << ": got " << got << ", want " << want << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Fig1a {
    Admg g = read_graph(testing::data("fig1a.graph"));
    JointDistribution p = read_distribution(g, testing::data("fig1a.dist"));
    Query q = read_query(g, testing::data("fig1a.query"));
    std::vector<Experiment> e = read_experiments(g, testing::data("fig1a.exp"));

    std::vector<std::vector<Experiment>> subsets() const { return {{e[0]}, {e[1]}, {e[0], e[1]}}; }
};

void c1(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Fig1a f;
    ProgramContext ctx(f.g, f.p);
    const auto b = observational_bounds(ctx, f.q);
    const double t = seconds_since(t0);
    o.near(b.lower, 0.0, kBoundsTol, "L");
    o.near(b.upper, 0.6, kBoundsTol, "U");
    o.expect(t < 1.0, "time");
    o.detail << " L=" << b.lower << " U=" << b.upper << " t=" << t << "s";
}

void c2(Outcome& o) {
    Fig1a f;
    ProgramContext ctx(f.g, f.p);
    const auto r1 = cell_range(ctx, free_cells(f.g, f.e[0]).front());
    const auto r2 = cell_range(ctx, free_cells(f.g, f.e[1]).front());
    o.near(r1.lower, 0.2, kBoundsTol, "a1 low");
    o.near(r1.upper, 0.9, kBoundsTol, "a1 high");
    o.near(r2.lower, 0.3, kBoundsTol, "a2 low");
    o.near(r2.upper, 0.6, kBoundsTol, "a2 high");
    o.detail << " a1=[" << r1.lower << "," << r1.upper << "] a2=[" << r2.lower << "," << r2.upper << "]";
}

void c3(Outcome& o) {
    Fig1a f;
    ProgramContext ctx(f.g, f.p);
    const auto base = observational_bounds(ctx, f.q);
    const double pot[] = {0.1, 0.1, 0.2}, width[] = {0.5, 0.5, 0.4};
    const auto s = f.subsets();
    for (std::size_t i = 0; i < 3; ++i) {
        const auto r = evaluate_potency(ctx, f.q, s[i], base);
        o.near(r.potency, pot[i], kPotencyTol, "pot " + std::to_string(i));
        o.near(r.width, width[i], kPotencyTol, "width " + std::to_string(i));
        o.detail << " " << r.potency << "/" << r.width;
    }
}

void c4(Outcome& o) {
    Fig1a f;
    ProgramContext ctx(f.g, f.p);
    const auto w1 = width_curve(ctx, f.q, free_cells(f.g, f.e[0]).front(), std::vector<double>{0.3, 0.55, 0.8});
    const auto w2 = width_curve(ctx, f.q, free_cells(f.g, f.e[1]).front(), std::vector<double>{0.35, 0.45, 0.55});
    const double e1[] = {0.3, 0.5, 0.3}, e2[] = {0.45, 0.5, 0.45};
    for (std::size_t i = 0; i < 3; ++i) {
        o.near(w1[i].width(), e1[i], kCurveTol, "a1 at " + std::to_string(w1[i].p));
        o.near(w2[i].width(), e2[i], kCurveTol, "a2 at " + std::to_string(w2[i].p));
    }
    o.detail << " a1: " << w1[0].width() << "," << w1[1].width() << "," << w1[2].width() << " a2: " << w2[0].width()
             << "," << w2[1].width() << "," << w2[2].width();
}

void c5(Outcome& o) {
    Fig1a f;
    ProgramContext ctx(f.g, f.p);
    const double ex[] = {0.371, 0.467, 0.238}, best[] = {0.2, 0.4, 0.0};
    const auto s = f.subsets();
    for (std::size_t i = 0; i < 3; ++i) {
        const auto e = alt_width(ctx, f.q, s[i], Criterion::expected);
        const auto b = alt_width(ctx, f.q, s[i], Criterion::best_case);
        o.near(e.width, ex[i], kExpectedTol, "expected " + std::to_string(i));
        o.near(b.width, best[i], kBestTol, "best " + std::to_string(i));
        o.detail << " " << e.width << "/" << b.width;
    }
    const auto r = realized_bounds(ctx, f.q, free_cells(f.g, s[2]), {0.2, 0.6});
    o.expect(r.has_value(), "(0.2,0.6) feasible");
    if (r) o.near(r->width(), 0.0, kBestTol, "width at (0.2,0.6)");
}

void c6(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Fig1a f;
    ProgramContext ctx(f.g, f.p);
    const auto s1 = solve_max_potency(ctx, f.q, f.e, CostModel::additive(f.e, 1));
    const auto s2 = solve_max_potency(ctx, f.q, f.e, CostModel::additive(f.e, 2));
    const double t = seconds_since(t0);
    o.expect(s1.subset.size() == 1, "B=1 picks one experiment");
    o.near(s1.potency, 0.1, kPotencyTol, "B=1 potency");
    o.expect(s2.subset == std::vector<int>{0, 1}, "B=2 picks {a1,a2}");
    o.near(s2.potency, 0.2, kPotencyTol, "B=2 potency");
    o.expect(t < 5.0, "time");
    o.detail << " B=1 pot=" << s1.potency << " B=2 pot=" << s2.potency << " t=" << t << "s";
}

void c7(Outcome& o) {
    for (int k = 1; k <= 5; ++k) {
        const double v = 0.02 * k;
        const auto r = tp_instance({achievable_cell(v)}, {1.0}, 1.0);
        ProgramContext ctx(r.graph, r.distribution);
        const auto pot = evaluate_potency(ctx, r.query, r.experiments);
        o.near(pot.potency, v, kTpTol, "pot at v=" + std::to_string(v));
        const double edges[] = {1 - 8 * v, 1 - 5 * v, 1 - 4 * v, 1 - v};
        std::vector<double> pts;
        for (int b = 0; b < 3; ++b)
            for (int j = 0; j < 10; ++j) pts.push_back(edges[b] + (edges[b + 1] - edges[b]) * (j + 0.5) / 10);
        const auto curve = width_curve(ctx, r.query, free_cells(r.graph, r.experiments[0]).front(), pts);
        double err = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            err = std::max(err, std::abs(curve[i].width() - tp_width_curve(v, pts[i])));
        o.near(err, 0.0, kTpTol, "curve at v=" + std::to_string(v));
        o.detail << " v=" << v << ":" << pot.potency;
    }
}

void c8(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    int instances = 0, mismatches = 0;
    for (int code = 0; code < 729; ++code)
        for (int budget = 1; budget <= 4; ++budget) {
            KnapsackInstance k;
            for (int i = 0, c = code; i < 3; ++i, c /= 9) {
                k.values.push_back(1 + c % 3);
                k.weights.push_back(1 + c / 3 % 3);
            }
            k.budget = budget;
            // brute-force knapsack optima
            std::set<unsigned> ko, po;
            double kbest = -1, pbest = -1;
            const auto r = knapsack_to_max_potency(k);
            ProgramContext ctx(r.graph, r.distribution);
            const auto base = observational_bounds(ctx, r.query);
            for (unsigned m = 0; m < 8; ++m) {
                double v = 0, w = 0;
                std::vector<Experiment> s;
                for (int i = 0; i < 3; ++i)
                    if (m >> i & 1) {
                        v += k.values[static_cast<std::size_t>(i)];
                        w += k.weights[static_cast<std::size_t>(i)];
                        s.push_back(r.experiments[static_cast<std::size_t>(i)]);
                    }
                if (w > k.budget) continue;
                if (v > kbest) kbest = v, ko.clear();
                if (v == kbest) ko.insert(m);
                const double pot = s.empty() ? 0.0 : evaluate_potency(ctx, r.query, s, base).potency;
                if (pot > pbest + 1e-7) pbest = pot, po.clear();
                if (std::abs(pot - pbest) <= 1e-7) po.insert(m);
            }
            const auto sol = solve_max_potency(ctx, r.query, r.experiments, r.costs);
            unsigned pick = 0;
            for (int i : sol.subset) pick |= 1u << i;
            if (ko != po || !ko.count(pick)) ++mismatches;
            ++instances;
        }
    const double t = seconds_since(t0);
    o.expect(mismatches == 0, std::to_string(mismatches) + " mismatching instances");
    o.expect(t < 60.0, "time");
    o.detail << " instances=" << instances << " t=" << t << "s";
}

void c9(Outcome& o) {
    const auto g = read_graph(testing::data("fig1b.graph"));
    const auto q = read_query(g, testing::data("fig1b.query"));
    const auto e = read_experiments(g, testing::data("fig1b.exp"));
    const auto src = interception_sources(g, district_hull(g, q));
    o.expect(src.latents == std::vector<int>{0, 1} && src.own_noise.empty(), "R* = {R1,R2}");
    const auto set = [&](const char* n) { return NodeSet(g.size(), {g.id(n)}); };
    o.expect(all_paths_intercepted(g, src, set("D"), set("C")), "P(D|do(C)) intercepted");
    o.expect(!all_paths_intercepted(g, src, set("D"), set("B")), "P(D|do(B)) kept");
    const auto v = get_useless(g, q, e);
    std::vector<std::string> pruned, by_id;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i].verdict != Verdict::kept) pruned.push_back(e[i].label);
        if (v[i].verdict == Verdict::pruned_id) by_id.push_back(e[i].label);
    }
    o.expect(pruned == std::vector<std::string>{"a1", "a2", "a5", "a6"}, "pruned set");
    o.expect(by_id == std::vector<std::string>{"a2"}, "ID-pruned");
    o.detail << " pruned=" << pruned.size() << " id=" << by_id.size();
}

void c10(Outcome& o) {
    const auto g = read_graph(testing::data("nhanes.graph"));
    const auto q = read_query(g, testing::data("nhanes.query"));
    const auto e = read_experiments(g, testing::data("nhanes.exp"));
    const auto v = get_useless(g, q, e);
    o.expect(v[0].verdict == Verdict::pruned_id, "P(X|do(B)) by ID");
    o.expect(v[1].verdict == Verdict::pruned_interception, "P(B|do(A)) by interception");
    for (std::size_t i = 0; i < v.size(); ++i) o.detail << " " << e[i].label << "=" << to_string(v[i].verdict);
}

bool small_districts(const Admg& g, double log2_cap) {
    ResponseSpace s(g);
    for (std::size_t k = 0; k < s.num_districts(); ++k)
        if (s.log2_district_size(k) > log2_cap + 1e-9) return false;
    return true;
}

void c11(Outcome& o) {
    // (a) pruned experiments carry no potency
    {
        Rng rng(31);
        int pruned = 0;
        double worst = 0;
        for (int t = 0; t < 200 && pruned < 40; ++t) {
            const auto g = generate_er(3 + t % 2, 0.5, 0.3, 7000 + static_cast<std::uint64_t>(t));
            if (!small_districts(g, 8)) continue;
            const auto q = sample_query(g, rng);
            if (!q) continue;
            const auto m = testing::random_scm(g, rng);
            ProgramContext ctx(g, m.p);
            std::vector<Experiment> ex;
            for (int i = 0; i < 6; ++i)
                if (auto e = sample_experiment(g, rng, 0.3)) ex.push_back(*e);
            const auto v = get_useless(g, *q, ex);
            const auto base = observational_bounds(ctx, *q);
            for (std::size_t i = 0; i < ex.size(); ++i) {
                if (v[i].verdict == Verdict::kept) continue;
                worst = std::max(worst, evaluate_potency(ctx, *q, {ex[i]}, base).potency);
                ++pruned;
            }
        }
        o.expect(pruned >= 20, "(a) too few pruned experiments");
        o.expect(worst <= kPrunedTol, "(a) pruned potency " + std::to_string(worst));
        o.detail << " (a) n=" << pruned << " max=" << worst;
    }
    // (b) identified experiments are inert
    {
        Rng rng(8);
        int pairs = 0;
        double worst = 0;
        for (int t = 0; t < 400 && pairs < 20; ++t) {
            const auto g = generate_er(4, 0.5, 0.3, 9100 + static_cast<std::uint64_t>(t));
            if (!small_districts(g, 8)) continue;
            const auto q = sample_query(g, rng);
            if (!q) continue;
            std::optional<Experiment> e;
            for (int i = 0; i < 20 && !e; ++i) {
                auto c = sample_experiment(g, rng, 0.0);
                if (!c) continue;
                const auto& w = c->statement.worlds[0];
                if (is_identifiable(g, outcome_nodes(g, w), intervention_nodes(g, w))) e = c;
            }
            if (!e) continue;
            const auto m = testing::random_scm(g, rng);
            ProgramContext ctx(g, m.p);
            worst = std::max(worst, std::abs(evaluate_potency(ctx, *q, {*e}).potency));
            ++pairs;
        }
        o.expect(pairs == 20, "(b) only " + std::to_string(pairs) + " pairs");
        o.expect(worst <= kPrunedTol, "(b) identified potency " + std::to_string(worst));
        o.detail << " (b) n=" << pairs << " max=" << worst;
    }
    // (c) program optimum equals the vertex-enumeration oracle
    {
        Rng rng(101);
        int done = 0;
        double err = 0;
        while (done < 50) {
            const auto g = testing::random_single_district(3, 2, rng);
            const auto q = sample_query(g, rng);
            if (!q) continue;
            const auto m = testing::random_scm(g, rng);
            ProgramContext ctx(g, m.p);
            std::vector<OutcomeCell> cells;
            if (auto e = sample_experiment(g, rng, 0.0)) {
                cells = free_cells(g, *e);
                for (auto& c : cells) c.value = testing::truth(g, m, c.statement);
            }
            const auto lp = solve_bounds(add_experiments(ctx, build_base(ctx, *q), cells));
            const auto bf = brute_force_bounds(g, m.p, *q, cells);
            err = std::max({err, std::abs(lp.lower - bf.lower), std::abs(lp.upper - bf.upper)});
            ++done;
        }
        o.expect(err <= kOracleTol, "(c) oracle gap " + std::to_string(err));
        o.detail << " (c) n=" << done << " gap=" << err;
    }
    // (d) district factorization on the two-district chain
    {
        const auto g = read_graph(testing::data("two_district_chain.graph"));
        ResponseSpace s(g);
        Rng rng(11);
        const auto m = testing::random_scm(g, rng);
        CFactors cf(g, m.p);
        int ok = 0;
        for (std::size_t vi = 0; vi < 16; ++vi) {
            std::vector<int> v(4);
            for (std::size_t i = 0; i < 4; ++i) v[i] = static_cast<int>(vi >> (3 - i) & 1);
            World w;
            for (std::size_t i = 0; i < 4; ++i) w.outcomes.push_back({static_cast<NodeId>(i), v[i]});
            const auto full = compatible_set(g, s, Statement{{w}});
            std::vector<ConfigIndex> product;
            for (auto r0 : district_set(s, 0, v))
                for (auto r1 : district_set(s, 1, v)) product.push_back(s.encode({r0, r1}));
            std::sort(product.begin(), product.end());
            bool good = full == product;
            double lhs = 1, rhs = 1;
            for (std::size_t k = 0; k < 2; ++k) {
                double sum = 0;
                for (auto r : district_set(s, k, v)) sum += m.q[k][r];
                const auto qk = cf.q(k, v);
                good = good && qk.defined && std::abs(qk.value - sum) <= kIdentityTol;
                lhs *= qk.value;
                rhs *= sum;
            }
            good = good && std::abs(lhs - m.p.prob(v)) <= kIdentityTol && std::abs(rhs - m.p.prob(v)) <= kIdentityTol;
            ok += good;
        }
        o.expect(ok == 16, "(d) " + std::to_string(16 - ok) + " assignments fail");
        o.detail << " (d) " << ok << "/16";
    }
}

void c12(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepConfig cfg;
    cfg.sizes = {10};
    cfg.densities = {0.5, 2.0};
    cfg.sims = 20;
    cfg.candidates = 50;
    const auto a = run_er_sweep(cfg);
    const auto b = run_er_sweep(cfg);
    const double t = seconds_since(t0);
    o.expect(a.settings.size() == 2, "two settings");
    if (a.settings.size() == 2) {
        o.expect(a.settings[0].interception.mean > a.settings[1].interception.mean, "interception ordering");
        o.detail << " int(0.5)=" << a.settings[0].interception.mean << " int(2.0)=" << a.settings[1].interception.mean;
    }
    bool sums = true;
    for (const auto& r : a.records)
        if (!r.skipped)
            sums = sums && std::abs(r.total_fraction() - (r.id_fraction() + r.interception_fraction())) <= 1e-12 &&
                   r.pruned_id + r.pruned_int + r.kept == r.candidates;
    o.expect(sums, "total = id + interception");
    o.expect(format_records_csv(a) == format_records_csv(b), "csv differs between runs");
    o.expect(t < 300.0, "time");
    o.detail << " t=" << t << "s";
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<void(Outcome&)>> checks[] = {
        {"fig1a observational bounds", c1},
        {"fig1a feasible cell ranges", c2},
        {"fig1a worst-case potencies", c3},
        {"fig1a width curves", c4},
        {"fig1a expected and best-case widths", c5},
        {"fig1a max-potency under budgets", c6},
        {"treatment-outcome cells", c7},
        {"knapsack equivalence", c8},
        {"fig1b pruning traces", c9},
        {"nhanes pruning", c10},
        {"property suites", c11},
        {"ER sweep", c12},
    };
    int failed = 0, idx = 0;
    for (const auto& [name, fn] : checks) {
        ++idx;
        Outcome o;
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        failed += !o.pass;
        std::printf("%s %2d %s:%s\n", o.pass ? "PASS" : "FAIL", idx, name, o.detail.str().c_str());
    }
    std::printf("%d/%d criteria passed\n", idx - failed, idx);
    return failed ? 1 : 0;
}
