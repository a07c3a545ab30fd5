#include <doctest.h>

#include <cmath>
#include <limits>

#include "maxpot/brute_force.hpp"
#include "maxpot/potency.hpp"
#include "support.hpp"

using namespace maxpot;

namespace {

struct Fig1a {
    Admg g = read_graph(testing::data("fig1a.graph"));
    JointDistribution p = read_distribution(g, testing::data("fig1a.dist"));
    Query q = read_query(g, testing::data("fig1a.query"));
    std::vector<Experiment> e = read_experiments(g, testing::data("fig1a.exp"));
};

std::vector<Experiment> pick(const std::vector<Experiment>& e, std::initializer_list<int> idx) {
    std::vector<Experiment> out;
    for (int i : idx) out.push_back(e[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace

TEST_SUITE("potency") {
    TEST_CASE("worst-case potency on fig1a") {
        Fig1a f;
        ProgramContext ctx(f.g, f.p);
        const auto base = observational_bounds(ctx, f.q);
        CHECK(base.lower == doctest::Approx(0).epsilon(1e-9));
        CHECK(base.upper == doctest::Approx(0.6).epsilon(1e-9));
        const double pot[] = {0.1, 0.1, 0.2}, width[] = {0.5, 0.5, 0.4};
        const std::vector<std::vector<Experiment>> subsets{pick(f.e, {0}), pick(f.e, {1}), pick(f.e, {0, 1})};
        for (std::size_t i = 0; i < 3; ++i) {
            const auto r = evaluate_potency(ctx, f.q, subsets[i], base);
            CHECK(r.potency == doctest::Approx(pot[i]).epsilon(1e-6));
            CHECK(r.width == doctest::Approx(width[i]).epsilon(1e-6));
            CHECK(r.status == SolveStatus::exact);
            // independent oracle over the full response space
            const auto cells = free_cells(f.g, subsets[i]);
            CHECK(brute_force_worst_width(f.g, f.p, f.q, cells) == doctest::Approx(width[i]).epsilon(1e-6));
        }
    }

    TEST_CASE("cell ranges and width curves") {
        Fig1a f;
        ProgramContext ctx(f.g, f.p);
        const auto c1 = free_cells(f.g, f.e[0]).front();
        const auto c2 = free_cells(f.g, f.e[1]).front();
        const auto r1 = cell_range(ctx, c1), r2 = cell_range(ctx, c2);
        CHECK(r1.lower == doctest::Approx(0.2));
        CHECK(r1.upper == doctest::Approx(0.9));
        CHECK(r2.lower == doctest::Approx(0.3));
        CHECK(r2.upper == doctest::Approx(0.6));
        const auto w1 = width_curve(ctx, f.q, c1, std::vector<double>{0.3, 0.55, 0.8});
        CHECK(w1[0].width() == doctest::Approx(0.3).epsilon(1e-9));
        CHECK(w1[1].width() == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(w1[2].width() == doctest::Approx(0.3).epsilon(1e-9));
        const auto w2 = width_curve(ctx, f.q, c2, std::vector<double>{0.35, 0.45, 0.55});
        CHECK(w2[0].width() == doctest::Approx(0.45).epsilon(1e-9));
        CHECK(w2[1].width() == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(w2[2].width() == doctest::Approx(0.45).epsilon(1e-9));
        const auto grid = width_curve(ctx, f.q, c1);
        CHECK(grid.size() == 201);
        CHECK(grid.front().p == doctest::Approx(0.2));
        CHECK(grid.back().p == doctest::Approx(0.9));
        // the curve's maximum is the worst-case width
        double top = 0;
        for (const auto& pt : grid) top = std::max(top, pt.width());
        CHECK(top == doctest::Approx(0.5).epsilon(1e-9));
        CHECK_THROWS_AS(width_curve(ctx, f.q, c1, std::vector<double>{0.95}), InputError);
    }

    TEST_CASE("expected and best-case widths on fig1a") {
        Fig1a f;
        ProgramContext ctx(f.g, f.p);
        const double expected[] = {0.371, 0.467, 0.238}, best[] = {0.2, 0.4, 0.0};
        const double worst[] = {0.5, 0.5, 0.4};
        const std::vector<std::vector<Experiment>> subsets{pick(f.e, {0}), pick(f.e, {1}), pick(f.e, {0, 1})};
        for (std::size_t i = 0; i < 3; ++i) {
            const auto e = alt_width(ctx, f.q, subsets[i], Criterion::expected);
            const auto b = alt_width(ctx, f.q, subsets[i], Criterion::best_case);
            CHECK(std::abs(e.width - expected[i]) < 5e-3);
            CHECK(std::abs(b.width - best[i]) < 1e-6);
            CHECK(b.width <= e.width + 1e-9);
            CHECK(e.width <= worst[i] + 1e-9);
            CHECK(e.potency == doctest::Approx(0.6 - e.width));
        }
        const auto both = free_cells(f.g, pick(f.e, {0, 1}));
        const auto r = realized_bounds(ctx, f.q, both, {0.2, 0.6});
        REQUIRE(r);
        CHECK(r->width() == doctest::Approx(0).epsilon(1e-9));
        // the two cells constrain disjoint units, so every corner of the box is reachable
        for (double a : {0.2, 0.9})
            for (double b : {0.3, 0.6}) CHECK(realized_bounds(ctx, f.q, both, {a, b}).has_value());
    }

    TEST_CASE("witness pins reach the worst-case width") {
        Fig1a f;
        ProgramContext ctx(f.g, f.p);
        for (const auto& s : {pick(f.e, {0}), pick(f.e, {1}), pick(f.e, {0, 1})}) {
            const auto w = width_witness(ctx, f.q, s);
            const auto r = realized_bounds(ctx, f.q, free_cells(f.g, s), w);
            REQUIRE(r);
            CHECK(r->width() >= evaluate_potency(ctx, f.q, s).width - 1e-6);
        }
    }

    TEST_CASE("max potency under budgets") {
        Fig1a f;
        ProgramContext ctx(f.g, f.p);
        const auto s1 = solve_max_potency(ctx, f.q, f.e, CostModel::additive(f.e, 1));
        CHECK(s1.subset == std::vector<int>{0});
        CHECK(s1.potency == doctest::Approx(0.1).epsilon(1e-6));
        const auto s2 = solve_max_potency(ctx, f.q, f.e, CostModel::additive(f.e, 2));
        CHECK(s2.subset == std::vector<int>{0, 1});
        CHECK(s2.potency == doctest::Approx(0.2).epsilon(1e-6));
        CHECK(s2.enumerated == 4);
        const auto serial = solve_max_potency_serial(ctx, f.q, f.e, CostModel::additive(f.e, 2));
        CHECK(serial.subset == s2.subset);
        CHECK(serial.potency == s2.potency);
        CHECK(serial.evaluated == s2.evaluated);
        const auto none = solve_max_potency(ctx, f.q, f.e, CostModel::additive(f.e, 0.5));
        CHECK(none.subset.empty());
        CHECK(none.potency == 0);
    }

    TEST_CASE("cost models") {
        Fig1a f;
        auto c = CostModel::additive(f.e, 3);
        CHECK(c.cost({0, 1}) == 2);
        c.overrides[{0, 1}] = 1.5;
        CHECK(c.cost({0, 1}) == 1.5);
        c.costs[1] = std::numeric_limits<double>::infinity();
        CHECK(std::isinf(c.cost({1})));
        ProgramContext ctx(f.g, f.p);
        c.budget = 1;
        const auto s = solve_max_potency(ctx, f.q, f.e, c);
        CHECK(s.subset == std::vector<int>{0});
        CHECK(s.skipped >= 1);
        c.budget = -1;
        CHECK_THROWS_AS(solve_max_potency(ctx, f.q, f.e, c), InputError);
    }

    TEST_CASE("subset order and search cap") {
        const auto s = ordered_subsets(3);
        const std::vector<std::vector<int>> expect{{}, {0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
        CHECK(s == expect);
        Fig1a f;
        ProgramContext ctx(f.g, f.p);
        MaxPotencyOptions o;
        o.max_search = 1;
        CHECK_THROWS_AS(solve_max_potency(ctx, f.q, f.e, CostModel::additive(f.e, 2), o), CapExceeded);
    }

    TEST_CASE("family experiments drop one redundant cell per group") {
        const auto g = read_graph(testing::data("fig1b.graph"));
        const auto e = read_experiments(g, testing::data("fig1b.exp"));
        CHECK(expand(g, e[0]).size() == 4);
        CHECK(free_cells(g, e[0]).size() == 3);
        CHECK(free_cells(g, e[5]).size() == 1);
    }

    TEST_CASE("pruned experiments never help") {
        Rng rng(31);
        int pruned = 0;
        for (int t = 0; t < 60 && pruned < 25; ++t) {
            const int n = 3 + t % 2;
            const auto g = generate_er(n, 0.5, 0.3, 7000 + static_cast<std::uint64_t>(t));
            ResponseSpace space(g);
            bool small = true;
            for (std::size_t k = 0; k < space.num_districts(); ++k)
                small = small && space.log2_district_size(k) <= 8.01;
            if (!small) continue;
            const auto q = sample_query(g, rng);
            if (!q) continue;
            const auto m = testing::random_scm(g, rng);
            ProgramContext ctx(g, m.p);
            std::vector<Experiment> ex;
            for (int i = 0; i < 6; ++i)
                if (auto e = sample_experiment(g, rng, 0.3)) ex.push_back(*e);
            const auto verdicts = get_useless(g, *q, ex);
            const auto base = observational_bounds(ctx, *q);
            for (std::size_t i = 0; i < ex.size(); ++i) {
                if (verdicts[i].verdict == Verdict::kept) continue;
                const auto r = evaluate_potency(ctx, *q, {ex[i]}, base);
                CHECK_MESSAGE(r.potency <= 1e-6, format_graph(g) << format_query(g, *q) << " / "
                                                                 << format_statement(g, ex[i].statement));
                CHECK(r.potency >= 0);
                ++pruned;
            }
        }
        CHECK(pruned >= 20);
    }

    TEST_CASE("identified experiments are inert") {
        Rng rng(8);
        int pairs = 0;
        for (int t = 0; t < 400 && pairs < 20; ++t) {
            const auto g = generate_er(4, 0.5, 0.3, 9100 + static_cast<std::uint64_t>(t));
            ResponseSpace space(g);
            bool small = true;
            for (std::size_t k = 0; k < space.num_districts(); ++k)
                small = small && space.log2_district_size(k) <= 8.01;
            if (!small) continue;
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
            const auto base = observational_bounds(ctx, *q);
            const auto r = evaluate_potency(ctx, *q, {*e}, base);
            CHECK_MESSAGE(std::abs(r.potency) <= 1e-6, format_graph(g) << format_query(g, *q) << " / "
                                                                        << format_statement(g, e->statement));
            // the realized value is forced, so pinning it changes nothing
            auto cells = free_cells(g, *e);
            std::vector<double> truth;
            for (const auto& c : cells) truth.push_back(testing::truth(g, m, c.statement));
            const auto rb = realized_bounds(ctx, *q, cells, truth);
            REQUIRE(rb);
            CHECK(rb->width() == doctest::Approx(base.width()).epsilon(1e-6));
            ++pairs;
        }
        CHECK(pairs == 20);
    }

    TEST_CASE("criterion names") {
        CHECK(parse_criterion("worst") == Criterion::worst_case);
        CHECK(parse_criterion("expected") == Criterion::expected);
        CHECK(parse_criterion("best") == Criterion::best_case);
        CHECK_THROWS_AS(parse_criterion("median"), InputError);
        CHECK(std::string(to_string(Criterion::expected)) == "expected");
    }
}
