#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "maxpot/response.hpp"
#include "support.hpp"

using namespace maxpot;

namespace {

Statement observe(const Admg& g, const std::vector<int>& v) {
    World w;
    for (std::size_t i = 0; i < g.size(); ++i) w.outcomes.push_back({static_cast<NodeId>(i), v[i]});
    return {{w}};
}

std::vector<int> assignment(const Admg& g, std::size_t index) {
    std::vector<int> v(g.size());
    for (std::size_t i = g.size(); i-- > 0;) {
        v[i] = static_cast<int>(index % 2);
        index /= 2;
    }
    return v;
}

}  // namespace

TEST_SUITE("response") {
    TEST_CASE("district sizes") {
        const auto a = read_graph(testing::data("fig1a.graph"));
        ResponseSpace sa(a);
        REQUIRE(sa.num_districts() == 1);
        CHECK(sa.district_size(0) == 8);

        const auto b = read_graph(testing::data("fig1b.graph"));
        ResponseSpace sb(b);
        REQUIRE(sb.num_districts() == 3);
        CHECK(sb.district_size(0) == 2 * 4 * 4);
        CHECK(sb.district_size(1) == 4 * 16 * 4);
        CHECK(sb.district_size(2) == 4);
    }

    TEST_CASE("outcome digits of the treatment-outcome pair") {
        const auto g = read_graph(testing::data("fig1a.graph"));
        ResponseSpace s(g);
        const NodeId y = g.id("Y");
        // Y's function index reads f(x=0) as the high digit: never, complier, defier, always
        const int expect[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
        for (int fy = 0; fy < 4; ++fy)
            for (int x = 0; x < 2; ++x) CHECK(s.output(y, static_cast<ConfigIndex>(fy), x) == expect[fy][x]);
        // X is the leading digit of the district configuration
        CHECK(s.output(g.id("X"), 4, 0) == 1);
        CHECK(s.output(g.id("X"), 3, 0) == 0);
    }

    TEST_CASE("oversized districts are refused") {
        Admg::Builder b;
        for (int i = 0; i < 6; ++i) b.add_node("N" + std::to_string(i));
        for (int i = 0; i < 5; ++i) b.add_edge(i, 5);
        b.add_confounder(0, 5);
        const auto g = std::move(b).build();
        ResponseSpace s(g);
        CHECK_THROWS_AS(s.district_size(0), CapExceeded);
    }

    TEST_CASE("evaluation under intervention") {
        const auto g = read_graph(testing::data("fig1a.graph"));
        ResponseSpace s(g);
        // X = 1 always, Y complier
        const std::vector<ConfigIndex> r{4 + 1};
        CHECK(evaluate(g, s, r) == std::vector<int>{1, 1});
        CHECK(evaluate(g, s, r, Assignment{{g.id("X"), 0}}) == std::vector<int>{0, 0});
    }

    TEST_CASE("parallel compatible set matches the serial reference") {
        const auto g = read_graph(testing::data("fig1b.graph"));
        ResponseSpace s(g);
        const auto st = parse_statement(g, "P(Y=1, C=0 | do(M=1))", false);
        const auto par = compatible_set(g, s, st);
        const auto ser = compatible_set_serial(g, s, st);
        CHECK(par == ser);
        CHECK(std::is_sorted(par.begin(), par.end()));
        CHECK(!par.empty());
    }

    TEST_CASE("cartesian decomposition on the two-district chain") {
        const auto g = read_graph(testing::data("two_district_chain.graph"));
        ResponseSpace s(g);
        REQUIRE(s.num_districts() == 2);
        for (std::size_t vi = 0; vi < 16; ++vi) {
            const auto v = assignment(g, vi);
            const auto full = compatible_set(g, s, observe(g, v));
            std::vector<ConfigIndex> product;
            for (auto r0 : district_set(s, 0, v))
                for (auto r1 : district_set(s, 1, v)) product.push_back(s.encode({r0, r1}));
            std::sort(product.begin(), product.end());
            CHECK(full == product);
            CHECK(district_compatible_set(g, s, {0, 1}, v) == product);
        }
    }

    TEST_CASE("c-factors equal response sums on the two-district chain") {
        const auto g = read_graph(testing::data("two_district_chain.graph"));
        ResponseSpace s(g);
        Rng rng(11);
        for (int trial = 0; trial < 5; ++trial) {
            const auto m = testing::random_scm(g, rng);
            CFactors cf(g, m.p);
            for (std::size_t vi = 0; vi < 16; ++vi) {
                const auto v = assignment(g, vi);
                double sum[2] = {0, 0};
                for (std::size_t k = 0; k < 2; ++k)
                    for (auto r : district_set(s, k, v)) sum[k] += m.q[k][r];
                for (int mask = 1; mask < 4; ++mask) {
                    double lhs = 1, rhs = 1;
                    for (std::size_t k = 0; k < 2; ++k) {
                        if (!(mask >> k & 1)) continue;
                        const auto q = cf.q(k, v);
                        REQUIRE(q.defined);
                        lhs *= q.value;
                        rhs *= sum[k];
                    }
                    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
                }
            }
        }
    }

    TEST_CASE("c-factor matches a direct product of conditionals") {
        const auto g = read_graph(testing::data("fig1b.graph"));
        Rng rng(5);
        std::vector<double> probs(128);
        for (auto& x : probs) x = rng.uniform() + 0.01;
        double tot = 0;
        for (double x : probs) tot += x;
        for (auto& x : probs) x /= tot;
        JointDistribution p(std::vector<int>(7, 2), probs);
        CFactors cf(g, p);
        const auto part = districts(g);
        const auto& topo = g.topological_order();
        for (std::size_t vi = 0; vi < 128; vi += 9) {
            const auto v = p.assignment(vi);
            for (std::size_t k = 0; k < part.size(); ++k) {
                double direct = 1;
                for (std::size_t t = 0; t < topo.size(); ++t) {
                    if (!part[k].observed.contains(topo[t])) continue;
                    double num = 0, den = 0;
                    for (std::size_t i = 0; i < p.size(); ++i) {
                        const auto u = p.assignment(i);
                        bool prefix = true;
                        for (std::size_t j = 0; j < t; ++j) prefix = prefix && u[topo[j]] == v[topo[j]];
                        if (!prefix) continue;
                        den += p[i];
                        if (u[topo[t]] == v[topo[t]]) num += p[i];
                    }
                    direct *= num / den;
                }
                CHECK(cf.q(k, v).value == doctest::Approx(direct).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("induced distribution agrees with the ground truth sum") {
        const auto g = read_graph(testing::data("two_district_chain.graph"));
        Rng rng(3);
        const auto m = testing::random_scm(g, rng);
        double tot = 0;
        for (std::size_t i = 0; i < m.p.size(); ++i) {
            tot += m.p[i];
            CHECK(m.p[i] == doctest::Approx(testing::truth(g, m, observe(g, m.p.assignment(i)))).epsilon(1e-12));
        }
        CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("distribution files") {
        const auto g = read_graph(testing::data("fig1a.graph"));
        const auto p = read_distribution(g, testing::data("fig1a.dist"));
        CHECK(p.prob({1, 1}) == doctest::Approx(0.2));
        CHECK(p.prob({0, 0}) == doctest::Approx(0.4));
        const auto partial = parse_distribution(g, "X Y\n1 1 0.5\n0 0 0.5\n");
        CHECK(partial.prob({1, 0}) == 0.0);
        CHECK_THROWS_AS(parse_distribution(g, "X Y\n1 1 0.5\n1 1 0.5\n"), InputError);
        CHECK_THROWS_AS(parse_distribution(g, "X Y\n1 1 0.6\n0 0 0.5\n"), InputError);
        CHECK_THROWS_AS(parse_distribution(g, "X Y\n1 1 -0.5\n0 0 1.5\n"), InputError);
        CHECK_THROWS_AS(parse_distribution(g, "X\n1 1\n"), InputError);
        CHECK_THROWS_AS(parse_distribution(g, "X Y\n1 2 1.0\n"), InputError);
        const auto again = parse_distribution(g, format_distribution(g, p));
        CHECK(again.probabilities() == p.probabilities());
    }
}
