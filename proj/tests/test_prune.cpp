#include <doctest.h>

#include <functional>

#include "maxpot/brute_force.hpp"
#include "maxpot/prune.hpp"
#include "support.hpp"

using namespace maxpot;

namespace {

NodeSet nodes(const Admg& g, std::initializer_list<const char*> names) {
    NodeSet s(g.size());
    for (const char* n : names) s.insert(g.id(n));
    return s;
}

// Every directed path from a source child to W, listed explicitly, meets Z.
bool intercepted_by_paths(const Admg& g, const InterceptionSources& src, const NodeSet& w, const NodeSet& z) {
    std::vector<NodeId> starts;
    for (int e : src.latents) {
        starts.push_back(g.bidirected_edges()[static_cast<std::size_t>(e)].first);
        starts.push_back(g.bidirected_edges()[static_cast<std::size_t>(e)].second);
    }
    for (NodeId v : src.own_noise.to_vector()) starts.push_back(v);
    bool escaped = false;
    std::function<void(NodeId, bool)> walk = [&](NodeId v, bool hit) {
        hit = hit || z.contains(v);
        if (w.contains(v) && !hit) escaped = true;
        for (NodeId c : g.children(v)) walk(c, hit);
    };
    for (NodeId s : starts) walk(s, false);
    return !escaped;
}

// Identifiability read off the bounds: under a generic law an effect is
// identified exactly when every cell of P(W | do(Z)) has a point interval.
bool identified_by_bounds(const Admg& g, const testing::Scm& m, const NodeSet& w, const NodeSet& z) {
    const auto wv = w.to_vector(), zv = z.to_vector();
    const auto n = wv.size() + zv.size();
    for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
        World world;
        std::size_t bit = 0;
        for (NodeId v : wv) world.outcomes.push_back({v, static_cast<int>(code >> bit++ & 1)});
        for (NodeId v : zv) world.interventions.push_back({v, static_cast<int>(code >> bit++ & 1)});
        Query q;
        q.terms.push_back({1.0, Statement{{world}}});
        const auto b = brute_force_bounds(g, m.p, q);
        if (b.width() > 1e-6) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("prune") {
    TEST_CASE("interception traces on fig1b") {
        const auto g = read_graph(testing::data("fig1b.graph"));
        const auto q = read_query(g, testing::data("fig1b.query"));
        const auto src = interception_sources(g, district_hull(g, q));
        CHECK(src.latents == std::vector<int>{0, 1});
        CHECK(src.own_noise.empty());
        CHECK(all_paths_intercepted(g, src, nodes(g, {"D"}), nodes(g, {"C"})));
        CHECK_FALSE(all_paths_intercepted(g, src, nodes(g, {"D"}), nodes(g, {"B"})));
        CHECK_THROWS_AS(all_paths_intercepted(g, src, nodes(g, {"D"}), nodes(g, {"D"})), InputError);
    }

    TEST_CASE("six candidate pruning on fig1b") {
        const auto g = read_graph(testing::data("fig1b.graph"));
        const auto q = read_query(g, testing::data("fig1b.query"));
        const auto e = read_experiments(g, testing::data("fig1b.exp"));
        const auto v = get_useless(g, q, e);
        const Verdict expect[] = {Verdict::pruned_interception, Verdict::pruned_id, Verdict::kept,
                                  Verdict::kept, Verdict::pruned_interception, Verdict::pruned_interception};
        for (std::size_t i = 0; i < 6; ++i) CHECK(v[i].verdict == expect[i]);
        CHECK(v[1].identifiable == std::optional<bool>(true));
        CHECK_FALSE(v[5].identifiable.has_value());
        // the pruned set does not depend on the order
        const auto idf = get_useless(g, q, e, PruneOrder::id_first);
        for (std::size_t i = 0; i < 6; ++i)
            CHECK((idf[i].verdict == Verdict::kept) == (v[i].verdict == Verdict::kept));
        CHECK(idf[0].verdict == Verdict::pruned_id);
    }

    TEST_CASE("nhanes verdicts") {
        const auto g = read_graph(testing::data("nhanes.graph"));
        const auto q = read_query(g, testing::data("nhanes.query"));
        const auto e = read_experiments(g, testing::data("nhanes.exp"));
        const auto v = get_useless(g, q, e);
        CHECK(v[0].verdict == Verdict::pruned_id);
        CHECK(v[1].verdict == Verdict::pruned_interception);
        for (std::size_t i = 2; i < 6; ++i) CHECK(v[i].verdict == Verdict::kept);
    }

    TEST_CASE("classic identification cases") {
        const auto bow = read_graph(testing::data("fig1a.graph"));
        CHECK_FALSE(is_identifiable(bow, nodes(bow, {"Y"}), nodes(bow, {"X"})));
        CHECK(is_identifiable(bow, nodes(bow, {"X"}), nodes(bow, {"Y"})));
        const auto front = parse_graph("node X\nnode M\nnode Y\nedge X -> M\nedge M -> Y\nconf X <-> Y\n");
        CHECK(is_identifiable(front, nodes(front, {"Y"}), nodes(front, {"X"})));
        const auto back = parse_graph("node A\nnode B\nnode C\nedge A -> B\nedge B -> C\nconf A <-> C\n");
        CHECK(is_identifiable(back, nodes(back, {"C"}), nodes(back, {"B"})));
        const auto hedge =
            parse_graph("node X\nnode Z\nnode Y\nedge X -> Y\nedge Z -> Y\nconf X <-> Z\nconf Z <-> Y\n");
        CHECK_FALSE(is_identifiable(hedge, nodes(hedge, {"Y"}), nodes(hedge, {"X"})));
        const auto b = read_graph(testing::data("fig1b.graph"));
        CHECK(is_identifiable(b, nodes(b, {"Y", "M", "X"}), nodes(b, {"A", "B"})));
        CHECK_FALSE(is_identifiable(b, nodes(b, {"Y"}), nodes(b, {"M"})));
        const auto n = read_graph(testing::data("nhanes.graph"));
        CHECK(is_identifiable(n, nodes(n, {"X"}), nodes(n, {"B"})));
        CHECK_FALSE(is_identifiable(n, nodes(n, {"B"}), nodes(n, {"A"})));
    }

    TEST_CASE("identification agrees with bound widths on small graphs") {
        Rng rng(77);
        int checked = 0, positive = 0;
        for (int t = 0; t < 120; ++t) {
            const int n = 3 + t % 2;
            const auto g = generate_er(n, 0.5, 0.35, 500 + static_cast<std::uint64_t>(t));
            ResponseSpace space(g);
            bool small = true;
            for (std::size_t k = 0; k < space.num_districts(); ++k)
                small = small && space.log2_district_size(k) <= 4.01;
            if (!small || !testing::clique_districts(g)) continue;
            const auto m = testing::random_scm(g, rng);
            for (std::size_t wm = 1; wm < (std::size_t{1} << n); ++wm)
                for (std::size_t zm = 1; zm < (std::size_t{1} << n); ++zm) {
                    if (wm & zm) continue;
                    NodeSet w(g.size()), z(g.size());
                    for (int i = 0; i < n; ++i) {
                        if (wm >> i & 1) w.insert(i);
                        if (zm >> i & 1) z.insert(i);
                    }
                    if (w.count() + z.count() > 3) continue;
                    const bool id = is_identifiable(g, w, z);
                    CHECK_MESSAGE(id == identified_by_bounds(g, m, w, z),
                                  format_graph(g) << " W=" << format_nodes(g, w) << " Z=" << format_nodes(g, z));
                    ++checked;
                    positive += id;
                }
        }
        CHECK(checked > 50);
        CHECK(positive > 10);
        CHECK(positive < checked);
    }

    TEST_CASE("district-joint response types relax non-clique districts") {
        // V1 and V3 share a district but no latent, so the effect is
        // identified while the bounds still leave room.
        const auto g = parse_graph("node V1\nnode V2\nnode V3\nedge V1 -> V2\nedge V1 -> V3\n"
                                   "conf V1 <-> V2\nconf V2 <-> V3\n");
        CHECK(is_identifiable(g, nodes(g, {"V3"}), nodes(g, {"V1"})));
        Rng rng(3);
        const auto m = testing::random_scm(g, rng);
        const auto q = parse_query(g, "P(V3=1 | do(V1=1))");
        const auto b = brute_force_bounds(g, m.p, q);
        const double cond = m.p.prob({1, 0, 1}) + m.p.prob({1, 1, 1});
        const double marg = cond + m.p.prob({1, 0, 0}) + m.p.prob({1, 1, 0});
        CHECK(b.lower <= cond / marg + 1e-9);
        CHECK(b.upper >= cond / marg - 1e-9);
        CHECK(b.width() > 0.1);
    }

    TEST_CASE("interception agrees with explicit path enumeration") {
        Rng rng(5);
        for (int t = 0; t < 60; ++t) {
            const auto g = generate_er(7, 0.35, 0.2, 900 + static_cast<std::uint64_t>(t));
            const auto q = sample_query(g, rng);
            if (!q) continue;
            const auto src = interception_sources(g, district_hull(g, *q));
            for (int i = 0; i < 10; ++i) {
                const auto e = sample_experiment(g, rng, 0.0);
                if (!e) continue;
                const auto& w = e->statement.worlds[0];
                const auto out = outcome_nodes(g, w), in = intervention_nodes(g, w);
                CHECK(all_paths_intercepted(g, src, out, in) == intercepted_by_paths(g, src, out, in));
            }
        }
    }

    TEST_CASE("inert reduction") {
        std::vector<PruneVerdict> v(4);
        v[0].experiment = 0;
        v[0].verdict = Verdict::pruned_id;
        v[1].experiment = 1;
        v[1].verdict = Verdict::pruned_interception;
        v[2].experiment = 2;
        v[3].experiment = 3;
        const auto r = inert_reduction(v);
        CHECK(r.search == std::vector<int>{1, 2, 3});
        CHECK(r.skip_singleton == std::vector<int>{1});
        const auto a = inert_reduction(v, true);
        CHECK(a.search == std::vector<int>{2, 3});
    }
}
