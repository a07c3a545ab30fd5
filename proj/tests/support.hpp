#pragma once

#include <string>
#include <vector>

#include "maxpot/admg.hpp"
#include "maxpot/query.hpp"
#include "maxpot/response.hpp"
#include "maxpot/rng.hpp"

namespace testing {

inline std::string data(const std::string& name) { return std::string(MAXPOT_DATA_DIR) + "/" + name; }

// A ground-truth model: one response-type distribution per district.
struct Scm {
    std::vector<std::vector<double>> q;
    maxpot::JointDistribution p;
};

inline Scm random_scm(const maxpot::Admg& g, maxpot::Rng& rng) {
    maxpot::ResponseSpace space(g);
    Scm s;
    for (std::size_t k = 0; k < space.num_districts(); ++k)
        s.q.push_back(rng.simplex_point(static_cast<std::size_t>(space.district_size(k))));
    s.p = maxpot::induced_distribution(g, space, s.q);
    return s;
}

// Probability of a statement under the model by summing over every full configuration.
inline double truth(const maxpot::Admg& g, const Scm& m, const maxpot::Statement& s) {
    maxpot::ResponseSpace space(g);
    double total = 0;
    for (maxpot::ConfigIndex i = 0; i < space.total_size(); ++i) {
        auto r = space.decode(i);
        if (!maxpot::satisfies(g, space, r, s)) continue;
        double w = 1;
        for (std::size_t k = 0; k < r.size(); ++k) w *= m.q[k][r[k]];
        total += w;
    }
    return total;
}

inline double truth(const maxpot::Admg& g, const Scm& m, const maxpot::Query& q) {
    double v = 0;
    for (const auto& t : q.terms) v += t.coefficient * truth(g, m, t.statement);
    return v;
}

// Random DAG + bidirected edges forming one district over n nodes.
inline maxpot::Admg random_single_district(int n, int max_edges, maxpot::Rng& rng) {
    maxpot::Admg::Builder b;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        b.add_node("V" + std::to_string(i + 1), 2);
        order[static_cast<std::size_t>(i)] = i;
    }
    for (int i = n - 1; i > 0; --i) std::swap(order[static_cast<std::size_t>(i)], order[rng.index(i + 1)]);
    // at most one parent per node keeps the district small enough for the oracle
    std::vector<bool> has_parent(static_cast<std::size_t>(n), false);
    const auto edges = static_cast<int>(rng.index(static_cast<std::uint64_t>(max_edges) + 1));
    for (int e = 0, tries = 0; e < edges && tries < 50; ++tries) {
        const auto i = rng.index(static_cast<std::uint64_t>(n));
        const auto j = rng.index(static_cast<std::uint64_t>(n));
        if (i >= j) continue;
        const int from = order[i], to = order[j];
        if (has_parent[static_cast<std::size_t>(to)]) continue;
        has_parent[static_cast<std::size_t>(to)] = true;
        b.add_edge(from, to);
        ++e;
    }
    // a random spanning tree of bidirected edges, sometimes with one extra
    for (int i = 1; i < n; ++i) b.add_confounder(static_cast<int>(rng.index(static_cast<std::uint64_t>(i))), i);
    if (n == 3 && rng.bernoulli(0.3)) {
        maxpot::Admg tmp = std::move(b).build();
        std::vector<maxpot::Edge> extra;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (!tmp.has_confounder(i, j)) extra.push_back({i, j});
        return tmp.with_confounders(extra);
    }
    return std::move(b).build();
}

// Every district is a bidirected clique, so district-joint response types
// carry no more confounding than the graph itself.
inline bool clique_districts(const maxpot::Admg& g) {
    const auto part = maxpot::districts(g);
    for (const auto& d : part.districts) {
        const auto v = d.observed.to_vector();
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j)
                if (!g.has_confounder(v[i], v[j])) return false;
    }
    return true;
}

}  // namespace testing
