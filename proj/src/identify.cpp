#include "maxpot/prune.hpp"

namespace maxpot {

namespace {

// Y, X and V are node sets of the current subgraph G[V].
bool id_rec(const Admg& g, const NodeSet& y, const NodeSet& x, const NodeSet& v) {
    if (x.empty()) return true;

    const auto an = ancestors_within(g, y, v);
    if (!(an == v)) return id_rec(g, y, x & an, an);

    // nodes whose intervention is free: not ancestors of Y once edges into X are cut
    const auto an_cut = ancestors_within(g, y, v, &x);
    const auto w = (v - x) - an_cut;
    if (!w.empty()) return id_rec(g, y, x | w, v);

    const auto parts = districts_within(g, v - x);
    if (parts.size() > 1) {
        for (const auto& s : parts)
            if (!id_rec(g, s, v - s, v)) return false;
        return true;
    }
    const auto& s = parts.front();
    const auto whole = districts_within(g, v);
    if (whole.size() == 1) return false;  // hedge
    for (const auto& c : whole) {
        if (c == s) return true;
        if (s.subset_of(c)) return id_rec(g, y, x & c, c);
    }
    return false;  // unreachable: S lies inside one district of G[V]
}

}  // namespace

bool is_identifiable(const Admg& g, const NodeSet& outcomes, const NodeSet& interventions) {
    if (outcomes.intersects(interventions)) throw InputError("outcomes and interventions overlap");
    return id_rec(g, outcomes, interventions, g.all_nodes());
}

}  // namespace maxpot
