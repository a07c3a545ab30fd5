#include "maxpot/prune.hpp"

#include <algorithm>
#include <deque>

namespace maxpot {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pruned_id: return "pruned_id";
        case Verdict::pruned_interception: return "pruned_interception";
        case Verdict::kept: return "kept";
    }
    return "?";
}

InterceptionSources interception_sources(const Admg& g, const DistrictHull& hull) {
    InterceptionSources s;
    s.latents = hull.scope_latents;
    s.own_noise = NodeSet(g.size());
    for (NodeId v : hull.scope_nodes.to_vector())
        if (g.spouses(v).empty()) s.own_noise.insert(v);
    return s;
}

InterceptionSources interception_sources(const Admg& g, const std::vector<int>& latents) {
    return {latents, NodeSet(g.size())};
}

bool all_paths_intercepted(const Admg& g, const InterceptionSources& sources, const NodeSet& outcomes,
                           const NodeSet& interventions) {
    if (outcomes.intersects(interventions)) throw InputError("outcomes and interventions overlap");
    const auto& bi = g.bidirected_edges();
    NodeSet visited(g.size());
    std::deque<NodeId> queue;
    auto push = [&](NodeId v) {
        // edges incident to Z are gone, so Z is never entered
        if (interventions.contains(v) || visited.contains(v)) return;
        visited.insert(v);
        queue.push_back(v);
    };
    for (int e : sources.latents) {
        if (e < 0 || static_cast<std::size_t>(e) >= bi.size()) throw InputError("unknown latent id");
        push(bi[static_cast<std::size_t>(e)].first);
        push(bi[static_cast<std::size_t>(e)].second);
    }
    for (NodeId v : sources.own_noise.to_vector()) push(v);
    while (!queue.empty()) {
        NodeId cur = queue.front();
        queue.pop_front();
        if (outcomes.contains(cur)) return false;
        for (NodeId c : g.children(cur)) push(c);
    }
    return true;
}

std::vector<PruneVerdict> get_useless(const Admg& g, const Query& q, const std::vector<Experiment>& experiments,
                                      PruneOrder order) {
    const auto hull = district_hull(g, q);
    const auto sources = interception_sources(g, hull);
    std::vector<PruneVerdict> out;
    out.reserve(experiments.size());
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        const auto& e = experiments[i];
        PruneVerdict v;
        v.experiment = e.id >= 0 ? e.id : static_cast<int>(i);
        bool all = true;
        for (const auto& w : e.statement.worlds) {
            const bool ok = all_paths_intercepted(g, sources, outcome_nodes(g, w), intervention_nodes(g, w));
            v.intercepted.push_back(ok);
            all = all && ok;
        }
        if (e.statement.worlds.size() == 1) {
            const auto& w = e.statement.worlds.front();
            v.identifiable = is_identifiable(g, outcome_nodes(g, w), intervention_nodes(g, w));
        }
        const bool id = v.identifiable.value_or(false);
        if (order == PruneOrder::id_first) {
            if (id)
                v.verdict = Verdict::pruned_id;
            else if (all)
                v.verdict = Verdict::pruned_interception;
        } else {
            if (all)
                v.verdict = Verdict::pruned_interception;
            else if (id)
                v.verdict = Verdict::pruned_id;
        }
        out.push_back(std::move(v));
    }
    return out;
}

InertReduction inert_reduction(const std::vector<PruneVerdict>& verdicts, bool aggressive) {
    InertReduction r;
    for (const auto& v : verdicts) {
        if (v.verdict == Verdict::pruned_id) continue;
        if (v.verdict == Verdict::pruned_interception) {
            if (aggressive) continue;
            r.skip_singleton.push_back(v.experiment);
        }
        r.search.push_back(v.experiment);
    }
    return r;
}

}  // namespace maxpot
