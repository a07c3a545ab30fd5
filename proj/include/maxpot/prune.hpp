#pragma once

#include <optional>
#include <vector>

#include "maxpot/admg.hpp"
#include "maxpot/program.hpp"
#include "maxpot/query.hpp"

namespace maxpot {

// Decision version of the recursive ID procedure: is P(W | do(Z)) a
// functional of P(V)? Fails exactly when a hedge is found.
bool is_identifiable(const Admg& g, const NodeSet& outcomes, const NodeSet& interventions);

// Response types the BFS starts from: latents (bidirected edge ids) and
// nodes carrying their own exogenous type.
struct InterceptionSources {
    std::vector<int> latents;
    NodeSet own_noise;
};

InterceptionSources interception_sources(const Admg& g, const DistrictHull& hull);
InterceptionSources interception_sources(const Admg& g, const std::vector<int>& latents);

// True iff every directed path from a source to W passes through Z.
bool all_paths_intercepted(const Admg& g, const InterceptionSources& sources, const NodeSet& outcomes,
                           const NodeSet& interventions);

enum class Verdict { pruned_id, pruned_interception, kept };
const char* to_string(Verdict v);

enum class PruneOrder {
    interception_first,
    id_first,  // ID check before interception, as in the listed algorithm
};

struct PruneVerdict {
    int experiment = -1;
    Verdict verdict = Verdict::kept;
    std::vector<bool> intercepted;     // per world
    std::optional<bool> identifiable;  // evaluated for single-world experiments only
};

std::vector<PruneVerdict> get_useless(const Admg& g, const Query& q, const std::vector<Experiment>& experiments,
                                      PruneOrder order = PruneOrder::interception_first);

struct InertReduction {
    std::vector<int> search;         // experiments left for subset search
    std::vector<int> skip_singleton;  // never evaluated alone
};

// `aggressive` also drops interception-pruned experiments from the search;
// that is a heuristic, since they can still matter jointly.
InertReduction inert_reduction(const std::vector<PruneVerdict>& verdicts, bool aggressive = false);

}  // namespace maxpot
