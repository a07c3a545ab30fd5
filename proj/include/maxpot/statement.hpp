#pragma once

#include <utility>
#include <vector>

#include "maxpot/node_set.hpp"

namespace maxpot {

// Marker for a family slot: expand over every value of the node.
inline constexpr int kAllValues = -1;

using Assignment = std::vector<std::pair<NodeId, int>>;

// One counterfactual world: outcomes observed under do(interventions).
struct World {
    Assignment interventions;
    Assignment outcomes;

    friend bool operator==(const World&, const World&) = default;
};

// Conjunction of worlds.
struct Statement {
    std::vector<World> worlds;

    bool has_family_marker() const;
    friend bool operator==(const Statement&, const Statement&) = default;
};

}  // namespace maxpot
