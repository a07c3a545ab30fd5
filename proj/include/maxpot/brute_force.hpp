#pragma once

#include <cstdint>
#include <vector>

#include "maxpot/admg.hpp"
#include "maxpot/query.hpp"
#include "maxpot/response.hpp"
#include "maxpot/solve.hpp"

namespace maxpot {

// Independent reference solver used to validate the program builder and the
// simplex. Works on the full response space with no hull reduction: each
// district's feasible set is a polytope, the objective is multilinear across
// districts, so optima sit at tuples of polytope vertices, which are
// enumerated exhaustively by walking every feasible basis of the district's
// equations.
struct OracleOptions {
    std::uint64_t max_bases = 2'000'000;
    std::uint64_t max_vertex_tuples = 5'000'000;
};

// Bounds of q under P and the given cells (each must carry a value and depend
// on a single district).
BoundsResult brute_force_bounds(const Admg& g, const JointDistribution& p, const Query& q,
                                const std::vector<OutcomeCell>& cells = {},
                                const OracleOptions& opts = {});

// Worst-case width: max T(U) - T(L) over pairs of models agreeing on every cell.
double brute_force_worst_width(const Admg& g, const JointDistribution& p, const Query& q,
                               const std::vector<OutcomeCell>& cells, const OracleOptions& opts = {});

}  // namespace maxpot
