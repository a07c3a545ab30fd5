#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxpot/admg.hpp"
#include "maxpot/errors.hpp"
#include "maxpot/potency.hpp"
#include "maxpot/query.hpp"
#include "maxpot/response.hpp"

namespace maxpot {

// Joint law of one treatment/outcome pair: P(x,y), P(x,y'), P(x',y), P(x',y').
template <class T>
struct TpCell {
    T alpha, beta, gamma, delta;

    void check() const {
        if (alpha < T(0) || beta < T(0) || gamma < T(0) || delta < T(0))
            throw InputError("cell probabilities must be nonnegative");
        const T s = alpha + beta + gamma + delta;
        if (s - T(1) > T(1) / T(1000000000000LL) || T(1) - s > T(1) / T(1000000000000LL))
            throw InputError("cell probabilities must sum to one");
    }
};

template <class T>
struct Interval {
    T lower, upper;
    T width() const { return upper - lower; }
};

// PNS bounds of a cell. With P(y_x) = p known, P(y_x') is free over its
// observational range [gamma, 1 - delta] and the pointwise bounds are taken
// at their extremes over it.
template <class T>
Interval<T> tp_pns_bounds(const TpCell<T>& c, const std::optional<T>& known_p = std::nullopt) {
    c.check();
    if (!known_p) return {T(0), c.alpha + c.delta};
    const T p = *known_p;
    if (p < c.alpha || p > T(1) - c.beta) throw InfeasibleError("P(y_x) outside its feasible range");
    const T py = c.alpha + c.gamma;
    auto lower_at = [&](T q) { return std::max({T(0), p - q, py - q, p - py}); };
    auto upper_at = [&](T q) { return std::min({p, T(1) - q, c.alpha + c.delta, p - q + c.beta + c.gamma}); };
    // lower_at is nonincreasing and upper_at nonincreasing in q
    return {lower_at(T(1) - c.delta), upper_at(c.gamma)};
}

// Cell of the one-parameter family reaching potency v (v in [0, 0.1]).
template <class T>
TpCell<T> achievable_cell(T v) {
    if (v < T(0) || v > T(1) / T(10)) throw InputError("v must lie in [0, 0.1]");
    return {T(1) - T(8) * v, v, T(3) * v, T(4) * v};
}

// Realized PNS width of achievable_cell(v) after observing P(y_x) = p.
template <class T>
T tp_width_curve(T v, T p) {
    if (p < T(1) - T(8) * v || p > T(1) - v) throw InputError("p outside [1-8v, 1-v]");
    if (p <= T(1) - T(5) * v) return p;
    if (p <= T(1) - T(4) * v) return T(1) - T(5) * v;
    return T(2) - T(9) * v - p;
}

struct KnapsackInstance {
    std::vector<double> values;
    std::vector<double> weights;
    double budget = 0;
};

// `<value> <weight>` lines and one `budget <B>` line; `#` comments.
KnapsackInstance parse_knapsack(std::string_view text);
KnapsackInstance read_knapsack(const std::string& path);

struct ReductionInstance {
    Admg graph;
    JointDistribution distribution;
    Query query;
    std::vector<Experiment> experiments;
    CostModel costs;
    std::vector<double> cell_v;  // rescaled value per item
};

// Disjoint cells X_i -> Y_i, X_i <-> Y_i with the given joint laws; the
// query sums the PNS of every cell and experiment i measures P(Y_i=1 | do(X_i=1)).
ReductionInstance tp_instance(const std::vector<TpCell<double>>& cells, const std::vector<double>& costs,
                              double budget);
ReductionInstance knapsack_to_max_potency(const KnapsackInstance& k);

// Writes <prefix>.graph, .dist, .query and .exp.
void write_reduction(const ReductionInstance& r, const std::string& prefix);

}  // namespace maxpot
