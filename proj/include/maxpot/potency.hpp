#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maxpot/program.hpp"
#include "maxpot/prune.hpp"
#include "maxpot/query.hpp"
#include "maxpot/solve.hpp"

namespace maxpot {

enum class Criterion { worst_case, expected, best_case };
const char* to_string(Criterion c);
Criterion parse_criterion(const std::string& s);

struct PotencyOptions {
    SolverOptions solver;
    BuildOptions build;
    int grid = 201;              // points per axis for expected / best-case widths
    std::uint64_t max_grid_points = 1u << 16;
    // Realized outcomes already folded into the program (re-solve workflow).
    std::vector<OutcomeCell> fixed;
};

struct WidthReport {
    Criterion criterion = Criterion::worst_case;
    double observational = 0;  // W(empty)
    double width = 0;          // W(subset)
    double potency = 0;
    SolveStatus status = SolveStatus::exact;
    double lower = 0;  // observational bounds
    double upper = 0;
};

// Cells of an experiment carrying free information: when every outcome is a
// family marker the cells of one intervention group sum to one, so the last
// cell of each group is dropped.
std::vector<OutcomeCell> free_cells(const Admg& g, const Experiment& e);
std::vector<OutcomeCell> free_cells(const Admg& g, const std::vector<Experiment>& subset);

// Observational bounds, including any fixed cells.
BoundsResult observational_bounds(const ProgramContext& ctx, const Query& q, const PotencyOptions& opts = {});

// Worst-case potency through the coupled program.
WidthReport evaluate_potency(const ProgramContext& ctx, const Query& q, const std::vector<Experiment>& subset,
                             const PotencyOptions& opts = {});
WidthReport evaluate_potency(const ProgramContext& ctx, const Query& q, const std::vector<Experiment>& subset,
                             const BoundsResult& base, const PotencyOptions& opts = {});

// Range of a cell's probability under P(V) alone.
BoundsResult cell_range(const ProgramContext& ctx, const OutcomeCell& cell, const PotencyOptions& opts = {});

// Bounds once the cells are pinned to `values` (same order); nullopt when
// the values are not jointly feasible.
std::optional<BoundsResult> realized_bounds(const ProgramContext& ctx, const Query& q,
                                            std::vector<OutcomeCell> cells, const std::vector<double>& values,
                                            const PotencyOptions& opts = {});

struct CurvePoint {
    double p;
    double lower;
    double upper;
    double width() const { return upper - lower; }
};

// Realized width over a uniform grid of the cell's feasible range; a point
// range yields one point.
std::vector<CurvePoint> width_curve(const ProgramContext& ctx, const Query& q, const OutcomeCell& cell,
                                    const PotencyOptions& opts = {});
std::vector<CurvePoint> width_curve(const ProgramContext& ctx, const Query& q, const OutcomeCell& cell,
                                    const std::vector<double>& points, const PotencyOptions& opts = {});

// Expected width (uniform over the feasible box, trapezoid weights, points
// outside the joint feasible set skipped) or best-case width (minimum over
// the box corners and grid).
WidthReport alt_width(const ProgramContext& ctx, const Query& q, const std::vector<Experiment>& subset,
                      Criterion criterion, const PotencyOptions& opts = {});

// Cell values reached by the worst-case coupled optimum. Pinning the cells to
// these values leaves a width of at least the worst-case width.
std::vector<double> width_witness(const ProgramContext& ctx, const Query& q, const std::vector<Experiment>& subset,
                                  const PotencyOptions& opts = {});

struct CostModel {
    std::vector<double> costs;                    // per experiment, may be +inf
    std::map<std::vector<int>, double> overrides;  // sorted subset -> cost
    double budget = 0;

    static CostModel additive(const std::vector<Experiment>& experiments, double budget);
    double cost(const std::vector<int>& subset) const;
};

struct MaxPotencyOptions {
    PotencyOptions potency;
    PruneOrder order = PruneOrder::interception_first;
    bool aggressive = false;
    int max_search = 20;  // refuse above 2^max_search subsets
    int threads = 0;
};

struct MaxPotencySolution {
    std::vector<int> subset;  // indices into the experiment list, ascending
    double potency = 0;
    double cost = 0;
    SolveStatus status = SolveStatus::exact;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;      // pruned singletons and over-budget subsets
    std::uint64_t enumerated = 0;  // 2^k search space size
    std::vector<PruneVerdict> verdicts;
    double observational = 0;
};

// Exact enumeration by (cardinality, lexicographic); ties keep the earlier
// subset.
MaxPotencySolution solve_max_potency(const ProgramContext& ctx, const Query& q,
                                     const std::vector<Experiment>& experiments, const CostModel& costs,
                                     const MaxPotencyOptions& opts = {});
MaxPotencySolution solve_max_potency_serial(const ProgramContext& ctx, const Query& q,
                                            const std::vector<Experiment>& experiments, const CostModel& costs,
                                            const MaxPotencyOptions& opts = {});

// Subsets of {0..n-1} ordered by size and then lexicographically.
std::vector<std::vector<int>> ordered_subsets(int n);

}  // namespace maxpot
