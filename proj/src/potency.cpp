#include "maxpot/potency.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "maxpot/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace maxpot {

const char* to_string(Criterion c) {
    switch (c) {
        case Criterion::worst_case: return "worst";
        case Criterion::expected: return "expected";
        case Criterion::best_case: return "best";
    }
    return "?";
}

Criterion parse_criterion(const std::string& s) {
    if (s == "worst" || s == "worst_case") return Criterion::worst_case;
    if (s == "expected") return Criterion::expected;
    if (s == "best" || s == "best_case") return Criterion::best_case;
    throw InputError("unknown criterion '" + s + "' (expected worst, expected or best)");
}

namespace {

bool all_outcomes_marked(const Statement& s) {
    for (const auto& w : s.worlds)
        for (const auto& [v, val] : w.outcomes)
            if (val != kAllValues) return false;
    return true;
}

PolyProgram base_program(const ProgramContext& ctx, const Query& q, const PotencyOptions& opts) {
    auto p = build_base(ctx, q, opts.build);
    if (!opts.fixed.empty()) p = add_experiments(ctx, std::move(p), opts.fixed, opts.build);
    return p;
}

BoundsResult checked_bounds(const PolyProgram& p, const SolverOptions& opts, const char* what) {
    auto b = solve_bounds(p, opts);
    if (b.status == SolveStatus::infeasible)
        throw InfeasibleError(std::string(what) + ": program is infeasible for the given distribution");
    return b;
}

// Copy U starts at the upper witness and copy L at the lower one; blocks the
// base program lacks start uniform and are repaired by the solver.
std::vector<double> coupled_start(const PolyProgram& coupled, const PolyProgram& base, const BoundsResult& b) {
    std::vector<double> x(static_cast<std::size_t>(coupled.num_vars), 0.0);
    for (const auto& blk : coupled.blocks) {
        const auto& w = blk.copy == 0 ? b.witness_upper : b.witness_lower;
        const int src = base.offset(blk.district, 0);
        for (int i = 0; i < blk.size; ++i) {
            const auto dst = static_cast<std::size_t>(blk.offset + i);
            if (src >= 0 && static_cast<int>(w.size()) == base.num_vars)
                x[dst] = w[static_cast<std::size_t>(src + i)];
            else
                x[dst] = 1.0 / blk.size;
        }
    }
    return x;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n <= 1 || hi - lo < 1e-12) return {lo};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    out.back() = hi;
    return out;
}

Query cell_query(const OutcomeCell& cell) {
    Query cq;
    cq.terms.push_back({1.0, cell.statement});
    return cq;
}

}  // namespace

std::vector<OutcomeCell> free_cells(const Admg& g, const Experiment& e) {
    auto cells = expand(g, e);
    if (!all_outcomes_marked(e.statement)) return cells;
    std::vector<OutcomeCell> out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const bool last_of_group = i + 1 == cells.size() || cells[i + 1].group != cells[i].group;
        if (!last_of_group) out.push_back(cells[i]);
    }
    return out;
}

std::vector<OutcomeCell> free_cells(const Admg& g, const std::vector<Experiment>& subset) {
    std::vector<OutcomeCell> out;
    for (const auto& e : subset) {
        auto c = free_cells(g, e);
        out.insert(out.end(), c.begin(), c.end());
    }
    return out;
}

BoundsResult observational_bounds(const ProgramContext& ctx, const Query& q, const PotencyOptions& opts) {
    return checked_bounds(base_program(ctx, q, opts), opts.solver, "observational bounds");
}

WidthReport evaluate_potency(const ProgramContext& ctx, const Query& q, const std::vector<Experiment>& subset,
                             const PotencyOptions& opts) {
    return evaluate_potency(ctx, q, subset, observational_bounds(ctx, q, opts), opts);
}

WidthReport evaluate_potency(const ProgramContext& ctx, const Query& q, const std::vector<Experiment>& subset,
                             const BoundsResult& base, const PotencyOptions& opts) {
    WidthReport r;
    r.lower = base.lower;
    r.upper = base.upper;
    r.observational = base.width();
    r.status = base.status;
    const auto cells = free_cells(ctx.graph(), subset);
    auto coupled = build_coupled(ctx, q, cells, opts.build);
    if (!opts.fixed.empty()) coupled = add_experiments(ctx, std::move(coupled), opts.fixed, opts.build);
    if (cells.empty() || coupled.cells_dropped == cells.size()) {
        r.width = r.observational;
        return r;
    }
    auto so = opts.solver;
    so.starts.insert(so.starts.begin(), coupled_start(coupled, base_program(ctx, q, opts), base));
    const auto o = solve(coupled, Sense::maximize, so);
    if (o.status == SolveStatus::infeasible)
        throw InfeasibleError("coupled program is infeasible for the given distribution");
    r.status = combine(r.status, o.status);
    r.width = o.value;
    // a local optimum of the base pair can sit below a coupled optimum, which
    // is itself a valid observational width
    if (r.status == SolveStatus::local) r.observational = std::max(r.observational, r.width);
    r.potency = r.observational - r.width;
    // two exact solves can disagree in the last bits
    if (r.potency < 0 && r.potency > -1e-9) r.potency = 0;
    return r;
}

BoundsResult cell_range(const ProgramContext& ctx, const OutcomeCell& cell, const PotencyOptions& opts) {
    return checked_bounds(base_program(ctx, cell_query(cell), opts), opts.solver, "cell range");
}

std::optional<BoundsResult> realized_bounds(const ProgramContext& ctx, const Query& q, std::vector<OutcomeCell> cells,
                                            const std::vector<double>& values, const PotencyOptions& opts) {
    if (cells.size() != values.size()) throw InputError("one value is needed per cell");
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i].value = values[i];
    auto p = add_experiments(ctx, base_program(ctx, q, opts), cells, opts.build);
    auto b = solve_bounds(p, opts.solver);
    if (b.status == SolveStatus::infeasible) return std::nullopt;
    return b;
}

std::vector<CurvePoint> width_curve(const ProgramContext& ctx, const Query& q, const OutcomeCell& cell,
                                    const PotencyOptions& opts) {
    const auto range = cell_range(ctx, cell, opts);
    return width_curve(ctx, q, cell, linspace(range.lower, range.upper, opts.grid), opts);
}

std::vector<CurvePoint> width_curve(const ProgramContext& ctx, const Query& q, const OutcomeCell& cell,
                                    const std::vector<double>& points, const PotencyOptions& opts) {
    std::vector<CurvePoint> out;
    for (double p : points) {
        auto b = realized_bounds(ctx, q, {cell}, {p}, opts);
        if (!b) throw InputError("cell value " + std::to_string(p) + " is outside the feasible range");
        out.push_back({p, b->lower, b->upper});
    }
    return out;
}

WidthReport alt_width(const ProgramContext& ctx, const Query& q, const std::vector<Experiment>& subset,
                      Criterion criterion, const PotencyOptions& opts) {
    if (criterion == Criterion::worst_case) return evaluate_potency(ctx, q, subset, opts);
    const auto base = observational_bounds(ctx, q, opts);
    WidthReport r;
    r.criterion = criterion;
    r.lower = base.lower;
    r.upper = base.upper;
    r.observational = base.width();
    r.status = base.status;
    const auto cells = free_cells(ctx.graph(), subset);
    if (cells.empty()) {
        r.width = r.observational;
        return r;
    }
    const auto d = cells.size();
    int per_axis = std::max(opts.grid, 1);
    while (per_axis > 2 && std::pow(static_cast<double>(per_axis), static_cast<double>(d)) >
                               static_cast<double>(opts.max_grid_points))
        --per_axis;
    std::vector<std::vector<double>> axes;
    for (const auto& c : cells) {
        const auto range = cell_range(ctx, c, opts);
        r.status = combine(r.status, range.status);
        axes.push_back(linspace(range.lower, range.upper, per_axis));
    }

    const bool linear = build_base(ctx, q, opts.build).degree() <= 1;
    std::vector<std::vector<std::size_t>> points;
    if (criterion == Criterion::best_case && linear) {
        // the realized width is concave over the feasible set, so a box
        // whose corners are all feasible has its minimum at a corner
        for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
            std::vector<std::size_t> idx(d);
            for (std::size_t j = 0; j < d; ++j) idx[j] = (mask >> j & 1) ? axes[j].size() - 1 : 0;
            points.push_back(idx);
        }
    }
    auto full_grid = [&] {
        points.clear();
        std::vector<std::size_t> idx(d, 0);
        while (true) {
            points.push_back(idx);
            std::size_t j = 0;
            while (j < d && ++idx[j] == axes[j].size()) idx[j++] = 0;
            if (j == d) break;
        }
    };
    if (points.empty()) full_grid();

    auto evaluate_points = [&] {
        std::vector<std::optional<BoundsResult>> res(points.size());
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < points.size(); ++i) {
            try {
                std::vector<double> vals(d);
                for (std::size_t j = 0; j < d; ++j) vals[j] = axes[j][points[i][j]];
                res[i] = realized_bounds(ctx, q, cells, vals, opts);
            } catch (...) {
#pragma omp critical
                err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        return res;
    };
    auto res = evaluate_points();
    if (criterion == Criterion::best_case && linear && points.size() == (std::size_t{1} << d) &&
        std::any_of(res.begin(), res.end(), [](const auto& b) { return !b; })) {
        full_grid();
        res = evaluate_points();
    }

    double acc = 0, weight = 0, best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!res[i]) continue;
        r.status = combine(r.status, res[i]->status);
        double w = 1;
        for (std::size_t j = 0; j < d; ++j) {
            const auto n = axes[j].size();
            if (n > 1 && (points[i][j] == 0 || points[i][j] == n - 1)) w *= 0.5;
        }
        acc += w * res[i]->width();
        weight += w;
        best = std::min(best, res[i]->width());
    }
    if (weight == 0) throw InfeasibleError("no feasible grid point for the experiment cells");
    r.width = criterion == Criterion::expected ? acc / weight : best;
    r.potency = r.observational - r.width;
    return r;
}

std::vector<double> width_witness(const ProgramContext& ctx, const Query& q, const std::vector<Experiment>& subset,
                                  const PotencyOptions& opts) {
    const auto cells = free_cells(ctx.graph(), subset);
    auto coupled = build_coupled(ctx, q, cells, opts.build);
    if (!opts.fixed.empty()) coupled = add_experiments(ctx, std::move(coupled), opts.fixed, opts.build);
    const auto base = observational_bounds(ctx, q, opts);
    auto so = opts.solver;
    so.starts.insert(so.starts.begin(), coupled_start(coupled, base_program(ctx, q, opts), base));
    const auto o = solve(coupled, Sense::maximize, so);
    if (o.status == SolveStatus::infeasible) throw InfeasibleError("coupled program is infeasible");
    std::vector<double> out;
    for (const auto& c : cells) out.push_back(statement_polynomial(ctx, coupled, c.statement, 0).evaluate(o.x));
    return out;
}

CostModel CostModel::additive(const std::vector<Experiment>& experiments, double budget) {
    CostModel m;
    for (const auto& e : experiments) m.costs.push_back(e.cost);
    m.budget = budget;
    return m;
}

double CostModel::cost(const std::vector<int>& subset) const {
    auto key = subset;
    std::sort(key.begin(), key.end());
    if (auto it = overrides.find(key); it != overrides.end()) return it->second;
    double total = 0;
    for (int i : key) {
        if (i < 0 || static_cast<std::size_t>(i) >= costs.size()) throw InputError("cost index out of range");
        total += costs[static_cast<std::size_t>(i)];
    }
    return total;
}

std::vector<std::vector<int>> ordered_subsets(int n) {
    std::vector<std::vector<int>> out;
    for (int k = 0; k <= n; ++k) {
        std::vector<int> c(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i;
        while (true) {
            out.push_back(c);
            int i = k - 1;
            while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
            if (i < 0) break;
            ++c[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return out;
}

namespace {

struct Plan {
    MaxPotencySolution sol;
    BoundsResult base;
    std::vector<std::vector<int>> candidates;
};

Plan plan_search(const ProgramContext& ctx, const Query& q, const std::vector<Experiment>& experiments,
                 const CostModel& costs, const MaxPotencyOptions& opts) {
    if (costs.budget < 0) throw InputError("budget must be nonnegative");
    Plan plan;
    auto& sol = plan.sol;
    sol.verdicts = get_useless(ctx.graph(), q, experiments, opts.order);
    std::vector<int> search;
    std::vector<bool> intercepted(experiments.size(), false);
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        const auto v = sol.verdicts[i].verdict;
        if (v == Verdict::pruned_id) continue;
        if (v == Verdict::pruned_interception) {
            intercepted[i] = true;
            if (opts.aggressive) continue;
        }
        search.push_back(static_cast<int>(i));
    }
    const int k = static_cast<int>(search.size());
    if (k > opts.max_search)
        throw CapExceeded("subset search over " + std::to_string(k) + " experiments needs 2^" + std::to_string(k) +
                          " evaluations, above the cap of 2^" + std::to_string(opts.max_search));
    sol.enumerated = std::uint64_t{1} << k;
    plan.base = observational_bounds(ctx, q, opts.potency);
    sol.observational = plan.base.width();
    sol.status = plan.base.status;
    sol.cost = costs.cost({});
    if (sol.cost > costs.budget + 1e-12) throw InputError("the empty design already exceeds the budget");
    for (const auto& local : ordered_subsets(k)) {
        if (local.empty()) continue;
        std::vector<int> subset;
        for (int i : local) subset.push_back(search[static_cast<std::size_t>(i)]);
        if (subset.size() == 1 && intercepted[static_cast<std::size_t>(subset[0])]) {
            ++sol.skipped;
            continue;
        }
        if (!(costs.cost(subset) <= costs.budget + 1e-12)) {
            ++sol.skipped;
            continue;
        }
        plan.candidates.push_back(std::move(subset));
    }
    return plan;
}

std::vector<Experiment> pick(const std::vector<Experiment>& experiments, const std::vector<int>& subset) {
    std::vector<Experiment> out;
    for (int i : subset) out.push_back(experiments[static_cast<std::size_t>(i)]);
    return out;
}

MaxPotencySolution merge(Plan& plan, const std::vector<WidthReport>& reports, const CostModel& costs) {
    auto& sol = plan.sol;
    sol.evaluated = reports.size();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        sol.status = combine(sol.status, reports[i].status);
        if (reports[i].potency > sol.potency + 1e-9) {
            sol.potency = reports[i].potency;
            sol.subset = plan.candidates[i];
            sol.cost = costs.cost(sol.subset);
        }
    }
    return std::move(sol);
}

}  // namespace

MaxPotencySolution solve_max_potency_serial(const ProgramContext& ctx, const Query& q,
                                            const std::vector<Experiment>& experiments, const CostModel& costs,
                                            const MaxPotencyOptions& opts) {
    auto plan = plan_search(ctx, q, experiments, costs, opts);
    std::vector<WidthReport> reports;
    for (const auto& s : plan.candidates)
        reports.push_back(evaluate_potency(ctx, q, pick(experiments, s), plan.base, opts.potency));
    return merge(plan, reports, costs);
}

MaxPotencySolution solve_max_potency(const ProgramContext& ctx, const Query& q,
                                     const std::vector<Experiment>& experiments, const CostModel& costs,
                                     const MaxPotencyOptions& opts) {
    auto plan = plan_search(ctx, q, experiments, costs, opts);
    std::vector<WidthReport> reports(plan.candidates.size());
    std::exception_ptr err;
#ifdef _OPENMP
    const int nt = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
    for (std::size_t i = 0; i < plan.candidates.size(); ++i) {
        try {
            reports[i] = evaluate_potency(ctx, q, pick(experiments, plan.candidates[i]), plan.base, opts.potency);
        } catch (...) {
#pragma omp critical
            err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return merge(plan, reports, costs);
}

}  // namespace maxpot
