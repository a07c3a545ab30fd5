#pragma once

#include <utility>
#include <vector>

namespace maxpot::lp {

using SparseRow = std::vector<std::pair<int, double>>;

// minimize/maximize c'x  s.t.  eq rows = rhs, le rows <= rhs, x >= 0
struct Problem {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<SparseRow> eq_rows;
    std::vector<double> eq_rhs;
    std::vector<SparseRow> le_rows;
    std::vector<double> le_rhs;

    void add_eq(SparseRow row, double rhs) {
        eq_rows.push_back(std::move(row));
        eq_rhs.push_back(rhs);
    }
    void add_le(SparseRow row, double rhs) {
        le_rows.push_back(std::move(row));
        le_rhs.push_back(rhs);
    }
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

enum class PivotRule {
    bland,
    // Dantzig pricing, switching to Bland after a run of degenerate pivots.
    dantzig_bland_fallback,
};

struct Options {
    double pivot_tol = 1e-9;
    double optimality_tol = 1e-10;
    double feasibility_tol = 1e-7;
    long max_iterations = 1'000'000;
    PivotRule rule = PivotRule::bland;
};

struct Result {
    Status status = Status::infeasible;
    double objective = 0;
    std::vector<double> x;
    long iterations = 0;
};

// Dense two-phase primal simplex.
Result solve(const Problem& p, bool maximize, const Options& opts = {});

}  // namespace maxpot::lp
