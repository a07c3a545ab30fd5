#include "maxpot/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "maxpot/rng.hpp"

namespace maxpot {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::exact: return "exact";
        case SolveStatus::local: return "local";
        case SolveStatus::infeasible: return "infeasible";
    }
    return "?";
}

SolveStatus combine(SolveStatus a, SolveStatus b) {
    return static_cast<int>(a) > static_cast<int>(b) ? a : b;
}

namespace {

lp::SparseRow sparse_linear(const Polynomial& poly) {
    lp::SparseRow row;
    for (const auto& t : poly.terms()) {
        if (t.vars.size() > 1) throw std::logic_error("nonlinear term in a linear solve");
        if (t.vars.size() == 1) row.emplace_back(t.vars[0], t.coef);
    }
    return row;
}

}  // namespace

Optimum solve_lp(const PolyProgram& p, Sense sense, const lp::Options& opts) {
    if (p.degree() > 1) throw std::logic_error("solve_lp needs a program of degree <= 1");
    lp::Problem lpp;
    lpp.num_vars = p.num_vars;
    lpp.objective = p.objective.linear_coefficients(p.num_vars);
    for (const auto& b : p.blocks) {
        lp::SparseRow row;
        for (int i = 0; i < b.size; ++i) row.emplace_back(b.offset + i, 1.0);
        lpp.add_eq(std::move(row), 1.0);
    }
    for (const auto& c : p.equalities) lpp.add_eq(sparse_linear(c.lhs), c.rhs - c.lhs.constant_term());
    for (const auto& c : p.inequalities) lpp.add_le(sparse_linear(c.lhs), c.rhs - c.lhs.constant_term());
    auto r = lp::solve(lpp, sense == Sense::maximize, opts);
    Optimum out;
    if (r.status == lp::Status::infeasible) {
        out.status = SolveStatus::infeasible;
        out.value = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    if (r.status != lp::Status::optimal)
        throw std::runtime_error(r.status == lp::Status::unbounded
                                     ? "internal error: unbounded program on a product of simplices"
                                     : "simplex iteration limit reached");
    out.status = SolveStatus::exact;
    out.x = std::move(r.x);
    out.value = r.objective + p.objective.constant_term();
    out.residual = p.residual(out.x);
    return out;
}

namespace {

// Block-coordinate machinery over one program.
class BlockSearch {
public:
    BlockSearch(const PolyProgram& p, Sense sense, const SolverOptions& opts)
        : p_(p), sense_(sense), opts_(opts), var_group_(static_cast<std::size_t>(p.num_vars), -1) {
        for (std::size_t b = 0; b < p.blocks.size(); ++b) {
            const auto& blk = p.blocks[b];
            int gi = -1;
            for (std::size_t g = 0; g < groups_.size(); ++g)
                if (groups_[g].district == blk.district) gi = static_cast<int>(g);
            if (gi < 0) {
                groups_.push_back({blk.district, {}, {}});
                gi = static_cast<int>(groups_.size() - 1);
            }
            auto& grp = groups_[static_cast<std::size_t>(gi)];
            grp.blocks.push_back(static_cast<int>(b));
            for (int i = 0; i < blk.size; ++i) {
                var_group_[static_cast<std::size_t>(blk.offset + i)] = gi;
                grp.vars.push_back(blk.offset + i);
            }
        }
        auto classify = [&](const Polynomial& poly, std::vector<std::vector<int>>& touch_of, std::vector<bool>& hard) {
            std::vector<int> touched;
            for (const auto& t : poly.terms())
                for (int v : t.vars) touched.push_back(var_group_[static_cast<std::size_t>(v)]);
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            hard.push_back(touched.size() <= 1);
            touch_of.push_back(touched);
        };
        for (const auto& c : p.equalities) classify(c.lhs, eq_touch_, eq_hard_);
        for (const auto& c : p.inequalities) classify(c.lhs, le_touch_, le_hard_);
    }

    std::size_t num_groups() const { return groups_.size(); }

    // Random point satisfying every single-group constraint.
    bool random_start(Rng& rng, std::vector<double>& x) {
        x.assign(static_cast<std::size_t>(p_.num_vars), 0.0);
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            std::vector<double> acc;
            const double w = rng.uniform();
            for (int rep = 0; rep < 2; ++rep) {
                std::vector<double> obj(groups_[g].vars.size());
                for (auto& c : obj) c = rng.uniform(-1, 1);
                auto r = solve_group(g, x, &obj, false, false);
                if (!r) return false;
                if (acc.empty())
                    acc = *r;
                else
                    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = w * acc[i] + (1 - w) * (*r)[i];
            }
            set_group(g, acc, x);
        }
        return true;
    }

    double soft_residual(const std::vector<double>& x) const {
        double r = 0;
        for (std::size_t i = 0; i < p_.equalities.size(); ++i)
            if (!eq_hard_[i])
                r = std::max(r, std::abs(p_.equalities[i].lhs.evaluate(x) - p_.equalities[i].rhs));
        for (std::size_t i = 0; i < p_.inequalities.size(); ++i)
            if (!le_hard_[i]) r = std::max(r, p_.inequalities[i].lhs.evaluate(x) - p_.inequalities[i].rhs);
        return r;
    }

    // Phase 1: reduce the violation of cross-group constraints block by block.
    void repair(std::vector<double>& x) {
        double prev = soft_residual(x);
        for (int sweep = 0; sweep < opts_.max_sweeps && prev > 1e-11; ++sweep) {
            for (std::size_t g = 0; g < groups_.size(); ++g) {
                auto r = solve_group(g, x, nullptr, true);
                if (r) set_group(g, *r, x);
            }
            const double cur = soft_residual(x);
            if (cur > prev - 1e-13) break;
            prev = cur;
        }
    }

    // Phase 2: exact LP per block with the others fixed.
    void ascend(std::vector<double>& x) {
        double cur = objective(x);
        for (int sweep = 0; sweep < opts_.max_sweeps; ++sweep) {
            double start = cur;
            for (std::size_t g = 0; g < groups_.size(); ++g) {
                auto lin = linearize(p_.objective, g, x);
                auto r = solve_group(g, x, &lin.coef, false);
                if (!r) continue;
                auto trial = x;
                set_group(g, *r, trial);
                const double v = objective(trial);
                if (better(v, cur, 1e-13) && p_.residual(trial) <= opts_.residual_tol) {
                    x = std::move(trial);
                    cur = v;
                }
            }
            if (!better(cur, start, 1e-10)) break;
        }
    }

    double objective(const std::vector<double>& x) const { return p_.objective.evaluate(x); }
    bool better(double a, double b, double eps) const {
        return sense_ == Sense::maximize ? a > b + eps : a < b - eps;
    }

private:
    struct Group {
        int district;
        std::vector<int> blocks;
        std::vector<int> vars;
    };
    struct Linear {
        std::vector<double> coef;  // over group vars
        double constant = 0;
    };

    Linear linearize(const Polynomial& poly, std::size_t g, const std::vector<double>& x) const {
        Linear out;
        out.coef.assign(groups_[g].vars.size(), 0.0);
        const int base = groups_[g].vars.front();
        // group vars are consecutive per block; map through a search
        for (const auto& t : poly.terms()) {
            double c = t.coef;
            int local = -1;
            for (int v : t.vars) {
                if (var_group_[static_cast<std::size_t>(v)] == static_cast<int>(g)) {
                    if (local >= 0) throw std::logic_error("monomial holds two variables of one block");
                    local = local_index(g, v);
                } else {
                    c *= x[static_cast<std::size_t>(v)];
                }
            }
            if (local >= 0)
                out.coef[static_cast<std::size_t>(local)] += c;
            else
                out.constant += c;
        }
        (void)base;
        return out;
    }

    int local_index(std::size_t g, int v) const {
        int acc = 0;
        for (int b : groups_[g].blocks) {
            const auto& blk = p_.blocks[static_cast<std::size_t>(b)];
            if (v >= blk.offset && v < blk.offset + blk.size) return acc + (v - blk.offset);
            acc += blk.size;
        }
        return -1;
    }

    void set_group(std::size_t g, const std::vector<double>& y, std::vector<double>& x) const {
        const auto& vars = groups_[g].vars;
        for (std::size_t i = 0; i < vars.size(); ++i) x[static_cast<std::size_t>(vars[i])] = y[i];
    }

    // LP over one group. With `obj` set, optimizes it subject to all
    // constraints touching the group (single-group ones only without `with_soft`); with `phase1`, minimizes the violation
    // of cross-group constraints while keeping single-group ones exact.
    std::optional<std::vector<double>> solve_group(std::size_t g, const std::vector<double>& x,
                                                   const std::vector<double>* obj, bool phase1,
                                                   bool with_soft = true) const {
        const auto n = static_cast<int>(groups_[g].vars.size());
        lp::Problem q;
        q.num_vars = n;
        std::vector<std::pair<const Constraint*, bool>> soft;  // (constraint, is_equality)
        const bool want_soft = with_soft && (obj != nullptr || phase1);
        int acc = 0;
        for (int b : groups_[g].blocks) {
            const auto& blk = p_.blocks[static_cast<std::size_t>(b)];
            lp::SparseRow row;
            for (int i = 0; i < blk.size; ++i) row.emplace_back(acc + i, 1.0);
            q.add_eq(std::move(row), 1.0);
            acc += blk.size;
        }
        auto touches = [&](const std::vector<int>& t) { return std::binary_search(t.begin(), t.end(), static_cast<int>(g)); };
        auto as_row = [&](const Linear& l) {
            lp::SparseRow row;
            for (int i = 0; i < n; ++i)
                if (l.coef[static_cast<std::size_t>(i)] != 0.0) row.emplace_back(i, l.coef[static_cast<std::size_t>(i)]);
            return row;
        };
        for (std::size_t i = 0; i < p_.equalities.size(); ++i) {
            if (!touches(eq_touch_[i])) continue;
            if (eq_hard_[i]) {
                auto l = linearize(p_.equalities[i].lhs, g, x);
                q.add_eq(as_row(l), p_.equalities[i].rhs - l.constant);
            } else if (want_soft) {
                soft.push_back({&p_.equalities[i], true});
            }
        }
        for (std::size_t i = 0; i < p_.inequalities.size(); ++i) {
            if (!touches(le_touch_[i])) continue;
            if (le_hard_[i]) {
                auto l = linearize(p_.inequalities[i].lhs, g, x);
                q.add_le(as_row(l), p_.inequalities[i].rhs - l.constant);
            } else if (want_soft) {
                soft.push_back({&p_.inequalities[i], false});
            }
        }
        if (phase1) {
            // slack pair per soft constraint
            q.num_vars = n + 2 * static_cast<int>(soft.size());
            q.objective.assign(static_cast<std::size_t>(q.num_vars), 0.0);
            for (std::size_t s = 0; s < soft.size(); ++s) {
                auto l = linearize(soft[s].first->lhs, g, x);
                auto row = as_row(l);
                const int sp = n + 2 * static_cast<int>(s);
                row.emplace_back(sp, 1.0);
                row.emplace_back(sp + 1, -1.0);
                q.objective[static_cast<std::size_t>(sp + 1)] = 1.0;
                if (soft[s].second) {
                    q.objective[static_cast<std::size_t>(sp)] = 1.0;
                    q.add_eq(std::move(row), soft[s].first->rhs - l.constant);
                } else {
                    q.add_le(std::move(row), soft[s].first->rhs - l.constant);
                }
            }
        } else {
            for (const auto& [c, is_eq] : soft) {
                auto l = linearize(c->lhs, g, x);
                if (is_eq)
                    q.add_eq(as_row(l), c->rhs - l.constant);
                else
                    q.add_le(as_row(l), c->rhs - l.constant);
            }
            if (obj) q.objective = *obj;
        }
        const bool maximize = !phase1 && sense_ == Sense::maximize;
        auto r = lp::solve(q, maximize, opts_.lp);
        if (r.status != lp::Status::optimal) return std::nullopt;
        r.x.resize(static_cast<std::size_t>(n));
        return r.x;
    }

    const PolyProgram& p_;
    Sense sense_;
    const SolverOptions& opts_;
    std::vector<int> var_group_;
    std::vector<Group> groups_;
    std::vector<std::vector<int>> eq_touch_, le_touch_;
    std::vector<bool> eq_hard_, le_hard_;
};

Optimum run_restart(const PolyProgram& p, Sense sense, const SolverOptions& opts, int index) {
    BlockSearch search(p, sense, opts);
    std::vector<double> x;
    Optimum out;
    const int n_starts = static_cast<int>(opts.starts.size());
    if (index < n_starts) {
        x = opts.starts[static_cast<std::size_t>(index)];
        if (static_cast<int>(x.size()) != p.num_vars) return out;
    } else {
        Rng rng(splitmix64(opts.seed + static_cast<std::uint64_t>(index - n_starts)));
        if (!search.random_start(rng, x)) return out;
    }
    search.repair(x);
    if (p.residual(x) > opts.residual_tol) {
        out.residual = p.residual(x);
        return out;
    }
    search.ascend(x);
    out.value = search.objective(x);
    out.residual = p.residual(x);
    out.status = out.residual <= opts.residual_tol ? SolveStatus::local : SolveStatus::infeasible;
    out.x = std::move(x);
    return out;
}

Optimum pick_best(std::vector<Optimum>& runs, Sense sense) {
    Optimum best;
    best.value = std::numeric_limits<double>::quiet_NaN();
    double worst_residual = 0;
    for (auto& r : runs) {
        worst_residual = std::max(worst_residual, r.residual);
        if (r.status == SolveStatus::infeasible) continue;
        const bool take = best.status == SolveStatus::infeasible ||
                          (sense == Sense::maximize ? r.value > best.value + 1e-12 : r.value < best.value - 1e-12);
        if (take) best = std::move(r);
    }
    if (best.status == SolveStatus::infeasible) best.residual = worst_residual;
    return best;
}

}  // namespace

Optimum solve_poly_serial(const PolyProgram& p, Sense sense, const SolverOptions& opts) {
    if (p.degree() <= 1) return solve_lp(p, sense, opts.lp);
    const int total = static_cast<int>(opts.starts.size()) + opts.restarts;
    std::vector<Optimum> runs;
    for (int i = 0; i < total; ++i) runs.push_back(run_restart(p, sense, opts, i));
    return pick_best(runs, sense);
}

Optimum solve_poly(const PolyProgram& p, Sense sense, const SolverOptions& opts) {
    if (p.degree() <= 1) return solve_lp(p, sense, opts.lp);
    const int total = static_cast<int>(opts.starts.size()) + opts.restarts;
    std::vector<Optimum> runs(static_cast<std::size_t>(total));
#ifdef _OPENMP
    const int nt = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
    for (int i = 0; i < total; ++i) runs[static_cast<std::size_t>(i)] = run_restart(p, sense, opts, i);
    return pick_best(runs, sense);
}

Optimum solve(const PolyProgram& p, Sense sense, const SolverOptions& opts) {
    return p.degree() <= 1 ? solve_lp(p, sense, opts.lp) : solve_poly(p, sense, opts);
}

BoundsResult solve_bounds(const PolyProgram& p, const SolverOptions& opts) {
    auto lo = solve(p, Sense::minimize, opts);
    auto hi = solve(p, Sense::maximize, opts);
    BoundsResult b;
    b.status = combine(lo.status, hi.status);
    b.lower = lo.value;
    b.upper = hi.value;
    b.witness_lower = std::move(lo.x);
    b.witness_upper = std::move(hi.x);
    return b;
}

}  // namespace maxpot
