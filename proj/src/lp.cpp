#include "maxpot/lp.hpp"

#include <cmath>
#include <limits>

namespace maxpot::lp {

namespace {

class Tableau {
public:
    Tableau(int rows, int cols) : m_(rows), n_(cols), t_(static_cast<std::size_t>(rows + 1) * (cols + 1), 0.0) {}

    double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }
    double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }
    double& rhs(int i) { return at(i, n_); }
    double& cost(int j) { return at(m_, j); }  // reduced costs live in the last row
    int rows() const { return m_; }
    int cols() const { return n_; }

    void pivot(int r, int c) {
        const double pv = at(r, c);
        double* pr = &t_[static_cast<std::size_t>(r) * (n_ + 1)];
        for (int j = 0; j <= n_; ++j) pr[j] /= pv;
        pr[c] = 1.0;
        for (int i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* row = &t_[static_cast<std::size_t>(i) * (n_ + 1)];
            const double f = row[c];
            if (f == 0.0) continue;
            for (int j = 0; j <= n_; ++j) {
                if (pr[j] == 0.0) continue;
                row[j] -= f * pr[j];
                if (std::abs(row[j]) < 1e-13) row[j] = 0.0;
            }
            row[c] = 0.0;
        }
    }

    void drop_row(int r) {
        // swap with last constraint row and shrink; cost row moves up
        const auto w = static_cast<std::size_t>(n_ + 1);
        if (r != m_ - 1)
            for (std::size_t j = 0; j < w; ++j) std::swap(t_[r * w + j], t_[(m_ - 1) * w + j]);
        for (std::size_t j = 0; j < w; ++j) t_[(m_ - 1) * w + j] = t_[m_ * w + j];
        --m_;
        t_.resize(static_cast<std::size_t>(m_ + 1) * w);
    }

private:
    int m_, n_;
    std::vector<double> t_;
};

struct Simplex {
    Tableau& t;
    std::vector<int>& basis;
    const std::vector<bool>& allowed;
    const Options& opts;
    long iterations = 0;

    Status run() {
        int degenerate_run = 0;
        bool use_bland = opts.rule == PivotRule::bland;
        while (true) {
            if (++iterations > opts.max_iterations) return Status::iteration_limit;
            int enter = -1;
            double best = -opts.optimality_tol;
            for (int j = 0; j < t.cols(); ++j) {
                if (!allowed[static_cast<std::size_t>(j)]) continue;
                const double d = t.cost(j);
                if (d < best) {
                    enter = j;
                    if (use_bland) break;
                    best = d;
                }
            }
            if (enter < 0) return Status::optimal;
            int leave = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < t.rows(); ++i) {
                const double a = t.at(i, enter);
                if (a <= opts.pivot_tol) continue;
                const double r = t.rhs(i) / a;
                // ties go to the smallest basic index (Bland)
                if (leave < 0 || r < ratio - 1e-12 || (r <= ratio + 1e-12 && basis[i] < basis[leave])) {
                    ratio = std::min(ratio, r);
                    leave = i;
                }
            }
            if (leave < 0) return Status::unbounded;
            if (!use_bland) {
                degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
                if (degenerate_run > 50) use_bland = true;
            }
            t.pivot(leave, enter);
            basis[leave] = enter;
        }
    }
};

}  // namespace

Result solve(const Problem& p, bool maximize, const Options& opts) {
    const int n = p.num_vars;
    const int m_eq = static_cast<int>(p.eq_rows.size());
    const int m_le = static_cast<int>(p.le_rows.size());
    const int m = m_eq + m_le;
    const int n_slack = m_le;
    const int n_art = m;
    const int cols = n + n_slack + n_art;
    Tableau t(m, cols);
    std::vector<int> basis(static_cast<std::size_t>(m));

    for (int i = 0; i < m; ++i) {
        const bool eq = i < m_eq;
        const auto& row = eq ? p.eq_rows[i] : p.le_rows[i - m_eq];
        double b = eq ? p.eq_rhs[i] : p.le_rhs[i - m_eq];
        for (auto [j, v] : row) t.at(i, j) += v;
        if (!eq) t.at(i, n + (i - m_eq)) = 1.0;
        if (b < 0) {
            for (int j = 0; j < n + n_slack; ++j) t.at(i, j) = -t.at(i, j);
            b = -b;
        }
        t.rhs(i) = b;
        t.at(i, n + n_slack + i) = 1.0;
        basis[i] = n + n_slack + i;
    }

    // phase 1: minimize the sum of artificials
    for (int j = 0; j < n + n_slack; ++j) {
        double s = 0;
        for (int i = 0; i < m; ++i) s += t.at(i, j);
        t.cost(j) = -s;
    }
    {
        double s = 0;
        for (int i = 0; i < m; ++i) s += t.rhs(i);
        t.rhs(m) = -s;
    }
    std::vector<bool> allowed(static_cast<std::size_t>(cols), true);
    Result res;
    Simplex s1{t, basis, allowed, opts};
    auto st = s1.run();
    res.iterations = s1.iterations;
    if (st == Status::iteration_limit) {
        res.status = st;
        return res;
    }
    if (-t.rhs(t.rows()) > opts.feasibility_tol) {
        res.status = Status::infeasible;
        return res;
    }
    for (int j = n + n_slack; j < cols; ++j) allowed[static_cast<std::size_t>(j)] = false;
    // drive artificials out of the basis; rows where that is impossible are redundant
    for (int i = 0; i < t.rows();) {
        if (basis[i] < n + n_slack) {
            ++i;
            continue;
        }
        int c = -1;
        double big = opts.pivot_tol;
        for (int j = 0; j < n + n_slack; ++j) {
            if (std::abs(t.at(i, j)) > big) {
                big = std::abs(t.at(i, j));
                c = j;
            }
        }
        if (c >= 0) {
            t.pivot(i, c);
            basis[i] = c;
            ++i;
        } else {
            t.drop_row(i);
            basis[i] = basis.back();
            basis.pop_back();
        }
    }

    // phase 2
    std::vector<double> c(static_cast<std::size_t>(cols), 0.0);
    for (int j = 0; j < n && j < static_cast<int>(p.objective.size()); ++j)
        c[j] = maximize ? -p.objective[j] : p.objective[j];
    for (int j = 0; j < cols; ++j) {
        double d = c[j];
        for (int i = 0; i < t.rows(); ++i) d -= c[basis[i]] * t.at(i, j);
        t.cost(j) = allowed[static_cast<std::size_t>(j)] ? d : 0.0;
    }
    Simplex s2{t, basis, allowed, opts};
    st = s2.run();
    res.iterations += s2.iterations;
    if (st != Status::optimal) {
        res.status = st;
        return res;
    }
    res.status = Status::optimal;
    res.x.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < t.rows(); ++i)
        if (basis[i] < n) res.x[basis[i]] = std::max(0.0, t.rhs(i));
    double obj = 0;
    for (int j = 0; j < n && j < static_cast<int>(p.objective.size()); ++j) obj += p.objective[j] * res.x[j];
    res.objective = obj;
    return res;
}

}  // namespace maxpot::lp
