#include "maxpot/brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace maxpot {

namespace {

using Matrix = std::vector<std::vector<double>>;

// Row-reduce [A | b] and keep the independent rows; false if inconsistent.
bool reduce_rows(Matrix& a, std::vector<double>& b) {
    const std::size_t m = a.size();
    if (m == 0) return true;
    const std::size_t n = a[0].size();
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t piv = row;
        for (std::size_t i = row; i < m; ++i)
            if (std::abs(a[i][col]) > std::abs(a[piv][col])) piv = i;
        if (std::abs(a[piv][col]) < 1e-10) continue;
        std::swap(a[piv], a[row]);
        std::swap(b[piv], b[row]);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = a[i][col] / a[row][col];
            if (f == 0) continue;
            for (std::size_t j = 0; j < n; ++j) a[i][j] -= f * a[row][j];
            b[i] -= f * b[row];
        }
        ++row;
    }
    for (std::size_t i = row; i < m; ++i)
        if (std::abs(b[i]) > 1e-8) return false;
    a.resize(row);
    b.resize(row);
    return true;
}

// B^-1 [A | b] for the basis columns, or false when they are singular.
bool basis_tableau(const Matrix& a, const std::vector<double>& b, const std::vector<std::size_t>& basis,
                   Matrix& t) {
    const std::size_t r = a.size(), n = a[0].size();
    t.assign(r, std::vector<double>(n + 1));
    for (std::size_t i = 0; i < r; ++i) {
        std::copy(a[i].begin(), a[i].end(), t[i].begin());
        t[i][n] = b[i];
    }
    for (std::size_t c = 0; c < r; ++c) {
        const std::size_t col = basis[c];
        std::size_t piv = c;
        for (std::size_t i = c; i < r; ++i)
            if (std::abs(t[i][col]) > std::abs(t[piv][col])) piv = i;
        if (std::abs(t[piv][col]) < 1e-10) return false;
        std::swap(t[piv], t[c]);
        const double d = t[c][col];
        for (auto& x : t[c]) x /= d;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == c) continue;
            const double f = t[i][col];
            if (f == 0) continue;
            for (std::size_t j = 0; j <= n; ++j) t[i][j] -= f * t[c][j];
        }
    }
    return true;
}

bool basis_feasible(const Matrix& t) {
    for (const auto& row : t)
        if (row.back() < -1e-9) return false;
    return true;
}

// Feasible basis of {y >= 0 : A y = b} (rows independent) by a phase-one
// Bland simplex on artificials; false when the set is empty.
bool first_basis(const Matrix& a, const std::vector<double>& b, std::vector<std::size_t>& cols) {
    const std::size_t r = a.size(), n = a[0].size(), w = n + r;
    Matrix t(r, std::vector<double>(w + 1, 0.0));
    std::vector<std::size_t> basis(r);
    for (std::size_t i = 0; i < r; ++i) {
        const double sign = b[i] < 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * a[i][j];
        t[i][n + i] = 1;
        t[i][w] = sign * b[i];
        basis[i] = n + i;
    }
    auto pivot = [&](std::size_t row, std::size_t col) {
        const double d = t[row][col];
        for (auto& x : t[row]) x /= d;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == row || t[i][col] == 0) continue;
            const double f = t[i][col];
            for (std::size_t j = 0; j <= w; ++j) t[i][j] -= f * t[row][j];
        }
        basis[row] = col;
    };
    for (;;) {
        std::size_t enter = w;
        for (std::size_t j = 0; j < n && enter == w; ++j) {
            double rc = 0;
            for (std::size_t i = 0; i < r; ++i)
                if (basis[i] >= n) rc -= t[i][j];
            if (rc < -1e-11) enter = j;
        }
        if (enter == w) break;
        std::size_t leave = r;
        double best = 0;
        for (std::size_t i = 0; i < r; ++i) {
            if (t[i][enter] <= 1e-11) continue;
            const double ratio = t[i][w] / t[i][enter];
            if (leave == r || ratio < best - 1e-12 || (ratio <= best + 1e-12 && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == r) break;
        pivot(leave, enter);
    }
    double infeas = 0;
    for (std::size_t i = 0; i < r; ++i)
        if (basis[i] >= n) infeas += t[i][w];
    if (infeas > 1e-8) return false;
    for (std::size_t i = 0; i < r; ++i) {
        if (basis[i] < n) continue;
        std::size_t col = n;
        for (std::size_t j = 0; j < n && col == n; ++j)
            if (std::abs(t[i][j]) > 1e-9) col = j;
        if (col == n) return false;
        pivot(i, col);
    }
    cols = basis;
    std::sort(cols.begin(), cols.end());
    return true;
}

// Vertices of {y >= 0 : A y = b}. A phase-one basis seeds a breadth-first
// walk over all feasible bases, neighbours differing by one exchange; that
// graph is connected, so every vertex is met.
std::vector<std::vector<double>> vertices(Matrix a, std::vector<double> b, std::size_t n,
                                          const OracleOptions& opts) {
    if (!reduce_rows(a, b)) return {};
    const std::size_t r = a.size();
    if (r == 0) return {std::vector<double>(n, 0.0)};
    Matrix t;
    std::vector<std::size_t> cols;
    if (!first_basis(a, b, cols)) return {};
    if (!basis_tableau(a, b, cols, t) || !basis_feasible(t)) throw std::logic_error("oracle phase one failed");

    std::set<std::vector<std::size_t>> visited{cols};
    std::vector<std::vector<std::size_t>> queue{cols};
    std::set<std::vector<long long>> seen;
    std::vector<std::vector<double>> out;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto basis = queue[head];
        if (!basis_tableau(a, b, basis, t)) continue;
        // row c of t carries basis[c]
        std::vector<double> y(n, 0.0);
        for (std::size_t c = 0; c < r; ++c) y[basis[c]] = std::max(0.0, t[c][n]);
        std::vector<long long> key(n);
        for (std::size_t j = 0; j < n; ++j) key[j] = std::llround(y[j] * 1e9);
        if (seen.insert(key).second) out.push_back(y);
        std::vector<bool> in(n, false);
        for (auto c : basis) in[c] = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (in[j]) continue;
            for (std::size_t i = 0; i < r; ++i) {
                const double piv = t[i][j];
                if (std::abs(piv) < 1e-9) continue;
                const double theta = t[i][n] / piv;
                if (theta < -1e-9) continue;
                bool ok = true;
                for (std::size_t k = 0; k < r && ok; ++k)
                    if (k != i && t[k][n] - t[k][j] * theta < -1e-9) ok = false;
                if (!ok) continue;
                auto next = basis;
                next[i] = j;
                std::sort(next.begin(), next.end());
                if (visited.insert(next).second) {
                    if (visited.size() > opts.max_bases) throw CapExceeded("oracle feasible bases exceed the cap");
                    queue.push_back(std::move(next));
                }
            }
        }
    }
    return out;
}

struct Model {
    const Admg& g;
    ResponseSpace space;
    std::uint64_t total;
    std::vector<std::size_t> obs;  // observed assignment index per full configuration
    std::vector<std::uint64_t> sizes;
    std::vector<std::uint64_t> stride;

    Model(const Admg& graph, const JointDistribution& p) : g(graph), space(graph) {
        total = space.total_size();
        for (std::size_t k = 0; k < space.num_districts(); ++k) sizes.push_back(space.district_size(k));
        stride.assign(sizes.size(), 1);
        for (std::size_t k = sizes.size(); k-- > 1;) stride[k - 1] = stride[k] * sizes[k];
        obs.resize(total);
        const std::vector<int> none(g.size(), kAllValues);
        for (std::uint64_t i = 0; i < total; ++i) obs[i] = p.index(evaluate(g, space, space.decode(i), none));
    }

    std::uint64_t digit(std::uint64_t full, std::size_t k) const { return (full / stride[k]) % sizes[k]; }

    std::vector<char> member(const Statement& s) const {
        std::vector<char> m(total);
        for (std::uint64_t i = 0; i < total; ++i) m[i] = satisfies(g, space, space.decode(i), s) ? 1 : 0;
        return m;
    }

    // Districts on which the indicator/coefficient array actually depends.
    template <class T>
    std::vector<int> depends(const std::vector<T>& m) const {
        std::vector<int> out;
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            for (std::uint64_t i = 0; i < total; ++i) {
                const auto base = i - digit(i, k) * stride[k];
                if (std::abs(static_cast<double>(m[i]) - static_cast<double>(m[base])) > 1e-15) {
                    out.push_back(static_cast<int>(k));
                    break;
                }
            }
        }
        return out;
    }
};

// Direct c-factor from the joint table, independent of the library tables.
double direct_cfactor(const Admg& g, const JointDistribution& p, const NodeSet& district,
                      const std::vector<int>& v, bool& defined) {
    const auto& topo = g.topological_order();
    auto prefix_mass = [&](std::size_t upto) {
        double s = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            auto u = p.assignment(i);
            bool match = true;
            for (std::size_t t = 0; t < upto && match; ++t) match = u[topo[t]] == v[topo[t]];
            if (match) s += p[i];
        }
        return s;
    };
    double q = 1;
    defined = true;
    for (std::size_t t = 0; t < topo.size(); ++t) {
        if (!district.contains(topo[t])) continue;
        const double den = prefix_mass(t);
        if (den <= 0) {
            defined = false;
            return 0;
        }
        q *= prefix_mass(t + 1) / den;
    }
    return q;
}

struct DistrictSystem {
    Matrix a;
    std::vector<double> b;
};

// Observational rows of district k over one copy placed at column `offset`.
void add_observational(const Model& mod, const JointDistribution& p, std::size_t k, std::size_t width,
                       std::size_t offset, DistrictSystem& sys) {
    const auto part = districts(mod.g);
    const std::size_t n = mod.sizes[k];
    std::vector<double> simplex(width, 0.0);
    for (std::size_t j = 0; j < n; ++j) simplex[offset + j] = 1;
    sys.a.push_back(simplex);
    sys.b.push_back(1.0);
    for (std::size_t vi = 0; vi < p.size(); ++vi) {
        auto v = p.assignment(vi);
        bool defined = true;
        const double rhs = direct_cfactor(mod.g, p, part[k].observed, v, defined);
        if (!defined) continue;
        std::vector<double> row(width, 0.0);
        for (std::uint64_t i = 0; i < mod.total; ++i)
            if (mod.obs[i] == vi) row[offset + mod.digit(i, k)] = 1;
        sys.a.push_back(std::move(row));
        sys.b.push_back(rhs);
    }
}

std::vector<double> projection(const Model& mod, const std::vector<char>& m, std::size_t k) {
    std::vector<double> row(mod.sizes[k], 0.0);
    // membership depends only on district k: read it off with the other digits at 0
    for (std::uint64_t c = 0; c < mod.sizes[k]; ++c) row[c] = m[c * mod.stride[k]];
    return row;
}

std::vector<double> coefficients(const Model& mod, const Query& q) {
    std::vector<double> c(mod.total, 0.0);
    for (const auto& t : q.terms) {
        auto m = mod.member(t.statement);
        for (std::uint64_t i = 0; i < mod.total; ++i)
            if (m[i]) c[i] += t.coefficient;
    }
    return c;
}

// Iterate over tuples of vertices for the listed districts.
void for_each_tuple(const std::vector<std::vector<std::vector<double>>>& verts, const OracleOptions& opts,
                    const std::function<void(const std::vector<const std::vector<double>*>&)>& fn) {
    long double count = 1;
    for (const auto& v : verts) count *= static_cast<long double>(v.size());
    if (count > static_cast<long double>(opts.max_vertex_tuples)) throw CapExceeded("oracle vertex tuples exceed the cap");
    std::vector<std::size_t> idx(verts.size(), 0);
    std::vector<const std::vector<double>*> cur(verts.size());
    if (count == 0) return;
    while (true) {
        for (std::size_t i = 0; i < verts.size(); ++i) cur[i] = &verts[i][idx[i]];
        fn(cur);
        std::size_t i = verts.size();
        while (i > 0) {
            --i;
            if (++idx[i] < verts[i].size()) break;
            idx[i] = 0;
            if (i == 0) return;
        }
        if (verts.empty()) return;
    }
}

}  // namespace

BoundsResult brute_force_bounds(const Admg& g, const JointDistribution& p, const Query& q,
                                const std::vector<OutcomeCell>& cells, const OracleOptions& opts) {
    Model mod(g, p);
    const std::size_t K = mod.sizes.size();
    std::vector<DistrictSystem> sys(K);
    for (std::size_t k = 0; k < K; ++k) add_observational(mod, p, k, mod.sizes[k], 0, sys[k]);
    BoundsResult res;
    for (const auto& c : cells) {
        auto m = mod.member(c.statement);
        auto deps = mod.depends(m);
        if (deps.size() > 1) throw InputError("oracle supports only single-district cells");
        if (deps.empty()) {
            if (std::abs((m[0] ? 1.0 : 0.0) - *c.value) > 1e-9) return res;  // infeasible
            continue;
        }
        auto k = static_cast<std::size_t>(deps[0]);
        sys[k].a.push_back(projection(mod, m, k));
        sys[k].b.push_back(*c.value);
    }
    const auto coef = coefficients(mod, q);
    const auto deps = mod.depends(coef);
    std::vector<std::vector<std::vector<double>>> verts;
    for (std::size_t k = 0; k < K; ++k) {
        auto v = vertices(sys[k].a, sys[k].b, mod.sizes[k], opts);
        if (v.empty()) return res;  // infeasible
        if (std::find(deps.begin(), deps.end(), static_cast<int>(k)) == deps.end()) v.resize(1);
        verts.push_back(std::move(v));
    }
    double lo = INFINITY, hi = -INFINITY;
    for_each_tuple(verts, opts, [&](const std::vector<const std::vector<double>*>& y) {
        double val = 0;
        for (std::uint64_t i = 0; i < mod.total; ++i) {
            if (coef[i] == 0) continue;
            double w = coef[i];
            for (std::size_t k = 0; k < K && w != 0; ++k) w *= (*y[k])[mod.digit(i, k)];
            val += w;
        }
        lo = std::min(lo, val);
        hi = std::max(hi, val);
    });
    res.lower = lo;
    res.upper = hi;
    res.status = SolveStatus::exact;
    return res;
}

double brute_force_worst_width(const Admg& g, const JointDistribution& p, const Query& q,
                               const std::vector<OutcomeCell>& cells, const OracleOptions& opts) {
    Model mod(g, p);
    const std::size_t K = mod.sizes.size();
    std::vector<DistrictSystem> sys(K);
    for (std::size_t k = 0; k < K; ++k) {
        add_observational(mod, p, k, 2 * mod.sizes[k], 0, sys[k]);
        add_observational(mod, p, k, 2 * mod.sizes[k], mod.sizes[k], sys[k]);
    }
    for (const auto& c : cells) {
        auto m = mod.member(c.statement);
        auto deps = mod.depends(m);
        if (deps.size() > 1) throw InputError("oracle supports only single-district cells");
        if (deps.empty()) continue;
        auto k = static_cast<std::size_t>(deps[0]);
        auto proj = projection(mod, m, k);
        std::vector<double> row(2 * mod.sizes[k], 0.0);
        for (std::size_t j = 0; j < proj.size(); ++j) {
            row[j] = proj[j];
            row[mod.sizes[k] + j] = -proj[j];
        }
        sys[k].a.push_back(std::move(row));
        sys[k].b.push_back(0.0);
    }
    const auto coef = coefficients(mod, q);
    const auto deps = mod.depends(coef);
    std::vector<std::vector<std::vector<double>>> verts;
    for (std::size_t k = 0; k < K; ++k) {
        auto v = vertices(sys[k].a, sys[k].b, 2 * mod.sizes[k], opts);
        if (v.empty()) throw InfeasibleError("oracle: empty district polytope");
        if (std::find(deps.begin(), deps.end(), static_cast<int>(k)) == deps.end()) v.resize(1);
        verts.push_back(std::move(v));
    }
    double best = -INFINITY;
    for_each_tuple(verts, opts, [&](const std::vector<const std::vector<double>*>& y) {
        double val = 0;
        for (std::uint64_t i = 0; i < mod.total; ++i) {
            if (coef[i] == 0) continue;
            double u = coef[i], l = coef[i];
            for (std::size_t k = 0; k < K; ++k) {
                const auto d = mod.digit(i, k);
                u *= (*y[k])[d];
                l *= (*y[k])[mod.sizes[k] + d];
            }
            val += u - l;
        }
        best = std::max(best, val);
    });
    return best;
}

}  // namespace maxpot
