#include "maxpot/program.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace maxpot {

NodeSet active_nodes(const Admg& g, const Statement& s) {
    NodeSet active(g.size());
    for (const auto& w : s.worlds) {
        const auto free = g.all_nodes() - intervention_nodes(g, w);
        active |= ancestors_within(g, outcome_nodes(g, w), free);
    }
    return active;
}

RelevantTypes relevant_response_types(const Admg& g, const Statement& s) {
    RelevantTypes r;
    r.active = active_nodes(g, s);
    r.own_noise = NodeSet(g.size());
    const auto& bi = g.bidirected_edges();
    for (std::size_t e = 0; e < bi.size(); ++e)
        if (r.active.contains(bi[e].first) || r.active.contains(bi[e].second))
            r.latents.push_back(static_cast<int>(e));
    for (NodeId v : r.active.to_vector())
        if (g.spouses(v).empty()) r.own_noise.insert(v);
    return r;
}

RelevantTypes relevant_response_types(const Admg& g, const Query& q) {
    Statement all;
    for (const auto& t : q.terms)
        all.worlds.insert(all.worlds.end(), t.statement.worlds.begin(), t.statement.worlds.end());
    return relevant_response_types(g, all);
}

std::vector<int> active_districts(const Admg& g, const DistrictPartition& part, const Statement& s) {
    std::vector<int> out;
    for (NodeId v : active_nodes(g, s).to_vector()) out.push_back(part.of(v));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

DistrictHull hull_from(const Admg& g, RelevantTypes rel) {
    const auto part = districts(g);
    DistrictHull h;
    h.scope_nodes = NodeSet(g.size());
    for (NodeId v : rel.active.to_vector()) h.districts.push_back(part.of(v));
    std::sort(h.districts.begin(), h.districts.end());
    h.districts.erase(std::unique(h.districts.begin(), h.districts.end()), h.districts.end());
    for (int k : h.districts) {
        h.scope_nodes |= part[k].observed;
        h.scope_latents.insert(h.scope_latents.end(), part[k].latents.begin(), part[k].latents.end());
    }
    std::sort(h.scope_latents.begin(), h.scope_latents.end());
    h.relevant = std::move(rel);
    return h;
}

}  // namespace

DistrictHull district_hull(const Admg& g, const Query& q) {
    return hull_from(g, relevant_response_types(g, q));
}

DistrictHull district_hull(const Admg& g, const Statement& s) {
    return hull_from(g, relevant_response_types(g, s));
}

ProgramContext::ProgramContext(Admg g, JointDistribution p, std::uint64_t cap, RowOptions opts)
    : g_(std::move(g)),
      p_(std::move(p)),
      space_(g_, cap),
      cf_(g_, p_),
      opts_(opts),
      cache_(new Cache[space_.num_districts()]) {}

const std::vector<DistrictRow>& ProgramContext::rows(std::size_t k) const {
    auto& c = cache_[k];
    std::call_once(c.once, [&] { compute_rows(k, c); });
    return c.rows;
}

std::size_t ProgramContext::dropped_rows(std::size_t k) const {
    rows(k);
    return cache_[k].dropped;
}

void ProgramContext::compute_rows(std::size_t k, Cache& c) const {
    const auto& d = partition()[k];
    NodeSet key_nodes = d.observed;
    for (NodeId v : d.observed.to_vector())
        for (NodeId u : g_.parents(v)) key_nodes.insert(u);
    const auto key = key_nodes.to_vector();

    struct Acc {
        std::vector<int> rep;
        double lo = INFINITY, hi = -INFINITY;
        bool defined = false;
    };
    std::map<std::size_t, Acc> groups;
    for (std::size_t i = 0; i < p_.size(); ++i) {
        auto v = p_.assignment(i);
        std::size_t idx = 0;
        for (NodeId u : key) idx = idx * static_cast<std::size_t>(g_.cardinality(u)) + v[u];
        auto& a = groups[idx];
        if (a.rep.empty()) a.rep = v;
        auto q = cf_.q(k, v);
        if (!q.defined) continue;
        a.defined = true;
        a.lo = std::min(a.lo, q.value);
        a.hi = std::max(a.hi, q.value);
    }
    // equal index sets only arise from equal keys, so keys dedupe rows
    for (auto& [idx, a] : groups) {
        if (!a.defined) {
            ++c.dropped;
            continue;
        }
        if (a.hi - a.lo > opts_.consistency_tol) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "distribution/graph mismatch: c-factor of district %zu varies by %.3g across "
                          "assignments that agree on the district and its parents",
                          k, a.hi - a.lo);
            throw InputError(buf);
        }
        c.rows.push_back({district_set(space_, k, a.rep), 0.5 * (a.lo + a.hi)});
    }
}

int PolyProgram::offset(int district, int copy) const {
    for (const auto& b : blocks)
        if (b.district == district && b.copy == copy) return b.offset;
    return -1;
}

int PolyProgram::degree() const {
    int d = objective.degree();
    for (const auto& c : equalities) d = std::max(d, c.lhs.degree());
    for (const auto& c : inequalities) d = std::max(d, c.lhs.degree());
    return d;
}

double PolyProgram::residual(const std::vector<double>& x) const {
    double r = 0;
    for (const auto& b : blocks) {
        double s = 0;
        for (int i = 0; i < b.size; ++i) {
            const double xi = x[static_cast<std::size_t>(b.offset + i)];
            r = std::max(r, -xi);
            s += xi;
        }
        r = std::max(r, std::abs(s - 1.0));
    }
    for (const auto& c : equalities) r = std::max(r, std::abs(c.lhs.evaluate(x) - c.rhs));
    for (const auto& c : inequalities) r = std::max(r, c.lhs.evaluate(x) - c.rhs);
    return r;
}

std::string PolyProgram::dump() const {
    std::string out = "program\n";
    out += std::string("sense ") + (sense == Sense::maximize ? "max" : "min") + "\n";
    out += "vars " + std::to_string(num_vars) + "\n";
    for (const auto& b : blocks)
        out += "block district=" + std::to_string(b.district) + " copy=" + std::to_string(b.copy) +
               " offset=" + std::to_string(b.offset) + " size=" + std::to_string(b.size) + "\n";
    out += "objective\n" + objective.to_string() + "end\n";
    char buf[64];
    for (const auto& c : equalities) {
        std::snprintf(buf, sizeof buf, "%.17g", c.rhs);
        out += "eq " + std::string(buf) + (c.tag.empty() ? "" : " " + c.tag) + "\n" + c.lhs.to_string() + "end\n";
    }
    for (const auto& c : inequalities) {
        std::snprintf(buf, sizeof buf, "%.17g", c.rhs);
        out += "le " + std::string(buf) + (c.tag.empty() ? "" : " " + c.tag) + "\n" + c.lhs.to_string() + "end\n";
    }
    return out;
}

namespace {

void add_blocks(const ProgramContext& ctx, PolyProgram& p, const std::vector<int>& districts) {
    for (int copy = 0; copy < p.copies; ++copy) {
        for (int k : districts) {
            if (p.offset(k, copy) >= 0) continue;
            const auto size = static_cast<int>(ctx.space().district_size(static_cast<std::size_t>(k)));
            p.blocks.push_back({k, copy, p.num_vars, size});
            p.num_vars += size;
            const auto& rows = ctx.rows(static_cast<std::size_t>(k));
            for (const auto& row : rows) {
                Constraint c;
                for (auto r : row.configs) c.lhs.add(Monomial{p.num_vars - size + static_cast<int>(r)}, 1.0);
                c.rhs = row.rhs;
                c.tag = "obs district=" + std::to_string(k) + " copy=" + std::to_string(copy);
                p.equalities.push_back(std::move(c));
            }
            if (const auto dropped = ctx.dropped_rows(static_cast<std::size_t>(k)); dropped && copy == 0)
                p.warnings.push_back("district " + std::to_string(k) + ": dropped " +
                                     std::to_string(dropped) +
                                     " observational rows with a zero-mass conditioning prefix");
        }
    }
    p.scope.insert(p.scope.end(), districts.begin(), districts.end());
    std::sort(p.scope.begin(), p.scope.end());
    p.scope.erase(std::unique(p.scope.begin(), p.scope.end()), p.scope.end());
}

}  // namespace

Polynomial statement_polynomial(const ProgramContext& ctx, const PolyProgram& p, const Statement& s,
                                int copy) {
    const auto& g = ctx.graph();
    const auto& space = ctx.space();
    const auto act = active_districts(g, ctx.partition(), s);
    std::vector<int> offsets;
    std::uint64_t total = 1;
    for (int k : act) {
        const int off = p.offset(k, copy);
        if (off < 0) throw std::logic_error("statement reaches a district outside the program scope");
        offsets.push_back(off);
        const auto n = space.district_size(static_cast<std::size_t>(k));
        if (total > space.cap() / n) throw CapExceeded("statement enumeration exceeds the cap");
        total *= n;
    }
    Polynomial poly;
    std::vector<ConfigIndex> r(space.num_districts(), 0);
    for (std::uint64_t i = 0; i < total; ++i) {
        auto local = space.decode(i, act);
        for (std::size_t j = 0; j < act.size(); ++j) r[static_cast<std::size_t>(act[j])] = local[j];
        if (!satisfies(g, space, r, s)) continue;
        Monomial m;
        for (std::size_t j = 0; j < act.size(); ++j) m.push_back(offsets[j] + static_cast<int>(local[j]));
        poly.add(std::move(m), 1.0);
    }
    poly.normalize();
    return poly;
}

Polynomial query_polynomial(const ProgramContext& ctx, const PolyProgram& p, const Query& q, int copy) {
    Polynomial out;
    for (const auto& t : q.terms) out.add_scaled(statement_polynomial(ctx, p, t.statement, copy), t.coefficient);
    out.normalize();
    return out;
}

std::vector<int> close_scope(const ProgramContext& ctx, std::vector<int> scope,
                             const std::vector<OutcomeCell>& cells, bool strict, std::vector<bool>* kept) {
    std::vector<std::vector<int>> act;
    for (const auto& c : cells) act.push_back(active_districts(ctx.graph(), ctx.partition(), c.statement));
    std::vector<bool> in(cells.size(), false);
    auto contains = [&](int k) { return std::find(scope.begin(), scope.end(), k) != scope.end(); };
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (in[i]) continue;
            bool touches = strict;
            for (int k : act[i]) touches = touches || contains(k);
            if (!touches) continue;
            in[i] = true;
            changed = true;
            for (int k : act[i])
                if (!contains(k)) scope.push_back(k);
        }
    }
    std::sort(scope.begin(), scope.end());
    if (kept) *kept = in;
    return scope;
}

PolyProgram build_base(const ProgramContext& ctx, const Query& q, const BuildOptions&) {
    validate(ctx.graph(), q);
    PolyProgram p;
    p.copies = 1;
    const auto hull = district_hull(ctx.graph(), q);
    add_blocks(ctx, p, hull.districts);
    p.objective = query_polynomial(ctx, p, q, 0);
    return p;
}

PolyProgram add_experiments(const ProgramContext& ctx, PolyProgram p, const std::vector<OutcomeCell>& cells,
                            const BuildOptions& opts) {
    for (const auto& c : cells) {
        if (!c.value) throw InputError("experiment cell has no value");
        if (*c.value < -1e-12 || *c.value > 1 + 1e-12) throw InputError("experiment cell value outside [0,1]");
    }
    std::vector<bool> kept;
    auto scope = close_scope(ctx, p.scope, cells, opts.strict, &kept);
    add_blocks(ctx, p, scope);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!kept[i]) {
            ++p.cells_dropped;
            continue;
        }
        for (int copy = 0; copy < p.copies; ++copy) {
            Constraint c;
            c.lhs = statement_polynomial(ctx, p, cells[i].statement, copy);
            c.rhs = *cells[i].value;
            c.tag = "cell " + std::to_string(i) + " copy=" + std::to_string(copy);
            p.equalities.push_back(std::move(c));
        }
    }
    return p;
}

PolyProgram build_coupled(const ProgramContext& ctx, const Query& q, const std::vector<OutcomeCell>& cells,
                          const BuildOptions& opts) {
    validate(ctx.graph(), q);
    PolyProgram p;
    p.copies = 2;
    p.sense = Sense::maximize;
    const auto hull = district_hull(ctx.graph(), q);
    std::vector<bool> kept;
    auto scope = close_scope(ctx, hull.districts, cells, opts.strict, &kept);
    add_blocks(ctx, p, scope);
    p.objective = query_polynomial(ctx, p, q, 0);
    p.objective.add_scaled(query_polynomial(ctx, p, q, 1), -1.0);
    p.objective.normalize();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!kept[i]) {
            ++p.cells_dropped;
            continue;
        }
        Constraint c;
        c.lhs = statement_polynomial(ctx, p, cells[i].statement, 0);
        c.lhs.add_scaled(statement_polynomial(ctx, p, cells[i].statement, 1), -1.0);
        c.lhs.normalize();
        c.rhs = 0;
        c.tag = "coupling cell " + std::to_string(i);
        p.equalities.push_back(std::move(c));
    }
    return p;
}

}  // namespace maxpot
