#include "maxpot/response.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "text_util.hpp"

namespace maxpot {

bool Statement::has_family_marker() const {
    for (const auto& w : worlds) {
        for (auto [v, x] : w.interventions)
            if (x == kAllValues) return true;
        for (auto [v, x] : w.outcomes)
            if (x == kAllValues) return true;
    }
    return false;
}

ResponseSpace::ResponseSpace(const Admg& g, std::uint64_t cap)
    : g_(&g), part_(districts(g)), local_(g.size(), 0), cap_(cap) {
    const double log2_cap = std::log2(static_cast<double>(cap));
    for (const auto& d : part_.districts) {
        DistrictSpace s;
        s.nodes = d.observed.to_vector();
        std::vector<double> log_fn;
        for (std::size_t j = 0; j < s.nodes.size(); ++j) {
            NodeId v = s.nodes[j];
            local_[v] = static_cast<int>(j);
            s.parents.push_back(g.parents(v));
            double lp = 0;
            for (NodeId p : g.parents(v)) lp += std::log2(static_cast<double>(g.cardinality(p)));
            // parent tuples can themselves be astronomically many
            std::uint64_t pc = 1;
            if (lp < 62)
                for (NodeId p : g.parents(v)) pc *= static_cast<std::uint64_t>(g.cardinality(p));
            s.parent_configs.push_back(lp < 62 ? pc : 0);
            double lf = std::exp2(lp) * std::log2(static_cast<double>(g.cardinality(v)));
            log_fn.push_back(lf);
            s.log2_size += lf;
        }
        s.enumerable = s.log2_size <= log2_cap + 1e-9;
        if (s.enumerable) {
            std::vector<std::uint64_t> fn(s.nodes.size());
            s.size = 1;
            for (std::size_t j = 0; j < s.nodes.size(); ++j) {
                std::uint64_t f = 1;
                for (std::uint64_t p = 0; p < s.parent_configs[j]; ++p)
                    f *= static_cast<std::uint64_t>(g.cardinality(s.nodes[j]));
                fn[j] = f;
                s.size *= f;
            }
            std::uint64_t node_stride = s.size;
            s.digit_stride.resize(s.nodes.size());
            for (std::size_t j = 0; j < s.nodes.size(); ++j) {
                node_stride /= fn[j];
                const auto c = static_cast<std::uint64_t>(g.cardinality(s.nodes[j]));
                auto& ds = s.digit_stride[j];
                ds.assign(s.parent_configs[j], 0);
                std::uint64_t place = node_stride;
                for (std::uint64_t p = s.parent_configs[j]; p-- > 0;) {
                    ds[p] = place;
                    place *= c;
                }
            }
        }
        spaces_.push_back(std::move(s));
    }
}

std::uint64_t ResponseSpace::district_size(std::size_t k) const {
    const auto& s = spaces_[k];
    if (!s.enumerable)
        throw CapExceeded("response space of district " + std::to_string(k) + " has 2^" +
                          std::to_string(s.log2_size) + " configurations (cap " +
                          std::to_string(cap_) + ")");
    return s.size;
}

std::uint64_t ResponseSpace::total_size() const {
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < spaces_.size(); ++k) {
        auto s = district_size(k);
        if (total > cap_ / s) throw CapExceeded("full response space exceeds the enumeration cap");
        total *= s;
    }
    return total;
}

std::uint64_t ResponseSpace::parent_config(NodeId v, const std::vector<int>& values) const {
    std::uint64_t p = 0;
    for (NodeId u : g_->parents(v)) p = p * static_cast<std::uint64_t>(g_->cardinality(u)) + values[u];
    return p;
}

int ResponseSpace::output(NodeId v, ConfigIndex c, std::uint64_t p) const {
    const auto& s = spaces_[part_.of(v)];
    const int j = local_[v];
    return static_cast<int>((c / s.digit_stride[j][p]) %
                            static_cast<std::uint64_t>(g_->cardinality(v)));
}

std::vector<ConfigIndex> ResponseSpace::decode(ConfigIndex full) const {
    std::vector<ConfigIndex> r(spaces_.size());
    for (std::size_t k = spaces_.size(); k-- > 0;) {
        const auto s = district_size(k);
        r[k] = full % s;
        full /= s;
    }
    return r;
}

ConfigIndex ResponseSpace::encode(const std::vector<ConfigIndex>& per_district) const {
    ConfigIndex full = 0;
    for (std::size_t k = 0; k < spaces_.size(); ++k) full = full * district_size(k) + per_district[k];
    return full;
}

std::vector<ConfigIndex> ResponseSpace::decode(ConfigIndex partial,
                                               const std::vector<int>& subset) const {
    std::vector<ConfigIndex> r(subset.size());
    for (std::size_t i = subset.size(); i-- > 0;) {
        const auto s = district_size(static_cast<std::size_t>(subset[i]));
        r[i] = partial % s;
        partial /= s;
    }
    return r;
}

ConfigIndex ResponseSpace::encode(const std::vector<ConfigIndex>& configs,
                                  const std::vector<int>& subset) const {
    ConfigIndex out = 0;
    for (std::size_t i = 0; i < subset.size(); ++i)
        out = out * district_size(static_cast<std::size_t>(subset[i])) + configs[i];
    return out;
}

std::string ResponseSpace::describe(std::size_t k, ConfigIndex c) const {
    const auto& s = spaces_[k];
    std::string out;
    for (std::size_t j = 0; j < s.nodes.size(); ++j) {
        NodeId v = s.nodes[j];
        if (j) out += " ";
        out += g_->name(v) + ":";
        if (s.parents[j].empty()) {
            out += std::to_string(output(v, c, 0));
            continue;
        }
        out += "(";
        for (std::uint64_t p = 0; p < s.parent_configs[j]; ++p) {
            if (p) out += ",";
            out += std::to_string(output(v, c, p));
        }
        out += ")";
    }
    return out;
}

std::vector<int> evaluate(const Admg& g, const ResponseSpace& space,
                          const std::vector<ConfigIndex>& r, const std::vector<int>& interventions) {
    std::vector<int> values(g.size(), 0);
    const auto& part = space.partition();
    for (NodeId v : g.topological_order()) {
        if (interventions[v] != kAllValues) {
            values[v] = interventions[v];
            continue;
        }
        values[v] = space.output(v, r[part.of(v)], space.parent_config(v, values));
    }
    return values;
}

std::vector<int> evaluate(const Admg& g, const ResponseSpace& space,
                          const std::vector<ConfigIndex>& r, const Assignment& interventions) {
    std::vector<int> dense(g.size(), kAllValues);
    for (auto [v, x] : interventions) dense[v] = x;
    return evaluate(g, space, r, dense);
}

bool satisfies(const Admg& g, const ResponseSpace& space, const std::vector<ConfigIndex>& r,
               const Statement& s) {
    std::vector<int> dense(g.size());
    for (const auto& w : s.worlds) {
        std::fill(dense.begin(), dense.end(), kAllValues);
        for (auto [v, x] : w.interventions) dense[v] = x;
        auto values = evaluate(g, space, r, dense);
        for (auto [v, x] : w.outcomes)
            if (values[v] != x) return false;
    }
    return true;
}

ConfigSet compatible_set_serial(const Admg& g, const ResponseSpace& space, const Statement& s) {
    const auto total = space.total_size();
    ConfigSet out;
    for (ConfigIndex i = 0; i < total; ++i)
        if (satisfies(g, space, space.decode(i), s)) out.push_back(i);
    return out;
}

ConfigSet compatible_set(const Admg& g, const ResponseSpace& space, const Statement& s, int threads) {
    const auto total = static_cast<std::int64_t>(space.total_size());
#ifdef _OPENMP
    const int nt = threads > 0 ? threads : omp_get_max_threads();
    std::vector<ConfigSet> parts(static_cast<std::size_t>(nt));
#pragma omp parallel num_threads(nt)
    {
        auto& mine = parts[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < total; ++i) {
            const auto idx = static_cast<ConfigIndex>(i);
            if (satisfies(g, space, space.decode(idx), s)) mine.push_back(idx);
        }
    }
    // static schedule hands out contiguous ascending chunks in thread order
    ConfigSet out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
#else
    (void)threads;
    (void)total;
    return compatible_set_serial(g, space, s);
#endif
}

ConfigSet district_set(const ResponseSpace& space, std::size_t k, const std::vector<int>& v) {
    const auto& ds = space.district(k);
    const auto n = space.district_size(k);
    std::vector<std::uint64_t> pcfg(ds.nodes.size());
    for (std::size_t j = 0; j < ds.nodes.size(); ++j) pcfg[j] = space.parent_config(ds.nodes[j], v);
    ConfigSet out;
    for (ConfigIndex c = 0; c < n; ++c) {
        bool ok = true;
        for (std::size_t j = 0; j < ds.nodes.size() && ok; ++j)
            ok = space.output(ds.nodes[j], c, pcfg[j]) == v[ds.nodes[j]];
        if (ok) out.push_back(c);
    }
    return out;
}

ConfigSet district_compatible_set(const Admg&, const ResponseSpace& space,
                                  const std::vector<int>& subset, const std::vector<int>& v) {
    ConfigSet acc{0};
    for (int k : subset) {
        auto hk = district_set(space, static_cast<std::size_t>(k), v);
        const auto n = space.district_size(static_cast<std::size_t>(k));
        ConfigSet next;
        next.reserve(acc.size() * hk.size());
        for (auto a : acc)
            for (auto c : hk) next.push_back(a * n + c);
        acc = std::move(next);
    }
    return acc;
}

JointDistribution::JointDistribution(std::vector<int> cardinalities, std::vector<double> probs)
    : cards_(std::move(cardinalities)), probs_(std::move(probs)) {
    std::size_t n = 1;
    for (int c : cards_) n *= static_cast<std::size_t>(c);
    if (n != probs_.size()) throw InputError("distribution table size does not match cardinalities");
    double total = 0;
    for (double p : probs_) {
        if (p < 0 || !std::isfinite(p)) throw InputError("distribution has a negative or non-finite entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InputError("distribution sums to " + std::to_string(total) + ", not 1");
}

JointDistribution JointDistribution::uniform(const Admg& g) {
    std::vector<int> cards;
    std::size_t n = 1;
    for (const auto& v : g.nodes()) {
        cards.push_back(v.cardinality);
        n *= static_cast<std::size_t>(v.cardinality);
    }
    return JointDistribution(cards, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::size_t JointDistribution::index(const std::vector<int>& v) const {
    std::size_t i = 0;
    for (std::size_t j = 0; j < cards_.size(); ++j) i = i * static_cast<std::size_t>(cards_[j]) + v[j];
    return i;
}

std::vector<int> JointDistribution::assignment(std::size_t index) const {
    std::vector<int> v(cards_.size());
    for (std::size_t j = cards_.size(); j-- > 0;) {
        v[j] = static_cast<int>(index % static_cast<std::size_t>(cards_[j]));
        index /= static_cast<std::size_t>(cards_[j]);
    }
    return v;
}

void JointDistribution::check_against(const Admg& g) const {
    if (cards_.size() != g.size()) throw InputError("distribution and graph have different node counts");
    for (std::size_t j = 0; j < cards_.size(); ++j)
        if (cards_[j] != g.cardinality(static_cast<NodeId>(j)))
            throw InputError("distribution cardinality mismatch at node '" +
                             g.name(static_cast<NodeId>(j)) + "'");
}

JointDistribution parse_distribution(const Admg& g, std::string_view text) {
    std::vector<int> column_node;
    std::vector<int> cards;
    std::size_t total = 1;
    for (const auto& v : g.nodes()) {
        cards.push_back(v.cardinality);
        total *= static_cast<std::size_t>(v.cardinality);
    }
    if (total > (std::size_t{1} << 28)) throw CapExceeded("joint support too large for a table");
    std::vector<double> probs(total, 0.0);
    std::vector<bool> seen(total, false);
    int line_no = 0;
    JointDistribution shape(cards, [&] {
        std::vector<double> u(total, 0.0);
        u[0] = 1.0;
        return u;
    }());
    for (auto line : detail::split_lines(text)) {
        ++line_no;
        auto toks = detail::tokenize_line(line);
        if (toks.empty()) continue;
        if (column_node.empty()) {
            if (toks.size() != g.size())
                throw ParseError("header must name all " + std::to_string(g.size()) + " nodes", line_no,
                                 toks[0].column);
            std::vector<bool> used(g.size(), false);
            for (const auto& t : toks) {
                auto v = g.find(t.text);
                if (!v) throw ParseError("unknown node '" + t.text + "' in header", line_no, t.column);
                if (used[*v]) throw ParseError("node '" + t.text + "' repeated in header", line_no, t.column);
                used[*v] = true;
                column_node.push_back(*v);
            }
            continue;
        }
        if (toks.size() != g.size() + 1)
            throw ParseError("expected " + std::to_string(g.size()) + " values and a probability", line_no,
                             toks[0].column);
        std::vector<int> v(g.size());
        for (std::size_t c = 0; c < g.size(); ++c) {
            const auto& t = toks[c];
            int x = 0;
            auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), x);
            const NodeId node = column_node[c];
            if (ec != std::errc() || ptr != t.text.data() + t.text.size() || x < 0 ||
                x >= g.cardinality(node))
                throw ParseError("value '" + t.text + "' outside the support of '" + g.name(node) + "'",
                                 line_no, t.column);
            v[node] = x;
        }
        const auto& pt = toks.back();
        char* end = nullptr;
        double p = std::strtod(pt.text.c_str(), &end);
        if (end != pt.text.c_str() + pt.text.size() || !std::isfinite(p) || p < 0)
            throw ParseError("bad probability '" + pt.text + "'", line_no, pt.column);
        const auto idx = shape.index(v);
        if (seen[idx]) throw ParseError("duplicate assignment", line_no, toks[0].column);
        seen[idx] = true;
        probs[idx] = p;
    }
    if (column_node.empty()) throw InputError("distribution file has no header");
    return JointDistribution(cards, std::move(probs));
}

JointDistribution read_distribution(const Admg& g, const std::string& path) {
    return parse_distribution(g, detail::read_file(path));
}

std::string format_distribution(const Admg& g, const JointDistribution& p) {
    std::string out;
    for (std::size_t j = 0; j < g.size(); ++j) out += (j ? " " : "") + g.name(static_cast<NodeId>(j));
    out += "\n";
    char buf[64];
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto v = p.assignment(i);
        for (std::size_t j = 0; j < v.size(); ++j) out += (j ? " " : "") + std::to_string(v[j]);
        std::snprintf(buf, sizeof buf, " %.17g\n", p[i]);
        out += buf;
    }
    return out;
}

void write_distribution(const Admg& g, const JointDistribution& p, const std::string& path) {
    detail::write_file(path, format_distribution(g, p));
}

JointDistribution induced_distribution(const Admg& g, const ResponseSpace& space,
                                       const std::vector<std::vector<double>>& q) {
    std::vector<int> cards;
    std::size_t n = 1;
    for (const auto& v : g.nodes()) {
        cards.push_back(v.cardinality);
        n *= static_cast<std::size_t>(v.cardinality);
    }
    std::vector<double> probs(n, 0.0);
    JointDistribution shape(cards, [&] {
        std::vector<double> u(n, 0.0);
        u[0] = 1.0;
        return u;
    }());
    const auto total = space.total_size();
    const std::vector<int> none(g.size(), kAllValues);
    for (ConfigIndex i = 0; i < total; ++i) {
        auto r = space.decode(i);
        double w = 1;
        for (std::size_t k = 0; k < r.size(); ++k) w *= q[k][r[k]];
        if (w == 0) continue;
        probs[shape.index(evaluate(g, space, r, none))] += w;
    }
    double s = 0;
    for (double p : probs) s += p;
    for (double& p : probs) p /= s;
    return JointDistribution(cards, std::move(probs));
}

CFactors::CFactors(const Admg& g, const JointDistribution& p) : g_(&g), part_(districts(g)) {
    p.check_against(g);
    const auto& topo = g.topological_order();
    const std::size_t n = g.size();
    prefix_.resize(n + 1);
    prefix_[n].resize(p.size());
    // last table is the joint re-indexed along the topological order
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto v = p.assignment(i);
        std::size_t idx = 0;
        for (NodeId u : topo) idx = idx * static_cast<std::size_t>(g.cardinality(u)) + v[u];
        prefix_[n][idx] = p[i];
    }
    for (std::size_t i = n; i-- > 0;) {
        const auto c = static_cast<std::size_t>(g.cardinality(topo[i]));
        const auto& next = prefix_[i + 1];
        auto& cur = prefix_[i];
        cur.assign(next.size() / c, 0.0);
        for (std::size_t j = 0; j < next.size(); ++j) cur[j / c] += next[j];
    }
}

double CFactors::prefix_mass(std::size_t i, const std::vector<int>& v) const {
    const auto& topo = g_->topological_order();
    std::size_t idx = 0;
    for (std::size_t t = 0; t < i; ++t)
        idx = idx * static_cast<std::size_t>(g_->cardinality(topo[t])) + v[topo[t]];
    return prefix_[i][idx];
}

CFactor CFactors::q(const NodeSet& district, const std::vector<int>& v) const {
    const auto& topo = g_->topological_order();
    CFactor out{1.0, true};
    std::size_t idx = 0;
    double prev = 1.0;
    for (std::size_t t = 0; t < topo.size(); ++t) {
        NodeId u = topo[t];
        idx = idx * static_cast<std::size_t>(g_->cardinality(u)) + v[u];
        const double cur = prefix_[t + 1][idx];
        if (district.contains(u)) {
            if (prev <= 0) {
                out.defined = false;
                out.value = 0;
            } else if (out.defined) {
                out.value *= cur / prev;
            }
        }
        prev = cur;
    }
    return out;
}

CFactor CFactors::q(std::size_t k, const std::vector<int>& v) const {
    return q(part_[k].observed, v);
}

CFactor c_factor(const Admg& g, const JointDistribution& p, std::size_t k, const std::vector<int>& v) {
    return CFactors(g, p).q(k, v);
}

}  // namespace maxpot
