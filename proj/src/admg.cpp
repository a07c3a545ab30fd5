#include "maxpot/admg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "maxpot/rng.hpp"

namespace maxpot {

NodeId Admg::Builder::add_node(std::string name, int cardinality) {
    if (name.empty()) throw InputError("node name must be non-empty");
    if (cardinality < 2)
        throw InputError("node '" + name + "' needs cardinality >= 2, got " +
                         std::to_string(cardinality));
    if (find(name)) throw InputError("duplicate node '" + name + "'");
    nodes_.push_back({std::move(name), cardinality});
    return static_cast<NodeId>(nodes_.size() - 1);
}

std::optional<NodeId> Admg::Builder::find(std::string_view name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].name == name) return static_cast<NodeId>(i);
    return std::nullopt;
}

NodeId Admg::Builder::id(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw InputError("unknown node '" + std::string(name) + "'");
}

void Admg::Builder::add_edge(NodeId from, NodeId to) {
    const auto n = static_cast<NodeId>(nodes_.size());
    if (from < 0 || to < 0 || from >= n || to >= n) throw InputError("edge endpoint out of range");
    if (from == to) throw InputError("self-loop on '" + nodes_[from].name + "'");
    if (std::find(directed_.begin(), directed_.end(), Edge{from, to}) != directed_.end())
        throw InputError("duplicate edge " + nodes_[from].name + " -> " + nodes_[to].name);
    directed_.emplace_back(from, to);
}

void Admg::Builder::add_confounder(NodeId a, NodeId b) {
    const auto n = static_cast<NodeId>(nodes_.size());
    if (a < 0 || b < 0 || a >= n || b >= n) throw InputError("confounder endpoint out of range");
    if (a == b) throw InputError("bidirected self-loop on '" + nodes_[a].name + "'");
    Edge e{std::min(a, b), std::max(a, b)};
    if (std::find(bidirected_.begin(), bidirected_.end(), e) != bidirected_.end())
        throw InputError("duplicate confounder " + nodes_[a].name + " <-> " + nodes_[b].name);
    bidirected_.push_back(e);
}

void Admg::Builder::add_edge(std::string_view from, std::string_view to) { add_edge(id(from), id(to)); }

void Admg::Builder::add_confounder(std::string_view a, std::string_view b) {
    add_confounder(id(a), id(b));
}

namespace {

std::vector<Edge> find_cycle(std::size_t n, const std::vector<std::vector<NodeId>>& children,
                             const std::vector<bool>& leftover) {
    std::vector<int> state(n, 0);
    std::vector<NodeId> stack;
    std::vector<Edge> cycle;
    std::function<bool(NodeId)> dfs = [&](NodeId v) {
        state[v] = 1;
        stack.push_back(v);
        for (NodeId c : children[v]) {
            if (!leftover[c]) continue;
            if (state[c] == 1) {
                auto it = std::find(stack.begin(), stack.end(), c);
                for (; it + 1 != stack.end(); ++it) cycle.emplace_back(*it, *(it + 1));
                cycle.emplace_back(v, c);
                return true;
            }
            if (state[c] == 0 && dfs(c)) return true;
        }
        state[v] = 2;
        stack.pop_back();
        return false;
    };
    for (std::size_t v = 0; v < n; ++v)
        if (leftover[v] && state[v] == 0 && dfs(static_cast<NodeId>(v))) break;
    return cycle;
}

}  // namespace

Admg Admg::Builder::build() && {
    Admg g;
    const std::size_t n = nodes_.size();
    g.nodes_ = std::move(nodes_);
    g.directed_ = std::move(directed_);
    g.bidirected_ = std::move(bidirected_);
    g.parents_.assign(n, {});
    g.children_.assign(n, {});
    g.spouses_.assign(n, {});
    for (auto [a, b] : g.directed_) {
        g.parents_[b].push_back(a);
        g.children_[a].push_back(b);
    }
    for (auto [a, b] : g.bidirected_) {
        g.spouses_[a].push_back(b);
        g.spouses_[b].push_back(a);
    }
    for (std::size_t v = 0; v < n; ++v) {
        std::sort(g.parents_[v].begin(), g.parents_[v].end());
        std::sort(g.children_[v].begin(), g.children_[v].end());
        std::sort(g.spouses_[v].begin(), g.spouses_[v].end());
    }

    std::vector<int> indeg(n);
    for (std::size_t v = 0; v < n; ++v) indeg[v] = static_cast<int>(g.parents_[v].size());
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push(static_cast<NodeId>(v));
    while (!ready.empty()) {
        NodeId v = ready.top();
        ready.pop();
        g.topo_.push_back(v);
        for (NodeId c : g.children_[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    if (g.topo_.size() != n) {
        std::vector<bool> leftover(n, true);
        for (NodeId v : g.topo_) leftover[v] = false;
        auto cycle = find_cycle(n, g.children_, leftover);
        std::string msg = "directed cycle:";
        for (auto [a, b] : cycle) msg += " " + g.nodes_[a].name + "->" + g.nodes_[b].name;
        throw CycleError(msg, cycle);
    }
    g.rank_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) g.rank_[g.topo_[i]] = static_cast<int>(i);
    return g;
}

std::optional<NodeId> Admg::find(std::string_view name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].name == name) return static_cast<NodeId>(i);
    return std::nullopt;
}

NodeId Admg::id(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw InputError("unknown node '" + std::string(name) + "'");
}

bool Admg::has_edge(NodeId from, NodeId to) const {
    const auto& c = children_[from];
    return std::binary_search(c.begin(), c.end(), to);
}

bool Admg::has_confounder(NodeId a, NodeId b) const {
    const auto& s = spouses_[a];
    return std::binary_search(s.begin(), s.end(), b);
}

Admg Admg::without_confounders() const {
    Builder b;
    for (const auto& v : nodes_) b.add_node(v.name, v.cardinality);
    for (auto [x, y] : directed_) b.add_edge(x, y);
    return std::move(b).build();
}

Admg Admg::with_confounders(const std::vector<Edge>& extra) const {
    Builder b;
    for (const auto& v : nodes_) b.add_node(v.name, v.cardinality);
    for (auto [x, y] : directed_) b.add_edge(x, y);
    for (auto [x, y] : bidirected_) b.add_confounder(x, y);
    for (auto [x, y] : extra) b.add_confounder(x, y);
    return std::move(b).build();
}

std::vector<NodeId> topological_order(const Admg& g) { return g.topological_order(); }

std::vector<NodeSet> districts_within(const Admg& g, const NodeSet& within) {
    std::vector<NodeSet> out;
    NodeSet seen(g.size());
    for (NodeId s : within.to_vector()) {
        if (seen.contains(s)) continue;
        NodeSet comp(g.size());
        std::vector<NodeId> stack{s};
        seen.insert(s);
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            comp.insert(v);
            for (NodeId w : g.spouses(v)) {
                if (within.contains(w) && !seen.contains(w)) {
                    seen.insert(w);
                    stack.push_back(w);
                }
            }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

DistrictPartition districts(const Admg& g) {
    DistrictPartition p;
    p.node_to_district.assign(g.size(), -1);
    for (auto& comp : districts_within(g, g.all_nodes())) {
        const int k = static_cast<int>(p.districts.size());
        for (NodeId v : comp.to_vector()) p.node_to_district[v] = k;
        p.districts.push_back({std::move(comp), {}});
    }
    const auto& bi = g.bidirected_edges();
    for (std::size_t e = 0; e < bi.size(); ++e)
        p.districts[p.node_to_district[bi[e].first]].latents.push_back(static_cast<int>(e));
    return p;
}

NodeSet ancestors_within(const Admg& g, const NodeSet& targets, const NodeSet& within,
                         const NodeSet* cut) {
    NodeSet out(g.size());
    std::vector<NodeId> stack;
    for (NodeId t : targets.to_vector()) {
        if (!within.contains(t)) continue;
        out.insert(t);
        stack.push_back(t);
    }
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        if (cut && cut->contains(v)) continue;
        for (NodeId p : g.parents(v)) {
            if (within.contains(p) && !out.contains(p)) {
                out.insert(p);
                stack.push_back(p);
            }
        }
    }
    return out;
}

NodeSet ancestors(const Admg& g, const NodeSet& targets) {
    return ancestors_within(g, targets, g.all_nodes());
}

NodeSet ancestors(const Admg& g, const std::vector<std::string>& targets) {
    NodeSet t(g.size());
    for (const auto& name : targets) t.insert(g.id(name));
    return ancestors(g, t);
}

NodeSet descendants(const Admg& g, const NodeSet& sources) {
    NodeSet out = sources;
    std::vector<NodeId> stack = sources.to_vector();
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId c : g.children(v)) {
            if (!out.contains(c)) {
                out.insert(c);
                stack.push_back(c);
            }
        }
    }
    return out;
}

Admg generate_er(int n, double directed_prob, double bidirected_prob, std::uint64_t seed) {
    if (n < 2) throw InputError("generate_er needs n >= 2");
    if (directed_prob < 0 || directed_prob > 1 || bidirected_prob < 0 || bidirected_prob > 1)
        throw InputError("edge probabilities must lie in [0,1]");
    Rng rng(seed);
    Admg::Builder b;
    for (int i = 0; i < n; ++i) b.add_node("V" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.bernoulli(directed_prob)) b.add_edge(i, j);
            if (rng.bernoulli(bidirected_prob)) b.add_confounder(i, j);
        }
    }
    return std::move(b).build();
}

std::string format_nodes(const Admg& g, const NodeSet& s) {
    std::string out = "{";
    bool first = true;
    for (NodeId v : s.to_vector()) {
        if (!first) out += ",";
        out += g.name(v);
        first = false;
    }
    return out + "}";
}

}  // namespace maxpot
