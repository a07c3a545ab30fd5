#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maxpot/errors.hpp"
#include "maxpot/node_set.hpp"

namespace maxpot {

struct Node {
    std::string name;
    int cardinality = 2;
};

using Edge = std::pair<NodeId, NodeId>;

class CycleError : public InputError {
public:
    CycleError(const std::string& what, std::vector<Edge> edges)
        : InputError(what), edges_(std::move(edges)) {}
    const std::vector<Edge>& edges() const { return edges_; }

private:
    std::vector<Edge> edges_;
};

// Acyclic directed mixed graph over discrete nodes. Immutable once built;
// bidirected edges stand for latents with exactly the two endpoints as children.
class Admg {
public:
    class Builder {
    public:
        NodeId add_node(std::string name, int cardinality = 2);
        void add_edge(NodeId from, NodeId to);
        void add_confounder(NodeId a, NodeId b);
        void add_edge(std::string_view from, std::string_view to);
        void add_confounder(std::string_view a, std::string_view b);
        NodeId id(std::string_view name) const;
        std::optional<NodeId> find(std::string_view name) const;
        std::size_t size() const { return nodes_.size(); }
        Admg build() &&;

    private:
        std::vector<Node> nodes_;
        std::vector<Edge> directed_;
        std::vector<Edge> bidirected_;
    };

    Admg() = default;

    std::size_t size() const { return nodes_.size(); }
    const Node& node(NodeId v) const { return nodes_[v]; }
    const std::vector<Node>& nodes() const { return nodes_; }
    int cardinality(NodeId v) const { return nodes_[v].cardinality; }
    const std::string& name(NodeId v) const { return nodes_[v].name; }
    NodeId id(std::string_view name) const;
    std::optional<NodeId> find(std::string_view name) const;

    const std::vector<NodeId>& parents(NodeId v) const { return parents_[v]; }
    const std::vector<NodeId>& children(NodeId v) const { return children_[v]; }
    const std::vector<NodeId>& spouses(NodeId v) const { return spouses_[v]; }
    const std::vector<Edge>& directed_edges() const { return directed_; }
    // Bidirected edges in declaration order; the index is the disturbance id.
    const std::vector<Edge>& bidirected_edges() const { return bidirected_; }
    bool has_edge(NodeId from, NodeId to) const;
    bool has_confounder(NodeId a, NodeId b) const;

    const std::vector<NodeId>& topological_order() const { return topo_; }
    // Position of each node in topological_order().
    int topo_rank(NodeId v) const { return rank_[v]; }

    NodeSet empty_set() const { return NodeSet(size()); }
    NodeSet all_nodes() const { return NodeSet::full(size()); }

    Admg without_confounders() const;
    Admg with_confounders(const std::vector<Edge>& extra) const;

private:
    std::vector<Node> nodes_;
    std::vector<Edge> directed_;
    std::vector<Edge> bidirected_;
    std::vector<std::vector<NodeId>> parents_, children_, spouses_;
    std::vector<NodeId> topo_;
    std::vector<int> rank_;
};

struct District {
    NodeSet observed;
    std::vector<int> latents;  // indices into bidirected_edges()
};

struct DistrictPartition {
    std::vector<District> districts;
    std::vector<int> node_to_district;

    std::size_t size() const { return districts.size(); }
    const District& operator[](std::size_t k) const { return districts[k]; }
    int of(NodeId v) const { return node_to_district[v]; }
};

// Ties broken by declaration order.
std::vector<NodeId> topological_order(const Admg& g);

// Districts are ordered by their smallest node index.
DistrictPartition districts(const Admg& g);

// Bidirected-connected components of the subgraph induced by `within`,
// ordered by smallest node index.
std::vector<NodeSet> districts_within(const Admg& g, const NodeSet& within);

// Nodes with a directed path into `targets`, targets included.
NodeSet ancestors(const Admg& g, const NodeSet& targets);
NodeSet ancestors(const Admg& g, const std::vector<std::string>& targets);

// Ancestors of `targets` in the subgraph induced by `within`; parents of
// nodes in `cut` are not followed (their incoming edges are removed).
NodeSet ancestors_within(const Admg& g, const NodeSet& targets, const NodeSet& within,
                         const NodeSet* cut = nullptr);

NodeSet descendants(const Admg& g, const NodeSet& sources);

Admg generate_er(int n, double directed_prob, double bidirected_prob, std::uint64_t seed);

Admg parse_graph(std::string_view text);
Admg read_graph(const std::string& path);
std::string format_graph(const Admg& g);
void write_graph(const Admg& g, const std::string& path);

std::string format_nodes(const Admg& g, const NodeSet& s);

}  // namespace maxpot
