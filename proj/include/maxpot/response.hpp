#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxpot/admg.hpp"
#include "maxpot/statement.hpp"

namespace maxpot {

using ConfigIndex = std::uint64_t;
using ConfigSet = std::vector<ConfigIndex>;  // sorted

// Enumeration of one district's joint response configurations. A configuration
// gives each node a function from parent tuples to its support; digits are
// ordered by (node, parent tuple), first node and first tuple most significant.
struct DistrictSpace {
    std::vector<NodeId> nodes;
    std::vector<std::vector<NodeId>> parents;
    std::vector<std::uint64_t> parent_configs;
    // digit_stride[j][p]: place value of node j's output at parent tuple p.
    std::vector<std::vector<std::uint64_t>> digit_stride;
    std::uint64_t size = 0;
    double log2_size = 0;
    bool enumerable = false;
};

class ResponseSpace {
public:
    static constexpr std::uint64_t kDefaultCap = std::uint64_t{1} << 26;

    explicit ResponseSpace(const Admg& g, std::uint64_t cap = kDefaultCap);

    const Admg& graph() const { return *g_; }
    const DistrictPartition& partition() const { return part_; }
    std::size_t num_districts() const { return spaces_.size(); }
    const DistrictSpace& district(std::size_t k) const { return spaces_[k]; }
    // Throws CapExceeded when the district is too large to enumerate.
    std::uint64_t district_size(std::size_t k) const;
    double log2_district_size(std::size_t k) const { return spaces_[k].log2_size; }
    // Product of all district sizes; throws CapExceeded past the cap.
    std::uint64_t total_size() const;
    std::uint64_t cap() const { return cap_; }

    // Index of v's parent tuple (parents in index order, first most significant).
    std::uint64_t parent_config(NodeId v, const std::vector<int>& values) const;
    // Output of node v under its district's configuration c at parent tuple p.
    int output(NodeId v, ConfigIndex c, std::uint64_t p) const;

    std::vector<ConfigIndex> decode(ConfigIndex full) const;
    ConfigIndex encode(const std::vector<ConfigIndex>& per_district) const;
    // Mixed-radix helpers over an explicit district subset.
    std::vector<ConfigIndex> decode(ConfigIndex partial, const std::vector<int>& subset) const;
    ConfigIndex encode(const std::vector<ConfigIndex>& configs, const std::vector<int>& subset) const;

    std::string describe(std::size_t k, ConfigIndex c) const;

private:
    const Admg* g_;
    DistrictPartition part_;
    std::vector<DistrictSpace> spaces_;
    std::vector<int> local_;  // node -> position within its district
    std::uint64_t cap_;
};

// Observed values under a full configuration (one index per district) and
// interventions (kAllValues = not intervened, indexed by node).
std::vector<int> evaluate(const Admg& g, const ResponseSpace& space,
                          const std::vector<ConfigIndex>& r, const std::vector<int>& interventions);
std::vector<int> evaluate(const Admg& g, const ResponseSpace& space,
                          const std::vector<ConfigIndex>& r, const Assignment& interventions = {});

bool satisfies(const Admg& g, const ResponseSpace& space, const std::vector<ConfigIndex>& r,
               const Statement& s);

// Full-enumeration indices satisfying every world of the statement.
ConfigSet compatible_set(const Admg& g, const ResponseSpace& space, const Statement& s,
                         int threads = 0);
ConfigSet compatible_set_serial(const Admg& g, const ResponseSpace& space, const Statement& s);

// Configurations of district k consistent with the full assignment v.
ConfigSet district_set(const ResponseSpace& space, std::size_t k, const std::vector<int>& v);

// Product over the chosen districts, encoded in subset order.
ConfigSet district_compatible_set(const Admg& g, const ResponseSpace& space,
                                  const std::vector<int>& subset, const std::vector<int>& v);

class JointDistribution {
public:
    JointDistribution() = default;
    JointDistribution(std::vector<int> cardinalities, std::vector<double> probs);

    static JointDistribution uniform(const Admg& g);

    std::size_t num_nodes() const { return cards_.size(); }
    const std::vector<int>& cardinalities() const { return cards_; }
    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probabilities() const { return probs_; }

    std::size_t index(const std::vector<int>& v) const;
    std::vector<int> assignment(std::size_t index) const;
    double prob(const std::vector<int>& v) const { return probs_[index(v)]; }

    // Throws InputError unless cardinalities match the graph.
    void check_against(const Admg& g) const;

private:
    std::vector<int> cards_;
    std::vector<double> probs_;
};

JointDistribution parse_distribution(const Admg& g, std::string_view text);
JointDistribution read_distribution(const Admg& g, const std::string& path);
std::string format_distribution(const Admg& g, const JointDistribution& p);
void write_distribution(const Admg& g, const JointDistribution& p, const std::string& path);

// Distribution induced by independent district response-type marginals.
JointDistribution induced_distribution(const Admg& g, const ResponseSpace& space,
                                       const std::vector<std::vector<double>>& q);

struct CFactor {
    double value = 0;
    bool defined = true;  // false when a conditioning prefix has zero mass
};

// Prefix-marginal tables along the topological order; Q_k(v) is a product of
// ratios of consecutive prefixes.
class CFactors {
public:
    CFactors(const Admg& g, const JointDistribution& p);

    CFactor q(std::size_t k, const std::vector<int>& v) const;
    CFactor q(const NodeSet& district, const std::vector<int>& v) const;
    double prefix_mass(std::size_t i, const std::vector<int>& v) const;

private:
    const Admg* g_;
    DistrictPartition part_;
    std::vector<std::vector<double>> prefix_;  // prefix_[i]: marginal of first i topo nodes
};

CFactor c_factor(const Admg& g, const JointDistribution& p, std::size_t k,
                 const std::vector<int>& v);

}  // namespace maxpot
