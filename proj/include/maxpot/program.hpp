#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "maxpot/admg.hpp"
#include "maxpot/polynomial.hpp"
#include "maxpot/query.hpp"
#include "maxpot/response.hpp"

namespace maxpot {

enum class Sense { minimize, maximize };

// Latents whose children reach an outcome along a path free of interventions.
// Nodes without any bidirected edge carry their own exogenous response type,
// reported through `own_noise`.
struct RelevantTypes {
    std::vector<int> latents;  // bidirected edge ids
    NodeSet own_noise;
    NodeSet active;            // non-intervened nodes with such a path
};

struct DistrictHull {
    std::vector<int> districts;  // sorted district indices
    RelevantTypes relevant;
    std::vector<int> scope_latents;  // every latent of a hull district
    NodeSet scope_nodes;
};

// Nodes that carry an outcome's dependence on response types.
NodeSet active_nodes(const Admg& g, const Statement& s);
RelevantTypes relevant_response_types(const Admg& g, const Statement& s);
RelevantTypes relevant_response_types(const Admg& g, const Query& q);
// Districts containing an active node of the statement.
std::vector<int> active_districts(const Admg& g, const DistrictPartition& part, const Statement& s);
DistrictHull district_hull(const Admg& g, const Query& q);
DistrictHull district_hull(const Admg& g, const Statement& s);

// One observational row of a district: sum over configs of q_k = rhs.
struct DistrictRow {
    ConfigSet configs;
    double rhs;
};

struct RowOptions {
    double consistency_tol = 1e-9;
};

// Graph, response space and c-factors shared by every program built on one
// (graph, distribution) pair. District rows are computed once on demand.
class ProgramContext {
public:
    ProgramContext(Admg g, JointDistribution p, std::uint64_t cap = ResponseSpace::kDefaultCap,
                   RowOptions opts = {});
    ProgramContext(const ProgramContext&) = delete;
    ProgramContext& operator=(const ProgramContext&) = delete;

    const Admg& graph() const { return g_; }
    const JointDistribution& distribution() const { return p_; }
    const ResponseSpace& space() const { return space_; }
    const CFactors& cfactors() const { return cf_; }
    const DistrictPartition& partition() const { return space_.partition(); }

    const std::vector<DistrictRow>& rows(std::size_t k) const;
    std::size_t dropped_rows(std::size_t k) const;

private:
    struct Cache {
        std::once_flag once;
        std::vector<DistrictRow> rows;
        std::size_t dropped = 0;
    };
    void compute_rows(std::size_t k, Cache& c) const;

    Admg g_;
    JointDistribution p_;
    ResponseSpace space_;
    CFactors cf_;
    RowOptions opts_;
    std::unique_ptr<Cache[]> cache_;
};

struct VariableBlock {
    int district;
    int copy;  // 0 = U, 1 = L for coupled programs
    int offset;
    int size;
};

struct Constraint {
    Polynomial lhs;
    double rhs = 0;
    std::string tag;
};

// Variables are district response-type probabilities, one simplex block per
// (district, copy). Simplex constraints are implied by `blocks`.
struct PolyProgram {
    Sense sense = Sense::maximize;
    int copies = 1;
    int num_vars = 0;
    std::vector<int> scope;  // districts with variables, sorted
    std::vector<VariableBlock> blocks;
    Polynomial objective;
    std::vector<Constraint> equalities;
    std::vector<Constraint> inequalities;  // lhs <= rhs
    std::vector<std::string> warnings;
    std::size_t cells_dropped = 0;

    int offset(int district, int copy = 0) const;
    bool in_scope(int district) const { return offset(district) >= 0; }
    int degree() const;
    // Maximum violation of the simplex blocks and constraints.
    double residual(const std::vector<double>& x) const;
    std::string dump() const;
};

struct BuildOptions {
    bool strict = false;  // keep cells outside the hull by enlarging the scope
};

PolyProgram build_base(const ProgramContext& ctx, const Query& q, const BuildOptions& opts = {});
// Cells whose districts touch the scope pull their districts in; others are
// dropped unless strict.
PolyProgram add_experiments(const ProgramContext& ctx, PolyProgram p,
                            const std::vector<OutcomeCell>& cells, const BuildOptions& opts = {});
// max T(U) - T(L) with f(U) = f(L) for every retained cell.
PolyProgram build_coupled(const ProgramContext& ctx, const Query& q,
                          const std::vector<OutcomeCell>& cells, const BuildOptions& opts = {});

// Compatible-sum polynomial of a statement over the program's copy.
Polynomial statement_polynomial(const ProgramContext& ctx, const PolyProgram& p, const Statement& s,
                                int copy = 0);
Polynomial query_polynomial(const ProgramContext& ctx, const PolyProgram& p, const Query& q,
                            int copy = 0);

// Scope after closing the hull under cells; `kept` flags retained cells.
std::vector<int> close_scope(const ProgramContext& ctx, std::vector<int> scope,
                             const std::vector<OutcomeCell>& cells, bool strict,
                             std::vector<bool>* kept = nullptr);

}  // namespace maxpot
