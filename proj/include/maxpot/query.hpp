#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxpot/admg.hpp"
#include "maxpot/rng.hpp"
#include "maxpot/statement.hpp"

namespace maxpot {

struct Term {
    double coefficient = 1.0;
    Statement statement;
};

// Linear combination of conjunctive counterfactual events.
struct Query {
    std::vector<Term> terms;
};

struct Experiment {
    std::string label;
    Statement statement;  // may hold kAllValues markers
    double cost = 1.0;
    int id = -1;
};

// One probability constraint f(R) = p produced by expanding an experiment.
struct OutcomeCell {
    Statement statement;  // concrete values
    int experiment = -1;
    int group = 0;  // intervention-value combination within the experiment
    std::optional<double> value;
};

// Throws InputError on unknown nodes, out-of-support values, overlapping
// intervention/outcome sets or empty outcomes.
void validate(const Admg& g, const Statement& s, bool allow_family);
void validate(const Admg& g, const Query& q);

// Sorts assignments by node so equal statements compare equal.
Statement canonical(Statement s);

// Cartesian expansion over family markers; interventions vary slowest.
std::vector<OutcomeCell> expand(const Admg& g, const Experiment& e);
std::vector<OutcomeCell> expand(const Admg& g, const std::vector<Experiment>& subset);

Statement parse_statement(const Admg& g, std::string_view text, bool allow_family = true);
Query parse_query(const Admg& g, std::string_view text);
// Lines of the form `[label:] <statement> [cost=<real>]`.
std::vector<Experiment> parse_experiments(const Admg& g, std::string_view text);
std::vector<Experiment> read_experiments(const Admg& g, const std::string& path);
Query read_query(const Admg& g, const std::string& text_or_path);

std::string format_statement(const Admg& g, const Statement& s);
std::string format_query(const Admg& g, const Query& q);
std::string format_experiments(const Admg& g, const std::vector<Experiment>& e);

// Two-world query sharing one treatment; nullopt when no node has a proper ancestor.
std::optional<Query> sample_query(const Admg& g, Rng& rng);
std::optional<Query> sample_query(const Admg& g, std::uint64_t seed);
// Sets W of outcomes under do(Z) with |W|,|Z| uniform on {1,2,3}, Z inside anc(W)\W;
// with probability cf_fraction a second world shares one w and one z.
std::optional<Experiment> sample_experiment(const Admg& g, Rng& rng, double cf_fraction);
std::optional<Experiment> sample_experiment(const Admg& g, std::uint64_t seed, double cf_fraction);

// Nodes mentioned as outcomes / interventions in world `w`.
NodeSet outcome_nodes(const Admg& g, const World& w);
NodeSet intervention_nodes(const Admg& g, const World& w);

}  // namespace maxpot
