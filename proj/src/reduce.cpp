#include "maxpot/reduce.hpp"

#include <cmath>
#include <utility>

#include "text_util.hpp"

namespace maxpot {

KnapsackInstance parse_knapsack(std::string_view text) {
    KnapsackInstance k;
    bool have_budget = false;
    const auto lines = detail::split_lines(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto toks = detail::tokenize_line(lines[ln]);
        if (toks.empty()) continue;
        const int line = static_cast<int>(ln) + 1;
        auto number = [&](const detail::Token& t) {
            try {
                std::size_t used = 0;
                double x = std::stod(t.text, &used);
                if (used != t.text.size() || !std::isfinite(x) || x < 0) throw std::invalid_argument("");
                return x;
            } catch (const std::exception&) {
                throw ParseError("expected a nonnegative number, got '" + t.text + "'", line, t.column);
            }
        };
        if (toks[0].text == "budget") {
            if (toks.size() != 2) throw ParseError("expected 'budget <B>'", line, toks[0].column);
            if (have_budget) throw ParseError("duplicate budget line", line, toks[0].column);
            k.budget = number(toks[1]);
            have_budget = true;
            continue;
        }
        if (toks.size() != 2) throw ParseError("expected '<value> <weight>'", line, toks[0].column);
        k.values.push_back(number(toks[0]));
        k.weights.push_back(number(toks[1]));
    }
    if (k.values.empty()) throw InputError("knapsack instance has no items");
    if (!have_budget) throw InputError("knapsack instance has no budget line");
    return k;
}

KnapsackInstance read_knapsack(const std::string& path) { return parse_knapsack(detail::read_file(path)); }

ReductionInstance tp_instance(const std::vector<TpCell<double>>& cells, const std::vector<double>& costs,
                              double budget) {
    if (cells.empty()) throw InputError("at least one cell is required");
    if (costs.size() != cells.size()) throw InputError("one cost per cell is required");
    Admg::Builder b;
    const auto n = cells.size();
    for (std::size_t i = 0; i < n; ++i) {
        cells[i].check();
        b.add_node("X" + std::to_string(i + 1), 2);
        b.add_node("Y" + std::to_string(i + 1), 2);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = static_cast<NodeId>(2 * i), y = static_cast<NodeId>(2 * i + 1);
        b.add_edge(x, y);
        b.add_confounder(x, y);
    }
    ReductionInstance r{std::move(b).build(), {}, {}, {}, {}, {}};

    std::vector<int> cards(2 * n, 2);
    std::vector<double> probs(std::size_t{1} << (2 * n), 0.0);
    for (std::size_t idx = 0; idx < probs.size(); ++idx) {
        double pr = 1;
        for (std::size_t i = 0; i < n; ++i) {
            // node 0 is the most significant bit
            const int x = static_cast<int>(idx >> (2 * n - 1 - 2 * i) & 1);
            const int y = static_cast<int>(idx >> (2 * n - 2 - 2 * i) & 1);
            const auto& c = cells[i];
            pr *= x ? (y ? c.alpha : c.beta) : (y ? c.gamma : c.delta);
        }
        probs[idx] = pr;
    }
    double total = 0;
    for (double p : probs) total += p;
    for (double& p : probs) p /= total;
    r.distribution = JointDistribution(cards, probs);

    for (std::size_t i = 0; i < n; ++i) {
        const auto x = static_cast<NodeId>(2 * i), y = static_cast<NodeId>(2 * i + 1);
        Statement pns;
        pns.worlds.push_back({{{x, 1}}, {{y, 1}}});
        pns.worlds.push_back({{{x, 0}}, {{y, 0}}});
        r.query.terms.push_back({1.0, pns});

        Experiment e;
        e.label = "a" + std::to_string(i + 1);
        e.statement.worlds.push_back({{{x, 1}}, {{y, 1}}});
        e.cost = costs[i];
        e.id = static_cast<int>(i);
        r.experiments.push_back(e);
    }
    r.costs = CostModel::additive(r.experiments, budget);
    return r;
}

ReductionInstance knapsack_to_max_potency(const KnapsackInstance& k) {
    if (k.values.empty() || k.values.size() != k.weights.size()) throw InputError("invalid knapsack instance");
    const double vmax = *std::max_element(k.values.begin(), k.values.end());
    std::vector<TpCell<double>> cells;
    std::vector<double> vs;
    for (double v : k.values) {
        const double scaled = vmax > 0 ? v * 0.1 / vmax : 0.0;
        vs.push_back(scaled);
        cells.push_back(achievable_cell(std::min(scaled, 0.1)));
    }
    auto r = tp_instance(cells, k.weights, k.budget);
    r.cell_v = vs;
    return r;
}

void write_reduction(const ReductionInstance& r, const std::string& prefix) {
    write_graph(r.graph, prefix + ".graph");
    write_distribution(r.graph, r.distribution, prefix + ".dist");
    detail::write_file(prefix + ".query", format_query(r.graph, r.query) + "\n");
    detail::write_file(prefix + ".exp", format_experiments(r.graph, r.experiments));
    detail::write_file(prefix + ".budget", std::to_string(r.costs.budget) + "\n");
}

}  // namespace maxpot
