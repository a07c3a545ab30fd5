#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "maxpot/admg.hpp"
#include "maxpot/bench.hpp"
#include "maxpot/errors.hpp"
#include "maxpot/potency.hpp"
#include "maxpot/program.hpp"
#include "maxpot/prune.hpp"
#include "maxpot/query.hpp"
#include "maxpot/reduce.hpp"
#include "maxpot/response.hpp"
#include "maxpot/solve.hpp"

using namespace maxpot;

namespace {

struct Args {
    std::string graph, dist, query, experiments, out, subset, criterion = "worst", order = "interception-first";
    std::vector<std::string> fix;
    double budget = 1;
    int grid = 201, restarts = 32, threads = 0;
    std::uint64_t seed = 1;
    bool dump = false, aggressive = false, strict = false;
};

std::string num(double x) {
    if (std::fabs(x) < 1e-9) x = 0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void emit(const Args& a, const std::string& text) {
    if (a.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(a.out);
    if (!f) throw InputError("cannot write " + a.out);
    f << text;
}

SolverOptions solver_options(const Args& a) {
    SolverOptions s;
    s.restarts = a.restarts;
    s.seed = a.seed;
    s.threads = a.threads;
    return s;
}

Admg load_graph(const Args& a) {
    if (a.graph.empty()) throw InputError("--graph is required");
    return read_graph(a.graph);
}

Query load_query(const Admg& g, const Args& a) {
    if (a.query.empty()) throw InputError("--query is required");
    return read_query(g, a.query);
}

std::vector<Experiment> load_experiments(const Admg& g, const Args& a) {
    if (a.experiments.empty()) throw InputError("--experiments is required");
    return read_experiments(g, a.experiments);
}

// `<statement>=<value>`, the value following the closing bracket.
std::vector<OutcomeCell> parse_fixes(const Admg& g, const std::vector<std::string>& fixes) {
    std::vector<OutcomeCell> out;
    for (const auto& f : fixes) {
        const auto close = f.find_last_of(")}");
        const auto eq = f.find('=', close == std::string::npos ? 0 : close);
        if (close == std::string::npos || eq == std::string::npos)
            throw InputError("--fix expects <statement>=<value>, got '" + f + "'");
        OutcomeCell c;
        c.statement = parse_statement(g, f.substr(0, eq), false);
        try {
            c.value = std::stod(f.substr(eq + 1));
        } catch (const std::exception&) {
            throw InputError("--fix value is not a number in '" + f + "'");
        }
        out.push_back(std::move(c));
    }
    return out;
}

PotencyOptions potency_options(const Admg& g, const Args& a) {
    PotencyOptions o;
    o.solver = solver_options(a);
    o.build.strict = a.strict;
    o.grid = a.grid;
    o.fixed = parse_fixes(g, a.fix);
    return o;
}

std::vector<Experiment> select(const std::vector<Experiment>& all, const std::string& labels) {
    if (labels.empty()) return all;
    std::vector<Experiment> out;
    std::stringstream ss(labels);
    std::string l;
    while (std::getline(ss, l, ',')) {
        bool found = false;
        for (const auto& e : all)
            if (e.label == l) {
                out.push_back(e);
                found = true;
            }
        if (!found) throw InputError("unknown experiment label '" + l + "'");
    }
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string& s) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            if constexpr (std::is_same_v<T, int>)
                out.push_back(std::stoi(item));
            else
                out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw InputError("bad list element '" + item + "'");
        }
    }
    return out;
}

int cmd_bounds(const Args& a) {
    const auto g = load_graph(a);
    if (a.dist.empty()) throw InputError("--dist is required");
    ProgramContext ctx(g, read_distribution(g, a.dist));
    const auto q = load_query(g, a);
    const auto opts = potency_options(g, a);
    auto prog = build_base(ctx, q, opts.build);
    if (!opts.fixed.empty()) prog = add_experiments(ctx, std::move(prog), opts.fixed, opts.build);
    if (a.dump) {
        emit(a, prog.dump());
        return 0;
    }
    const auto b = solve_bounds(prog, opts.solver);
    for (const auto& w : prog.warnings) std::cerr << "warning: " << w << "\n";
    if (b.status == SolveStatus::infeasible) {
        std::cerr << "error: program is infeasible\n";
        return 2;
    }
    emit(a, "L=" + num(b.lower) + " U=" + num(b.upper) + " width=" + num(b.width()) +
                " status=" + to_string(b.status) + "\n");
    return 0;
}

PruneOrder parse_order(const std::string& s) {
    if (s == "interception-first") return PruneOrder::interception_first;
    if (s == "id-first") return PruneOrder::id_first;
    throw InputError("--order must be interception-first or id-first");
}

int cmd_prune(const Args& a) {
    const auto g = load_graph(a);
    const auto q = load_query(g, a);
    const auto exps = load_experiments(g, a);
    const auto verdicts = get_useless(g, q, exps, parse_order(a.order));
    std::string out;
    int id = 0, icp = 0;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        out += exps[i].label + " " + to_string(verdicts[i].verdict) + "\n";
        id += verdicts[i].verdict == Verdict::pruned_id;
        icp += verdicts[i].verdict == Verdict::pruned_interception;
    }
    const double n = verdicts.empty() ? 1.0 : static_cast<double>(verdicts.size());
    out += "pruned=" + std::to_string(id + icp) + " kept=" + std::to_string(verdicts.size() - id - icp) +
           " pruned_id=" + num(id / n) + " pruned_interception=" + num(icp / n) + " total=" + num((id + icp) / n) +
           "\n";
    emit(a, out);
    return 0;
}

int cmd_potency(const Args& a) {
    const auto g = load_graph(a);
    if (a.dist.empty()) throw InputError("--dist is required");
    ProgramContext ctx(g, read_distribution(g, a.dist));
    const auto q = load_query(g, a);
    const auto subset = select(load_experiments(g, a), a.subset);
    const auto r = alt_width(ctx, q, subset, parse_criterion(a.criterion), potency_options(g, a));
    emit(a, "criterion=" + std::string(to_string(r.criterion)) + " W0=" + num(r.observational) +
                " W=" + num(r.width) + " pot=" + num(r.potency) + " status=" + to_string(r.status) + "\n");
    return 0;
}

int cmd_widthcurve(const Args& a) {
    const auto g = load_graph(a);
    if (a.dist.empty()) throw InputError("--dist is required");
    ProgramContext ctx(g, read_distribution(g, a.dist));
    const auto q = load_query(g, a);
    const auto subset = select(load_experiments(g, a), a.subset);
    const auto cells = free_cells(g, subset);
    if (cells.size() != 1) throw InputError("widthcurve needs an experiment with exactly one free cell");
    std::string out = "p,lower,upper,width\n";
    for (const auto& pt : width_curve(ctx, q, cells[0], potency_options(g, a)))
        out += num(pt.p) + "," + num(pt.lower) + "," + num(pt.upper) + "," + num(pt.width()) + "\n";
    emit(a, out);
    return 0;
}

int cmd_solve(const Args& a) {
    const auto g = load_graph(a);
    if (a.dist.empty()) throw InputError("--dist is required");
    if (a.budget < 0) throw InputError("--budget must be nonnegative");
    ProgramContext ctx(g, read_distribution(g, a.dist));
    const auto q = load_query(g, a);
    const auto exps = load_experiments(g, a);
    MaxPotencyOptions mo;
    mo.potency = potency_options(g, a);
    mo.order = parse_order(a.order);
    mo.aggressive = a.aggressive;
    mo.threads = a.threads;
    const auto s = solve_max_potency(ctx, q, exps, CostModel::additive(exps, a.budget), mo);
    std::string set = "{";
    for (std::size_t i = 0; i < s.subset.size(); ++i)
        set += (i ? "," : "") + exps[static_cast<std::size_t>(s.subset[i])].label;
    set += "}";
    emit(a, set + " pot=" + num(s.potency) + " cost=" + num(s.cost) + " W0=" + num(s.observational) +
                " evaluated=" + std::to_string(s.evaluated) + " skipped=" + std::to_string(s.skipped) +
                " status=" + to_string(s.status) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maxpot: bounds, pruning and potency of causal experiments"};
    app.require_subcommand(1);
    Args a;
    auto add_common = [&](CLI::App* c, bool dist, bool exps) {
        c->add_option("--graph", a.graph, "graph file")->required();
        c->add_option("--query", a.query, "query text or file")->required();
        if (dist) c->add_option("--dist", a.dist, "joint distribution file")->required();
        if (exps) c->add_option("--experiments", a.experiments, "experiment file")->required();
        c->add_option("--out", a.out, "write output here instead of stdout");
        if (dist) {
            c->add_option("--fix", a.fix, "realized cell <statement>=<value>, repeatable");
            c->add_option("--restarts", a.restarts, "random restarts of the local solver");
            c->add_option("--seed", a.seed, "solver seed");
            c->add_option("--threads", a.threads, "OpenMP threads (0 = default)");
            c->add_flag("--strict", a.strict, "keep cells outside the query hull");
        }
    };
    auto* bounds = app.add_subcommand("bounds", "observational bounds of the query");
    add_common(bounds, true, false);
    bounds->add_flag("--dump", a.dump, "print the program instead of solving it");
    auto* prune = app.add_subcommand("prune", "certify useless experiments");
    add_common(prune, false, true);
    prune->add_option("--order", a.order, "interception-first or id-first");
    auto* potency = app.add_subcommand("potency", "potency of a set of experiments");
    add_common(potency, true, true);
    potency->add_option("--subset", a.subset, "comma separated labels (default all)");
    potency->add_option("--criterion", a.criterion, "worst, expected or best");
    potency->add_option("--grid", a.grid, "grid points per cell");
    auto* curve = app.add_subcommand("widthcurve", "realized width over a cell's feasible range (CSV)");
    add_common(curve, true, true);
    curve->add_option("--subset", a.subset, "label of a single-cell experiment")->required();
    curve->add_option("--grid", a.grid, "grid points");
    auto* solve = app.add_subcommand("solve", "maximum potency design within a budget");
    add_common(solve, true, true);
    solve->add_option("--budget", a.budget, "budget")->required();
    solve->add_option("--order", a.order, "interception-first or id-first");
    solve->add_flag("--aggressive", a.aggressive, "also drop interception-pruned experiments (heuristic)");

    std::string knapsack, prefix;
    auto* reduce = app.add_subcommand("reduce", "knapsack instance to a max-potency instance");
    reduce->add_option("--in", knapsack, "knapsack file")->required();
    reduce->add_option("--out", prefix, "output prefix")->required();

    SweepConfig cfg;
    std::string sizes = "10,15,20,30", densities = "0.5,1.0,1.5,2.0", summary;
    auto* bench = app.add_subcommand("bench", "Erdos-Renyi pruning sweep (CSV)");
    bench->add_option("--sizes", sizes, "graph sizes");
    bench->add_option("--densities", densities, "confounding constants c, q = c/N");
    bench->add_option("--sims", cfg.sims, "simulations per setting");
    bench->add_option("--candidates", cfg.candidates, "candidate experiments per simulation");
    bench->add_option("--cf-fraction", cfg.cf_fraction, "share of two-world candidates");
    bench->add_option("--seed", cfg.seed, "master seed");
    bench->add_option("--threads", cfg.threads, "OpenMP threads (0 = default)");
    bench->add_option("--out", a.out, "per-simulation CSV");
    bench->add_option("--summary", summary, "per-setting summary CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        if (*bounds) return cmd_bounds(a);
        if (*prune) return cmd_prune(a);
        if (*potency) return cmd_potency(a);
        if (*curve) return cmd_widthcurve(a);
        if (*solve) return cmd_solve(a);
        if (*reduce) {
            write_reduction(knapsack_to_max_potency(read_knapsack(knapsack)), prefix);
            return 0;
        }
        if (*bench) {
            cfg.sizes = parse_list<int>(sizes);
            cfg.densities = parse_list<double>(densities);
            const auto r = run_er_sweep(cfg);
            emit(a, format_records_csv(r));
            if (!summary.empty()) {
                Args s;
                s.out = summary;
                emit(s, format_summary_csv(r));
            }
            return 0;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
