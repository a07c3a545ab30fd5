#include "maxpot/bench.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "maxpot/errors.hpp"
#include "maxpot/prune.hpp"
#include "maxpot/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace maxpot {

std::uint64_t sim_seed(std::uint64_t master, int sim_id) {
    return splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(sim_id) + 1));
}

SimRecord run_simulation(int sim_id, int n, double c, const SweepConfig& cfg) {
    SimRecord rec;
    rec.sim_id = sim_id;
    rec.n = n;
    rec.c = c;
    const auto seed = sim_seed(cfg.seed, sim_id);
    const double p = 0.5 * std::log(static_cast<double>(n)) / n;
    const double q = c / n;
    const auto g = generate_er(n, p, q, splitmix64(seed ^ 1));
    rec.conf_ratio = static_cast<double>(g.bidirected_edges().size()) / n;
    Rng rng(splitmix64(seed ^ 2));
    const auto query = sample_query(g, rng);
    if (!query) {
        rec.skipped = true;
        return rec;
    }
    std::vector<Experiment> exps;
    for (int i = 0; i < cfg.candidates; ++i) {
        auto e = sample_experiment(g, rng, cfg.cf_fraction);
        if (!e) {
            rec.skipped = true;
            return rec;
        }
        e->id = i;
        exps.push_back(std::move(*e));
    }
    rec.candidates = static_cast<int>(exps.size());
    for (const auto& v : get_useless(g, *query, exps)) {
        if (v.verdict == Verdict::pruned_id) ++rec.pruned_id;
        else if (v.verdict == Verdict::pruned_interception) ++rec.pruned_int;
        else ++rec.kept;
        if (v.identifiable) {
            ++rec.single_world;
            if (*v.identifiable) ++rec.id_only;
        }
    }
    return rec;
}

namespace {

struct Setting {
    int n;
    double c;
};

std::vector<Setting> settings_of(const SweepConfig& cfg) {
    if (cfg.sims < 0 || cfg.candidates < 1) throw InputError("sims must be >= 0 and candidates >= 1");
    if (cfg.cf_fraction < 0 || cfg.cf_fraction > 1) throw InputError("cf_fraction must lie in [0,1]");
    std::vector<Setting> out;
    for (int n : cfg.sizes) {
        if (n < 2) throw InputError("graph sizes must be at least 2");
        for (double c : cfg.densities) {
            if (c < 0) throw InputError("density constants must be nonnegative");
            out.push_back({n, c});
        }
    }
    return out;
}

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd m;
    if (xs.empty()) return m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    for (double x : xs) m.std += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(m.std / static_cast<double>(xs.size()));
    return m;
}

SweepResult summarize(const SweepConfig& cfg, std::vector<SimRecord> records) {
    SweepResult r;
    r.records = std::move(records);
    std::size_t at = 0;
    for (const auto& s : settings_of(cfg)) {
        SettingStats st;
        st.n = s.n;
        st.c = s.c;
        std::vector<double> conf, icp, id, tot, ido;
        for (int i = 0; i < cfg.sims; ++i, ++at) {
            const auto& rec = r.records[at];
            if (rec.skipped) {
                ++st.skipped;
                continue;
            }
            ++st.sims;
            conf.push_back(rec.conf_ratio);
            icp.push_back(rec.interception_fraction());
            id.push_back(rec.id_fraction());
            tot.push_back(rec.total_fraction());
            if (rec.single_world) ido.push_back(double(rec.id_only) / rec.single_world);
        }
        st.conf_ratio = mean_std(conf);
        st.interception = mean_std(icp);
        st.id = mean_std(id);
        st.total = mean_std(tot);
        if (!ido.empty()) st.id_only = mean_std(ido);
        r.settings.push_back(st);
    }
    return r;
}

}  // namespace

SweepResult run_er_sweep_serial(const SweepConfig& cfg) {
    const auto settings = settings_of(cfg);
    std::vector<SimRecord> records;
    int id = 0;
    for (const auto& s : settings)
        for (int i = 0; i < cfg.sims; ++i) records.push_back(run_simulation(id++, s.n, s.c, cfg));
    return summarize(cfg, std::move(records));
}

SweepResult run_er_sweep(const SweepConfig& cfg) {
    const auto settings = settings_of(cfg);
    const int total = static_cast<int>(settings.size()) * cfg.sims;
    std::vector<SimRecord> records(static_cast<std::size_t>(total));
#ifdef _OPENMP
    const int nt = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
    for (int i = 0; i < total; ++i) {
        const auto& s = settings[static_cast<std::size_t>(i / cfg.sims)];
        records[static_cast<std::size_t>(i)] = run_simulation(i, s.n, s.c, cfg);
    }
    return summarize(cfg, std::move(records));
}

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

std::string format_records_csv(const SweepResult& r) {
    std::string out = "sim_id,N,c,conf_ratio,n_candidates,pruned_id,pruned_int,kept\n";
    for (const auto& rec : r.records) {
        if (rec.skipped) continue;
        out += std::to_string(rec.sim_id) + "," + std::to_string(rec.n) + "," + fmt(rec.c) + "," +
               fmt(rec.conf_ratio) + "," + std::to_string(rec.candidates) + "," + std::to_string(rec.pruned_id) +
               "," + std::to_string(rec.pruned_int) + "," + std::to_string(rec.kept) + "\n";
    }
    return out;
}

std::string format_summary_csv(const SweepResult& r) {
    std::string out =
        "N,c,sims,skipped,conf_ratio_mean,int_mean,int_std,id_mean,id_std,total_mean,total_std,id_only_mean,"
        "id_only_std\n";
    for (const auto& s : r.settings) {
        out += std::to_string(s.n) + "," + fmt(s.c) + "," + std::to_string(s.sims) + "," + std::to_string(s.skipped) +
               "," + fmt(s.conf_ratio.mean) + "," + fmt(s.interception.mean) + "," + fmt(s.interception.std) + "," +
               fmt(s.id.mean) + "," + fmt(s.id.std) + "," + fmt(s.total.mean) + "," + fmt(s.total.std) + "," +
               (s.id_only ? fmt(s.id_only->mean) + "," + fmt(s.id_only->std) : std::string(",")) + "\n";
    }
    return out;
}

Admg inject_confounders(const Admg& dag, const Query& q, double target_ratio, std::uint64_t seed,
                        std::vector<std::string>* warnings) {
    if (!dag.bidirected_edges().empty()) throw InputError("confounders can only be injected into a bare DAG");
    if (q.terms.empty() || q.terms[0].statement.worlds.empty()) throw InputError("query has no world");
    const auto& w = q.terms[0].statement.worlds[0];
    if (w.interventions.empty() || w.outcomes.empty()) throw InputError("query world needs a treatment and an outcome");
    const int n = static_cast<int>(dag.size());
    const NodeId x = w.interventions[0].first, y = w.outcomes[0].first;
    const double r = std::max(target_ratio, 1.0 / n);
    const auto target = static_cast<std::size_t>(std::floor(r * n + 1e-9));
    std::set<Edge> have{{std::min(x, y), std::max(x, y)}};
    const std::size_t pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
    if (target > pairs && warnings)
        warnings->push_back("target of " + std::to_string(target) + " confounders clamped to " +
                            std::to_string(pairs) + " available pairs");
    Rng rng(seed);
    while (have.size() < std::min(target, pairs)) {
        NodeId a = static_cast<NodeId>(rng.index(static_cast<std::uint64_t>(n)));
        NodeId b = static_cast<NodeId>(rng.index(static_cast<std::uint64_t>(n)));
        if (a == b) continue;
        have.insert({std::min(a, b), std::max(a, b)});
    }
    std::vector<Edge> added;
    added.push_back({std::min(x, y), std::max(x, y)});
    for (const auto& e : have)
        if (e != added[0]) added.push_back(e);
    return dag.with_confounders(added);
}

std::optional<double> id_only_rate(const Admg& g, const std::vector<Experiment>& experiments) {
    int single = 0, ident = 0;
    for (const auto& e : experiments) {
        if (e.statement.worlds.size() != 1) continue;
        ++single;
        const auto& w = e.statement.worlds.front();
        if (is_identifiable(g, outcome_nodes(g, w), intervention_nodes(g, w))) ++ident;
    }
    if (single == 0) return std::nullopt;
    return static_cast<double>(ident) / single;
}

}  // namespace maxpot
