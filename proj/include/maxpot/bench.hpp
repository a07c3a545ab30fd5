#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maxpot/admg.hpp"
#include "maxpot/query.hpp"

namespace maxpot {

struct SweepConfig {
    std::vector<int> sizes{10, 15, 20, 30};
    std::vector<double> densities{0.5, 1.0, 1.5, 2.0};
    int sims = 100;
    int candidates = 200;
    double cf_fraction = 0.3;
    std::uint64_t seed = 42;
    int threads = 0;
};

struct SimRecord {
    int sim_id = 0;
    int n = 0;
    double c = 0;
    bool skipped = false;
    double conf_ratio = 0;
    int candidates = 0;
    int pruned_id = 0;
    int pruned_int = 0;
    int kept = 0;
    int single_world = 0;
    int id_only = 0;  // single-world candidates identifiable, checked on all of them

    double interception_fraction() const { return candidates ? double(pruned_int) / candidates : 0; }
    double id_fraction() const { return candidates ? double(pruned_id) / candidates : 0; }
    double total_fraction() const { return candidates ? double(pruned_id + pruned_int) / candidates : 0; }
};

struct MeanStd {
    double mean = 0;
    double std = 0;  // population standard deviation
};

struct SettingStats {
    int n = 0;
    double c = 0;
    int sims = 0;
    int skipped = 0;
    MeanStd conf_ratio, interception, id, total;
    std::optional<MeanStd> id_only;
};

struct SweepResult {
    std::vector<SimRecord> records;  // ordered by sim id
    std::vector<SettingStats> settings;
};

// Per-simulation seed derived from the master seed.
std::uint64_t sim_seed(std::uint64_t master, int sim_id);

SimRecord run_simulation(int sim_id, int n, double c, const SweepConfig& cfg);
SweepResult run_er_sweep(const SweepConfig& cfg);
SweepResult run_er_sweep_serial(const SweepConfig& cfg);

std::string format_records_csv(const SweepResult& r);
std::string format_summary_csv(const SweepResult& r);

// Forced confounder between the first world's treatment and outcome, then
// random new pairs until floor(r |V|) confounders exist, r clamped below by
// 1/|V|. Warns when the target cannot be reached.
Admg inject_confounders(const Admg& dag, const Query& q, double target_ratio, std::uint64_t seed,
                        std::vector<std::string>* warnings = nullptr);

// Fraction of single-world candidates that are identifiable; nullopt when
// there are none.
std::optional<double> id_only_rate(const Admg& g, const std::vector<Experiment>& experiments);

}  // namespace maxpot
