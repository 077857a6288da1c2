#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wayfinder/engine.hpp"

namespace wayfinder {

// Empirical gate counts (paths a, b, c) per experimental procedure:
// four iterations and their average. 46 participants per iteration.
struct ReferenceRow {
    std::vector<std::array<int, 3>> iterations;
    std::array<double, 3> average;
};

const std::map<int, ReferenceRow>& reference_data();  // procedures 2, 3, 4

struct GateStats {
    double mean = 0.0;
    double stdev = 0.0;
    int min = 0;
    int max = 0;
};

struct BatchReport {
    std::string label;
    int procedure = 0;
    int runs = 0;
    std::uint64_t base_seed = 0;
    std::map<std::string, GateStats> gates;  // keyed by opening id
    double mean_travel_time_s = 0.0;
    int incomplete = 0;
    std::optional<double> score;  // L1 distance to reference averages, if known

    std::array<double, 3> means_abc() const;
    std::array<double, 3> stdevs_abc() const;
};

// Monte-Carlo batch over seeds base_seed..base_seed+n_runs-1. Runs execute in
// parallel (jobs threads, 0 = hardware default); aggregation is by seed order,
// so the report is independent of scheduling.
BatchReport run_batch(const Scenario& base, int procedure, const SimulationConfig& config,
                      int n_runs, std::uint64_t base_seed, int jobs = 0);

// Sum over gates of |mean_sim - mean_ref|.
double score_against(const std::array<double, 3>& sim_means, const std::array<double, 3>& ref_means);

// kappa presets from the published calibrations.
// C1 = (10, 7, 5), C2 = (10, 2.5, 0.5), C3 = (100, 25, 5).
UtilityWeights calibration_preset(const std::string& name);
SimulationConfig apply_calibration(SimulationConfig config, const std::string& name);

struct SweepEntry {
    std::string label;
    SimulationConfig config;
    std::map<int, double> procedure_scores;
    double total_score = 0.0;
};

// Batches every config over the given procedures and ranks by total score.
std::vector<SweepEntry> sweep(const Scenario& base, const std::vector<std::pair<std::string, SimulationConfig>>& grid,
                              const std::vector<int>& procedures, int n_runs,
                              std::uint64_t base_seed, int jobs = 0);

// CSV emission. write_run_csv columns:
// scenario,procedure,seed,steps,count_a,count_b,count_c,mean_travel_time_s
void write_run_csv_header(std::ostream& out);
void write_run_csv(std::ostream& out, const std::string& scenario_name, int procedure,
                   std::uint64_t seed, const RunResult& r);
void write_batch_csv_header(std::ostream& out);
void write_batch_csv(std::ostream& out, const BatchReport& r);
void write_sweep_csv(std::ostream& out, const std::vector<SweepEntry>& entries);

// Parses a batch CSV produced by write_batch_csv; returns one report per
// (label, procedure) block.
std::vector<BatchReport> read_batch_csv(std::istream& in);

}  // namespace wayfinder
