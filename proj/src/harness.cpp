#include "wayfinder/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace wayfinder {

const std::map<int, ReferenceRow>& reference_data() {
    // Gate counts observed in the controlled experiment (46 participants,
    // four iterations per procedure).
    static const std::map<int, ReferenceRow> data = {
        {2, {{{22, 24, 0}, {23, 23, 0}, {25, 21, 0}, {23, 23, 0}}, {23.25, 22.75, 0.0}}},
        {3, {{{27, 0, 19}, {28, 0, 18}, {30, 0, 16}, {27, 0, 19}}, {28.0, 0.0, 18.0}}},
        {4, {{{18, 16, 12}, {22, 19, 5}, {21, 18, 7}, {22, 19, 5}}, {20.75, 18.0, 7.25}}},
    };
    return data;
}

std::array<double, 3> BatchReport::means_abc() const {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    const char* ids[] = {"a", "b", "c"};
    for (int i = 0; i < 3; ++i)
        if (auto it = gates.find(ids[i]); it != gates.end()) out[i] = it->second.mean;
    return out;
}

std::array<double, 3> BatchReport::stdevs_abc() const {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    const char* ids[] = {"a", "b", "c"};
    for (int i = 0; i < 3; ++i)
        if (auto it = gates.find(ids[i]); it != gates.end()) out[i] = it->second.stdev;
    return out;
}

double score_against(const std::array<double, 3>& sim_means,
                     const std::array<double, 3>& ref_means) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += std::abs(sim_means[i] - ref_means[i]);
    return s;
}

UtilityWeights calibration_preset(const std::string& name) {
    if (name == "C1") return {10.0, 7.0, 5.0};
    if (name == "C2") return {10.0, 2.5, 0.5};
    if (name == "C3") return {100.0, 25.0, 5.0};
    throw std::invalid_argument("unknown calibration preset '" + name + "'");
}

SimulationConfig apply_calibration(SimulationConfig config, const std::string& name) {
    if (name == "custom") return config;  // weights stay as configured
    UtilityWeights w = calibration_preset(name);
    config.kappa_tt = w.kappa_tt;
    config.kappa_q = w.kappa_q;
    config.kappa_f = w.kappa_f;
    return config;
}

BatchReport run_batch(const Scenario& base, int procedure, const SimulationConfig& config,
                      int n_runs, std::uint64_t base_seed, int jobs) {
    if (n_runs < 1) throw std::invalid_argument("run_batch: n_runs must be >= 1");

    Scenario scenario = base;
    std::set<std::string> closed = procedure_closures(procedure);
    if (!closed.empty()) scenario = close_openings(scenario, closed);
    scenario.config = config;
    Knowledge knowledge = build_knowledge(scenario);

    std::vector<RunResult> results(n_runs);
    if (jobs <= 0) jobs = int(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min(jobs, n_runs));

    // Runs share only the immutable scenario/knowledge; aggregation below is
    // by seed order, independent of scheduling.
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1))
            results[i] = run(scenario, knowledge, base_seed + std::uint64_t(i));
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::future<void>> futs;
        futs.reserve(jobs);
        for (int j = 0; j < jobs; ++j) futs.push_back(std::async(std::launch::async, worker));
        for (auto& f : futs) f.get();
    }

    BatchReport report;
    report.procedure = procedure;
    report.runs = n_runs;
    report.base_seed = base_seed;

    double travel_sum = 0.0;
    // report covers the base scenario's openings; gates closed by the
    // procedure keep their zero counts, matching the reference table layout
    for (const Opening& o : base.openings) report.gates[o.id] = GateStats{};
    for (const RunResult& r : results) {
        if (!r.complete) ++report.incomplete;
        travel_sum += r.mean_travel_time_s();
    }
    auto count_in = [](const RunResult& r, const std::string& id) {
        auto it = r.gate_crossings.find(id);
        return it == r.gate_crossings.end() ? 0 : it->second;
    };
    for (auto& [id, stats] : report.gates) {
        double sum = 0.0, sum2 = 0.0;
        int mn = count_in(results[0], id), mx = mn;
        for (const RunResult& r : results) {
            int c = count_in(r, id);
            sum += c;
            sum2 += double(c) * c;
            mn = std::min(mn, c);
            mx = std::max(mx, c);
        }
        stats.mean = sum / n_runs;
        stats.stdev = n_runs > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / n_runs) / (n_runs - 1)))
                                 : 0.0;
        stats.min = mn;
        stats.max = mx;
    }
    report.mean_travel_time_s = travel_sum / n_runs;

    if (auto it = reference_data().find(procedure); it != reference_data().end())
        report.score = score_against(report.means_abc(), it->second.average);
    else if (procedure == 1)
        report.score = score_against(report.means_abc(), {46.0, 0.0, 0.0});
    return report;
}

std::vector<SweepEntry> sweep(const Scenario& base,
                              const std::vector<std::pair<std::string, SimulationConfig>>& grid,
                              const std::vector<int>& procedures, int n_runs,
                              std::uint64_t base_seed, int jobs) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty config grid");
    std::vector<SweepEntry> out;
    for (const auto& [label, config] : grid) {
        SweepEntry e;
        e.label = label;
        e.config = config;
        for (int p : procedures) {
            BatchReport r = run_batch(base, p, config, n_runs, base_seed, jobs);
            e.procedure_scores[p] = r.score.value_or(0.0);
            e.total_score += e.procedure_scores[p];
        }
        out.push_back(std::move(e));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SweepEntry& a, const SweepEntry& b) { return a.total_score < b.total_score; });
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int count_of(const RunResult& r, const char* id) {
    auto it = r.gate_crossings.find(id);
    return it == r.gate_crossings.end() ? 0 : it->second;
}

}  // namespace

void write_run_csv_header(std::ostream& out) {
    out << "scenario,procedure,seed,steps,count_a,count_b,count_c,mean_travel_time_s\n";
}

void write_run_csv(std::ostream& out, const std::string& scenario_name, int procedure,
                   std::uint64_t seed, const RunResult& r) {
    out << scenario_name << ',' << procedure << ',' << seed << ',' << r.steps << ','
        << count_of(r, "a") << ',' << count_of(r, "b") << ',' << count_of(r, "c") << ','
        << fmt(r.mean_travel_time_s()) << '\n';
}

void write_batch_csv_header(std::ostream& out) {
    out << "label,procedure,runs,base_seed,gate,mean,stdev,min,max,incomplete,score\n";
}

void write_batch_csv(std::ostream& out, const BatchReport& r) {
    for (const auto& [id, g] : r.gates) {
        out << r.label << ',' << r.procedure << ',' << r.runs << ',' << r.base_seed << ',' << id
            << ',' << fmt(g.mean) << ',' << fmt(g.stdev) << ',' << g.min << ',' << g.max << ','
            << r.incomplete << ',' << (r.score ? fmt(*r.score) : std::string("")) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepEntry>& entries) {
    out << "rank,label,kappa_tt,kappa_q,kappa_f,gamma,rho_c,tau_c,tau_a";
    std::vector<int> procs;
    if (!entries.empty())
        for (const auto& [p, _] : entries.front().procedure_scores) procs.push_back(p);
    for (int p : procs) out << ",score_p" << p;
    out << ",total_score\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const SweepEntry& e = entries[i];
        out << (i + 1) << ',' << e.label << ',' << fmt(e.config.kappa_tt) << ','
            << fmt(e.config.kappa_q) << ',' << fmt(e.config.kappa_f) << ',' << fmt(e.config.gamma)
            << ',' << fmt(e.config.rho_c) << ',' << e.config.tau_c << ',' << e.config.tau_a;
        for (int p : procs) out << ',' << fmt(e.procedure_scores.at(p));
        out << ',' << fmt(e.total_score) << '\n';
    }
}

std::vector<BatchReport> read_batch_csv(std::istream& in) {
    std::vector<BatchReport> reports;
    std::string line;
    if (!std::getline(in, line)) return reports;  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 11) throw std::runtime_error("malformed batch csv line: " + line);

        BatchReport* r = nullptr;
        for (BatchReport& existing : reports)
            if (existing.label == fields[0] && existing.procedure == std::stoi(fields[1]))
                r = &existing;
        if (r == nullptr) {
            reports.emplace_back();
            r = &reports.back();
            r->label = fields[0];
            r->procedure = std::stoi(fields[1]);
            r->runs = std::stoi(fields[2]);
            r->base_seed = std::stoull(fields[3]);
            r->incomplete = std::stoi(fields[9]);
            if (!fields[10].empty()) r->score = std::stod(fields[10]);
        }
        GateStats g;
        g.mean = std::stod(fields[5]);
        g.stdev = std::stod(fields[6]);
        g.min = std::stoi(fields[7]);
        g.max = std::stoi(fields[8]);
        r->gates[fields[4]] = g;
    }
    return reports;
}

}  // namespace wayfinder
