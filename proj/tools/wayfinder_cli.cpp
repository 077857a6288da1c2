// Command-line front end: single runs, Monte-Carlo batches, calibration
// sweeps and comparisons against the reference gate counts, plus field dumps.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wayfinder/harness.hpp"

namespace {

using namespace wayfinder;

struct CommonOpts {
    std::string scenario_path;
    std::string out_path;
    std::uint64_t seed = 1;
    int jobs = 0;
    std::optional<double> kappa_tt, kappa_q, kappa_f, gamma, rho_c, desired_speed, step_duration;
    std::optional<double> k_s, k_p, k_o, d_0;
    std::optional<int> tau_c, tau_a, agents, step_cap;
    std::string calibration;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_seed = true) {
    cmd->add_option("--scenario", o.scenario_path, "Scenario file (default: bundled experiment)");
    cmd->add_option("--out", o.out_path, "Write CSV here instead of stdout");
    if (with_seed)
        cmd->add_option("--seed", o.seed, "Base RNG seed")->envname("WAYFINDER_SEED");
    cmd->add_option("--jobs", o.jobs, "Worker threads for batches (0 = hardware)");
    cmd->add_option("--calibration", o.calibration, "Preset C1, C2 or C3");
    cmd->add_option("--kappa-tt", o.kappa_tt, "Travel time weight");
    cmd->add_option("--kappa-q", o.kappa_q, "Congestion weight");
    cmd->add_option("--kappa-f", o.kappa_f, "Following weight");
    cmd->add_option("--gamma", o.gamma, "Congestion perception threshold (m)");
    cmd->add_option("--rho-c", o.rho_c, "Choice diffusion radius (m)");
    cmd->add_option("--tau-c", o.tau_c, "Choice decay steps");
    cmd->add_option("--tau-a", o.tau_a, "Agent spreading steps");
    cmd->add_option("--agents", o.agents, "Agent count");
    cmd->add_option("--desired-speed", o.desired_speed, "Desired speed (m/s)");
    cmd->add_option("--step-duration", o.step_duration, "Step duration (s)");
    cmd->add_option("--k-s", o.k_s, "Movement: field gradient weight");
    cmd->add_option("--k-p", o.k_p, "Movement: proxemic repulsion weight");
    cmd->add_option("--k-o", o.k_o, "Movement: obstacle repulsion weight");
    cmd->add_option("--d-0", o.d_0, "Movement: obstacle repulsion range (m)");
    cmd->add_option("--step-cap", o.step_cap, "Abort after this many steps");
}

Scenario load_scenario(const CommonOpts& o) {
    std::string text;
    if (o.scenario_path.empty()) {
        text = experiment_scenario_text();
    } else {
        std::ifstream in(o.scenario_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open scenario file: " + o.scenario_path);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    Scenario s = parse_scenario(text);
    SimulationConfig& c = s.config;
    if (!o.calibration.empty()) c = apply_calibration(c, o.calibration);
    if (o.kappa_tt) c.kappa_tt = *o.kappa_tt;
    if (o.kappa_q) c.kappa_q = *o.kappa_q;
    if (o.kappa_f) c.kappa_f = *o.kappa_f;
    if (o.gamma) c.gamma = *o.gamma;
    if (o.rho_c) c.rho_c = *o.rho_c;
    if (o.tau_c) c.tau_c = *o.tau_c;
    if (o.tau_a) c.tau_a = *o.tau_a;
    if (o.agents) c.agents = *o.agents;
    if (o.desired_speed) c.desired_speed = *o.desired_speed;
    if (o.step_duration) c.step_duration = *o.step_duration;
    if (o.k_s) c.k_s = *o.k_s;
    if (o.k_p) c.k_p = *o.k_p;
    if (o.k_o) c.k_o = *o.k_o;
    if (o.d_0) c.d_0 = *o.d_0;
    if (o.step_cap) c.step_cap = *o.step_cap;
    c.seed = o.seed;
    return s;
}

std::string scenario_name(const CommonOpts& o) {
    if (o.scenario_path.empty()) return "experiment";
    std::size_t slash = o.scenario_path.find_last_of("/\\");
    return slash == std::string::npos ? o.scenario_path : o.scenario_path.substr(slash + 1);
}

// Output sink: --out file or stdout.
struct Sink {
    std::ofstream file;
    std::ostream* out = &std::cout;

    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file.open(path, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open output file: " + path);
            out = &file;
        }
    }
};

std::vector<std::pair<std::string, SimulationConfig>> load_grid(const std::string& path,
                                                                const SimulationConfig& base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid file: " + path);
    std::vector<std::pair<std::string, SimulationConfig>> grid;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty grid file");
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::vector<std::string> f;
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() < 4)
            throw std::runtime_error("grid rows need label,kappa_tt,kappa_q,kappa_f[,gamma,rho_c,tau_c,tau_a]");
        SimulationConfig c = base;
        c.kappa_tt = std::stod(f[1]);
        c.kappa_q = std::stod(f[2]);
        c.kappa_f = std::stod(f[3]);
        if (f.size() > 4) c.gamma = std::stod(f[4]);
        if (f.size() > 5) c.rho_c = std::stod(f[5]);
        if (f.size() > 6) c.tau_c = std::stoi(f[6]);
        if (f.size() > 7) c.tau_a = std::stoi(f[7]);
        grid.emplace_back(f[0], c);
    }
    return grid;
}

int cmd_run(const CommonOpts& o, int procedure, const std::string& trace_path,
            const std::string& choice_trace_path) {
    Scenario s = load_scenario(o);
    std::set<std::string> closed = procedure_closures(procedure);
    if (!closed.empty()) s = close_openings(s, closed);

    std::ofstream trace_file, choice_file;
    TraceSinks sinks;
    if (!trace_path.empty()) {
        trace_file.open(trace_path, std::ios::binary);
        if (!trace_file) throw std::runtime_error("cannot open trace file: " + trace_path);
        sinks.movement = &trace_file;
    }
    if (!choice_trace_path.empty()) {
        choice_file.open(choice_trace_path, std::ios::binary);
        if (!choice_file) throw std::runtime_error("cannot open trace file: " + choice_trace_path);
        sinks.choices = &choice_file;
    }

    RunResult r = run(s, o.seed, (sinks.movement || sinks.choices) ? &sinks : nullptr);
    Sink sink(o.out_path);
    write_run_csv_header(*sink.out);
    write_run_csv(*sink.out, scenario_name(o), procedure, o.seed, r);
    return r.complete ? 0 : 2;
}

int cmd_batch(const CommonOpts& o, int procedure, int runs, const std::string& label) {
    Scenario s = load_scenario(o);
    BatchReport report = run_batch(s, procedure, s.config, runs, o.seed, o.jobs);
    report.label = label.empty() ? (o.calibration.empty() ? "custom" : o.calibration) : label;
    Sink sink(o.out_path);
    write_batch_csv_header(*sink.out);
    write_batch_csv(*sink.out, report);
    return report.incomplete == 0 ? 0 : 2;
}

int cmd_sweep(const CommonOpts& o, const std::string& grid_path, int runs,
              std::vector<int> procedures) {
    Scenario s = load_scenario(o);
    auto grid = load_grid(grid_path, s.config);
    if (procedures.empty()) procedures = {2, 3, 4};
    auto entries = sweep(s, grid, procedures, runs, o.seed, o.jobs);
    Sink sink(o.out_path);
    write_sweep_csv(*sink.out, entries);
    return 0;
}

int cmd_compare(const CommonOpts& o, const std::string& report_path) {
    std::ifstream in(report_path);
    if (!in) throw std::runtime_error("cannot open report file: " + report_path);
    auto reports = read_batch_csv(in);
    Sink sink(o.out_path);
    *sink.out << "label,procedure,gate,mean_sim,stdev_sim,mean_ref,delta,score\n";
    for (const BatchReport& r : reports) {
        std::array<double, 3> ref{0.0, 0.0, 0.0};
        if (auto it = reference_data().find(r.procedure); it != reference_data().end())
            ref = it->second.average;
        else if (r.procedure == 1)
            ref = {46.0, 0.0, 0.0};
        else
            continue;
        auto means = r.means_abc();
        auto stdevs = r.stdevs_abc();
        double score = score_against(means, ref);
        const char* ids[] = {"a", "b", "c"};
        for (int i = 0; i < 3; ++i) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s,%d,%s,%.6g,%.6g,%.6g,%.6g,%.6g\n", r.label.c_str(),
                          r.procedure, ids[i], means[i], stdevs[i], ref[i], means[i] - ref[i], score);
            *sink.out << buf;
        }
    }
    return 0;
}

int cmd_paths(const CommonOpts& o, int procedure) {
    Scenario s = load_scenario(o);
    std::set<std::string> closed = procedure_closures(procedure);
    if (!closed.empty()) s = close_openings(s, closed);
    Knowledge k = build_knowledge(s);

    Sink sink(o.out_path);
    for (const auto& [dest, tree] : k.trees) {
        for (const auto& [key, path] : tree.entries) {
            *sink.out << "{\"region\": \"" << key.first << "\", \"path\": [";
            for (std::size_t i = 0; i < path.steps.size(); ++i) {
                if (i) *sink.out << ", ";
                *sink.out << '"' << path.steps[i] << '"';
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.6g", path.free_flow_time);
            *sink.out << "], \"tt\": " << buf << "}\n";
        }
    }
    return 0;
}

int cmd_fields(const CommonOpts& o, int procedure, const std::string& dump) {
    Scenario s = load_scenario(o);
    std::set<std::string> closed = procedure_closures(procedure);
    if (!closed.empty()) s = close_openings(s, closed);

    Grid<double> values;
    if (dump == "obstacle") {
        values = compute_obstacle_field(s).values;
    } else if (dump.rfind("path:", 0) == 0) {
        std::string id = dump.substr(5);
        const std::vector<Cell>* cells = s.target_cells(id);
        if (cells == nullptr) throw std::runtime_error("unknown field target '" + id + "'");
        values = compute_path_field(s, id, *cells).values;
    } else {
        throw std::runtime_error("--dump expects 'path:ID' or 'obstacle'");
    }

    Sink sink(o.out_path);
    for (int y = 0; y < values.height(); ++y) {
        for (int x = 0; x < values.width(); ++x) {
            if (x) *sink.out << ',';
            double v = values.at(x, y);
            if (std::isfinite(v)) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.6g", v);
                *sink.out << buf;
            }
            // infinity dumps as an empty cell
        }
        *sink.out << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wayfinder - discrete-grid pedestrian route choice simulator"};
    app.require_subcommand(1);

    CommonOpts run_o, batch_o, sweep_o, compare_o, fields_o;
    int run_proc = 4, batch_proc = 4, fields_proc = 4;
    int batch_runs = 50, sweep_runs = 50;
    std::string trace_path, choice_trace_path, batch_label, grid_path, report_path, dump_what;
    std::vector<int> sweep_procs;

    CLI::App* c_run = app.add_subcommand("run", "Single simulation run, result as CSV");
    add_common(c_run, run_o);
    c_run->add_option("--procedure", run_proc, "Gate procedure 1-4")->check(CLI::Range(1, 4));
    c_run->add_option("--trace", trace_path, "Per-step movement trace CSV");
    c_run->add_option("--choice-trace", choice_trace_path, "Per-evaluation choice trace CSV");

    CLI::App* c_batch = app.add_subcommand("batch", "Monte-Carlo batch of runs");
    add_common(c_batch, batch_o);
    c_batch->add_option("--procedure", batch_proc, "Gate procedure 1-4")->check(CLI::Range(1, 4));
    c_batch->add_option("--runs", batch_runs, "Number of runs");
    c_batch->add_option("--label", batch_label, "Report label");

    CLI::App* c_sweep = app.add_subcommand("sweep", "Score a grid of calibrations");
    add_common(c_sweep, sweep_o);
    c_sweep->add_option("--grid", grid_path, "Config grid CSV")->required();
    c_sweep->add_option("--runs", sweep_runs, "Runs per (config, procedure)");
    c_sweep->add_option("--procedures", sweep_procs, "Procedures to score (default 2 3 4)");

    CLI::App* c_compare = app.add_subcommand("compare", "Compare a batch report with the reference data");
    add_common(c_compare, compare_o, false);
    c_compare->add_option("--report", report_path, "Batch CSV produced by 'batch'")->required();

    CommonOpts paths_o;
    int paths_proc = 4;
    CLI::App* c_paths = app.add_subcommand("paths", "Dump the paths tree as JSON-like text");
    add_common(c_paths, paths_o, false);
    c_paths->add_option("--procedure", paths_proc, "Gate procedure 1-4")->check(CLI::Range(1, 4));

    CLI::App* c_fields = app.add_subcommand("fields", "Dump a floor field as CSV");
    add_common(c_fields, fields_o, false);
    c_fields->add_option("--dump", dump_what, "'path:ID' or 'obstacle'")->required();
    c_fields->add_option("--procedure", fields_proc, "Gate procedure 1-4")->check(CLI::Range(1, 4));

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return cmd_run(run_o, run_proc, trace_path, choice_trace_path);
        if (c_batch->parsed()) return cmd_batch(batch_o, batch_proc, batch_runs, batch_label);
        if (c_sweep->parsed()) return cmd_sweep(sweep_o, grid_path, sweep_runs, sweep_procs);
        if (c_compare->parsed()) return cmd_compare(compare_o, report_path);
        if (c_paths->parsed()) return cmd_paths(paths_o, paths_proc);
        if (c_fields->parsed()) return cmd_fields(fields_o, fields_proc, dump_what);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
