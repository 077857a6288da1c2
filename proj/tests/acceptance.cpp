// Acceptance suite: reproduces the controlled experiment and checks the
// model's statistical contracts end to end. One line per criterion; exit
// code 0 only if every criterion passes.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wayfinder/harness.hpp"

using namespace wayfinder;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

constexpr std::uint64_t kBaseSeed = 100;
constexpr int kRuns = 50;

struct ProcedureOutcome {
    BatchReport report;
    double elapsed_s = 0.0;
};

ProcedureOutcome run_procedure(const Scenario& base, int procedure, const SimulationConfig& cfg) {
    ProcedureOutcome out;
    auto t0 = Clock::now();
    out.report = run_batch(base, procedure, cfg, kRuns, kBaseSeed, 0);
    out.elapsed_s = seconds_since(t0);
    return out;
}

bool within(const std::array<double, 3>& means, const std::array<double, 3>& ref, double tol) {
    for (int i = 0; i < 3; ++i)
        if (std::abs(means[i] - ref[i]) > tol) return false;
    return true;
}

}  // namespace

int main() {
    Scenario base = parse_scenario(experiment_scenario_text());
    const SimulationConfig shipped = base.config;  // header == shipped defaults
    auto wall0 = Clock::now();

    // 1. procedure 1: every run exactly (46, 0, 0), under 5 seconds total
    {
        auto t0 = Clock::now();
        BatchReport r = run_batch(base, 1, apply_calibration(shipped, "C1"), kRuns, kBaseSeed, 0);
        double dt = seconds_since(t0);
        bool exact = r.gates.at("a").min == 46 && r.gates.at("a").max == 46 &&
                     r.gates.at("b").max == 0 && r.gates.at("c").max == 0 && r.incomplete == 0;
        report(1, exact && dt < 5.0,
               fmt("procedure 1: 50/50 runs exactly (46,0,0) in %.2f s (< 5 s)", dt));
    }

    // 2-4. procedures 2-4 with the shipped default calibration (C3)
    ProcedureOutcome p2 = run_procedure(base, 2, shipped);
    ProcedureOutcome p3 = run_procedure(base, 3, shipped);
    ProcedureOutcome p4 = run_procedure(base, 4, shipped);
    {
        auto m = p2.report.means_abc();
        auto sd = p2.report.stdevs_abc();
        bool ok = within(m, {23.25, 22.75, 0.0}, 3.0) &&
                  *std::max_element(sd.begin(), sd.end()) <= 4.0 && p2.report.incomplete == 0;
        report(2, ok,
               fmt("procedure 2: means (%.2f, %.2f, %.2f) vs (23.25, 22.75, 0) +-3.0, max std %.2f <= 4",
                   m[0], m[1], m[2], *std::max_element(sd.begin(), sd.end())));
    }
    {
        auto m = p3.report.means_abc();
        bool ok = within(m, {28.0, 0.0, 18.0}, 4.0) && p3.report.incomplete == 0;
        report(3, ok,
               fmt("procedure 3: means (%.2f, %.2f, %.2f) vs (28, 0, 18) +-4.0", m[0], m[1], m[2]));
    }
    {
        auto m = p4.report.means_abc();
        bool ok = within(m, {20.75, 18.0, 7.25}, 4.0) && m[0] > m[1] && m[1] > m[2] &&
                  p4.report.incomplete == 0;
        report(4, ok,
               fmt("procedure 4: means (%.2f, %.2f, %.2f) vs (20.75, 18, 7.25) +-4.0, ordering a>b>c",
                   m[0], m[1], m[2]));
    }

    // 5. C3 lowers total per-gate variance vs C2 at comparable means
    {
        SimulationConfig c2 = apply_calibration(shipped, "C2");
        double var_c2 = 0.0, var_c3 = 0.0;
        bool comparable = true;
        for (int proc : {2, 3, 4}) {
            BatchReport rc2 = run_batch(base, proc, c2, kRuns, kBaseSeed, 0);
            const BatchReport& rc3 =
                proc == 2 ? p2.report : (proc == 3 ? p3.report : p4.report);
            auto m2 = rc2.means_abc(), m3 = rc3.means_abc();
            auto s2 = rc2.stdevs_abc(), s3 = rc3.stdevs_abc();
            for (int g = 0; g < 3; ++g) {
                var_c2 += s2[g] * s2[g];
                var_c3 += s3[g] * s3[g];
                if (std::abs(m2[g] - m3[g]) > 3.0) comparable = false;
            }
        }
        report(5, comparable && var_c3 < var_c2,
               fmt("calibration variability: total variance C3 %.2f < C2 %.2f at comparable means",
                   var_c3, var_c2));
    }

    // 6. choose_path sampling matches Eq. 1 probabilities
    {
        SimRng gen(17);
        SimRng rng(18);
        RoutePath proto[4];
        const char* ids[] = {"a", "b", "c", "d"};
        for (int i = 0; i < 4; ++i) proto[i].steps = {ids[i]};

        double worst = 0.0;
        for (int round = 0; round < 1000; ++round) {
            int n = 2 + int(gen.bounded(3));
            std::vector<PathEvaluation> evals;
            for (int i = 0; i < n; ++i) {
                PathEvaluation e;
                e.path = &proto[i];
                e.eval_tt = gen.uniform();
                e.eval_q = gen.uniform();
                e.eval_f = gen.bounded(4) == 0 ? 1.0 : 0.0;
                evals.push_back(e);
            }
            UtilityWeights w{gen.uniform() * 150.0, gen.uniform() * 50.0, gen.uniform() * 10.0};

            const int draws = 20000;
            std::vector<int> hits(n, 0);
            for (int d = 0; d < draws; ++d) {
                const RoutePath* chosen = choose_path(evals, w, rng);
                for (int i = 0; i < n; ++i)
                    if (chosen == evals[i].path) ++hits[i];
            }
            for (int i = 0; i < n; ++i)
                worst = std::max(worst, std::abs(hits[i] / double(draws) - evals[i].probability));
        }
        report(6, worst <= 0.02,
               fmt("softmax sampling: worst |empirical - Eq.1| = %.4f over 1000 cases (<= 0.02)",
                   worst));
    }

    // 7. path fields equal the brute-force shortest-path oracle
    {
        SimRng gen(23);
        double worst = 0.0;
        bool structure_ok = true;
        for (int round = 0; round < 25; ++round) {
            Scenario s = parse_scenario(oracle::random_raster(gen, 12, 12, 0.2));
            auto cells = oracle::walkable_cells(s);
            if (cells.empty()) continue;
            Cell target = cells[gen.bounded(cells.size())];
            FloorField f = compute_path_field(s, "t", {target});
            Grid<double> ref = oracle::path_field(s, {target});
            for (int y = 0; y < 12; ++y) {
                for (int x = 0; x < 12; ++x) {
                    double a = f.at({x, y}), b = ref.at({x, y});
                    if (std::isinf(a) != std::isinf(b)) structure_ok = false;
                    else if (std::isfinite(a)) worst = std::max(worst, std::abs(a - b));
                }
            }
        }
        report(7, structure_ok && worst <= 1e-9,
               fmt("floor-field oracle: 25 random grids, worst |field - oracle| = %.2e (<= 1e-9)",
                   worst));
    }

    // 8. Forward / PerceiveForward equal brute-force set comprehensions
    {
        SimRng gen(29);
        Scenario s = parse_scenario(oracle::random_raster(gen, 10, 10, 0.0));
        FloorField pf = compute_path_field(s, "a", {{0, 0}});
        bool ok = true;
        for (int round = 0; round < 100; ++round) {
            std::vector<TargetedAgent> agents;
            const char* dests[] = {"a", "b", ""};
            int n = 2 + int(gen.bounded(29));
            for (int i = 0; i < n; ++i)
                agents.push_back({{int(gen.bounded(10)), int(gen.bounded(10))},
                                  dests[gen.bounded(3)]});
            double gamma = gen.uniform() * 6.0;
            for (std::size_t self = 0; self < agents.size(); ++self) {
                int expect = oracle::forward_brute(pf, "a", self, agents);
                if (forward_count(pf, "a", self, agents) != expect) ok = false;
                int gated = pf.at(agents[self].pos) < gamma ? expect : 0;
                if (perceive_forward(pf, "a", self, agents, gamma) != gated) ok = false;
            }
        }
        report(8, ok, "Forward/PerceiveForward: 100 random configurations match set comprehension");
    }

    // 9. ChoiceField lifecycle: tau_c survivals, 1/dist weights
    {
        ChoiceField cf(11, 11);
        cf.diffuse({5, 5}, "b", 1.2, 3);
        bool ok = cf.weight_at({5, 5}, "b") == 1.0 && cf.weight_at({7, 5}, "b") == 0.5;
        int alive = 0;
        while (cf.entry_count() > 0 && alive < 10) {
            cf.decay();
            ++alive;
        }
        ok = ok && alive == 3;
        report(9, ok, fmt("choice field: self weight 1, dist-2 weight 0.5, survived %d decays (= 3)",
                          alive));
    }

    // 10. bit-identical reruns
    {
        Scenario p4s = experiment_scenario(4);
        Knowledge k = build_knowledge(p4s);
        std::ostringstream m1, m2, c1, c2;
        TraceSinks t1{&m1, &c1}, t2{&m2, &c2};
        RunResult r1 = run(p4s, k, 777, &t1);
        RunResult r2 = run(p4s, k, 777, &t2);
        bool ok = r1 == r2 && m1.str() == m2.str() && c1.str() == c2.str();
        report(10, ok, "determinism: identical seeds give bit-identical traces and results");
    }

    // 11. the four reproduction batches (200 runs) stay under two minutes
    {
        double total = seconds_since(wall0);
        double batch_time = p2.elapsed_s + p3.elapsed_s + p4.elapsed_s;
        report(11, total < 120.0,
               fmt("performance: full suite %.2f s (batches 2-4: %.2f s), budget 120 s", total,
                   batch_time));
    }

    if (g_failures == 0) {
        std::printf("acceptance: all 11 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return 1;
}
