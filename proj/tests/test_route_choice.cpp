#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "wayfinder/route_choice.hpp"

using namespace wayfinder;

namespace {

RoutePath make_path(std::vector<std::string> steps, double tt = 1.0) {
    RoutePath p;
    p.steps = std::move(steps);
    p.free_flow_time = tt;
    return p;
}

std::vector<PathEvaluation> evals_for(const std::vector<const RoutePath*>& ps) {
    std::vector<PathEvaluation> out;
    for (const RoutePath* p : ps) {
        PathEvaluation e;
        e.path = p;
        out.push_back(e);
    }
    return out;
}

}  // namespace

TEST_CASE("travel time adds the approach leg to the stored free-flow time") {
    Scenario s = parse_scenario("\n..1...\n");  // opening splits the corridor
    FieldSet fields = compute_all_fields(s);
    RoutePath p = make_path({"a"}, 4.2);

    // standing on the opening itself: the stored time, exactly
    auto on_target = travel_time(p, {2, 0}, fields, 1.2);
    REQUIRE(on_target.has_value());
    CHECK(*on_target == 4.2);

    // 1.2 m upstream at 1.2 m/s adds exactly one second
    auto upstream = travel_time(p, {5, 0}, fields, 1.2);
    REQUIRE(upstream.has_value());
    CHECK(*upstream == doctest::Approx(5.2));
}

TEST_CASE("travel time is unavailable for cut-off agents") {
    Scenario s = parse_scenario("\n..1.#.\n");
    FieldSet fields = compute_all_fields(s);
    RoutePath p = make_path({"a"}, 1.0);
    CHECK(travel_time(p, {5, 0}, fields, 1.0) == std::nullopt);
}

TEST_CASE("experiment travel times order the three paths by length") {
    Scenario s = parse_scenario(experiment_scenario_text());
    FieldSet fields = compute_all_fields(s);
    CognitiveMap cm = build_cognitive_map(s);
    PathsTree pt = build_paths_tree(s, cm, "E", fields);
    auto ps = paths(pt, "R2");
    REQUIRE(ps.size() == 3);

    // from anywhere on the start line the ordering a < b < c holds
    for (int x : {3, 5, 8}) {
        Cell pos{x, 32};
        auto ta = travel_time(*ps[0], pos, fields, s.config.desired_speed);
        auto tb = travel_time(*ps[1], pos, fields, s.config.desired_speed);
        auto tc = travel_time(*ps[2], pos, fields, s.config.desired_speed);
        CHECK(*ta < *tb);
        CHECK(*tb < *tc);
    }
}

TEST_CASE("eval_tt normalizes against the fastest candidate") {
    RoutePath a = make_path({"a", "E"});
    RoutePath b = make_path({"b", "E"});

    SUBCASE("single candidate evaluates to 1") {
        auto evals = evals_for({&a});
        evals[0].travel_time_s = 7.7;
        eval_tt_inplace(evals);
        CHECK(evals[0].eval_tt == 1.0);
    }

    SUBCASE("the published procedure-2 times give {1, 0.940}") {
        auto evals = evals_for({&a, &b});
        evals[0].travel_time_s = 12.08 / 1.33;  // 9.08 s
        evals[1].travel_time_s = 12.85 / 1.33;  // 9.66 s
        eval_tt_inplace(evals);
        CHECK(evals[0].eval_tt == 1.0);
        CHECK(evals[1].eval_tt == doctest::Approx(0.940).epsilon(1e-3));
    }

    SUBCASE("ties all evaluate to 1") {
        auto evals = evals_for({&a, &b});
        evals[0].travel_time_s = 3.0;
        evals[1].travel_time_s = 3.0;
        eval_tt_inplace(evals);
        CHECK(evals[0].eval_tt == 1.0);
        CHECK(evals[1].eval_tt == 1.0);
    }
}

TEST_CASE("forward_count matches the set-comprehension definition") {
    Scenario s = parse_scenario("\n..........\n..........\n..........\n");
    FloorField pf = compute_path_field(s, "a", {{0, 0}});

    SUBCASE("no other agents") {
        std::vector<TargetedAgent> agents = {{{5, 0}, "a"}};
        CHECK(forward_count(pf, "a", 0, agents) == 0);
    }

    SUBCASE("one nearer, one farther") {
        std::vector<TargetedAgent> agents = {{{5, 0}, "a"}, {{2, 0}, "a"}, {{8, 0}, "a"}};
        CHECK(forward_count(pf, "a", 0, agents) == 1);
    }

    SUBCASE("agents heading elsewhere never count") {
        std::vector<TargetedAgent> agents = {{{5, 0}, "a"}, {{2, 0}, "b"}, {{1, 0}, ""}};
        CHECK(forward_count(pf, "a", 0, agents) == 0);
    }

    SUBCASE("30 random agents equal the brute-force oracle") {
        SimRng rng(42);
        for (int round = 0; round < 20; ++round) {
            std::vector<TargetedAgent> agents;
            const char* dests[] = {"a", "b", ""};
            for (int i = 0; i < 30; ++i)
                agents.push_back({{int(rng.bounded(10)), int(rng.bounded(3))},
                                  dests[rng.bounded(3)]});
            for (std::size_t self = 0; self < agents.size(); ++self)
                CHECK(forward_count(pf, "a", self, agents) ==
                      oracle::forward_brute(pf, "a", self, agents));
        }
    }
}

TEST_CASE("perceive_forward applies the strict perception threshold") {
    Scenario s = parse_scenario("\n..........\n");
    FloorField pf = compute_path_field(s, "a", {{0, 0}});
    // self at x5 (2.0 m), two nearer agents targeting a
    std::vector<TargetedAgent> agents = {{{5, 0}, "a"}, {{2, 0}, "a"}, {{3, 0}, "a"}};

    CHECK(perceive_forward(pf, "a", 0, agents, 2.0) == 0);      // PF == gamma: strict
    CHECK(perceive_forward(pf, "a", 0, agents, 2.0001) == 2);   // just inside
    CHECK(perceive_forward(pf, "a", 0, agents, 1e9) == 2);      // unbounded perception
    CHECK(perceive_forward(pf, "a", 0, agents, 0.0) == 0);
}

TEST_CASE("eval_q scales by width and normalizes by the maximum") {
    // center chamber with a 5-cell (2.0 m) gate to the left chamber and a
    // 2-cell (0.8 m) gate to the right chamber
    const char* doc =
        "\n"
        "#############\n"
        "#...#.....#.#\n"
        "#...1.....2.#\n"
        "#...1.....2.#\n"
        "#...1.....#.#\n"
        "#...1.....#.#\n"
        "#...1.....#.#\n"
        "#############\n";
    Scenario s = parse_scenario(doc);
    REQUIRE(s.openings.size() == 2);
    CHECK(s.openings[0].width_meters == doctest::Approx(2.0));
    CHECK(s.openings[1].width_meters == doctest::Approx(0.8));
    FieldSet fields = compute_all_fields(s);

    RoutePath pa = make_path({"a"});
    RoutePath pb = make_path({"b"});

    SUBCASE("empty room: all zeros") {
        std::vector<TargetedAgent> agents = {{{7, 4}, ""}};
        auto evals = evals_for({&pa, &pb});
        eval_q_inplace(evals, s, fields, 0, agents, 1e9);
        CHECK(evals[0].eval_q == 0.0);
        CHECK(evals[1].eval_q == 0.0);
    }

    SUBCASE("congestion only ahead of gate a") {
        std::vector<TargetedAgent> agents = {{{7, 4}, "a"}};
        for (int i = 0; i < 5; ++i) agents.push_back({{5, 2 + i}, "a"});
        auto evals = evals_for({&pa, &pb});
        eval_q_inplace(evals, s, fields, 0, agents, 1e9);
        CHECK(evals[0].eval_q == 1.0);
        CHECK(evals[1].eval_q == 0.0);
    }

    SUBCASE("equal counts: the narrower gate feels more congested") {
        // 4 forward toward each gate; raw = 4/2.0 vs 4/0.8 -> {0.4, 1.0}
        std::vector<TargetedAgent> agents = {{{7, 4}, "a"}};
        for (int i = 0; i < 4; ++i) agents.push_back({{5, 2 + i}, "a"});
        agents.push_back({{9, 2}, "b"});
        agents.push_back({{9, 3}, "b"});
        agents.push_back({{8, 2}, "b"});
        agents.push_back({{8, 3}, "b"});
        auto evals = evals_for({&pa, &pb});
        eval_q_inplace(evals, s, fields, 0, agents, 1e9);
        CHECK(evals[0].eval_q == doctest::Approx(0.4));
        CHECK(evals[1].eval_q == doctest::Approx(1.0));
    }
}

TEST_CASE("choice field diffusion, summation and decay") {
    ChoiceField cf(9, 9);

    SUBCASE("weights follow 1/dist with 1 at the source cell") {
        cf.diffuse({4, 4}, "b", 1.2, 3);
        CHECK(cf.weight_at({4, 4}, "b") == doctest::Approx(1.0));
        CHECK(cf.weight_at({5, 4}, "b") == doctest::Approx(1.0));         // dist 1 cell
        CHECK(cf.weight_at({6, 4}, "b") == doctest::Approx(0.5));         // dist 2 cells
        CHECK(cf.weight_at({5, 5}, "b") == doctest::Approx(1 / std::sqrt(2.0)));
        CHECK(cf.weight_at({7, 4}, "b") == doctest::Approx(1.0 / 3.0));   // dist 3 = 1.2 m
        CHECK(cf.weight_at({8, 4}, "b") == 0.0);                          // beyond rho_c
        CHECK(cf.weight_at({4, 4}, "a") == 0.0);                          // other target
    }

    SUBCASE("simultaneous diffusions sum per target") {
        cf.diffuse({3, 4}, "b", 1.2, 3);
        cf.diffuse({6, 4}, "b", 1.2, 3);
        // (4,4): dist 1 from the first, dist 2 from the second
        CHECK(cf.weight_at({4, 4}, "b") == doctest::Approx(1.0 + 0.5));
        cf.diffuse({4, 4}, "c", 1.2, 3);
        CHECK(cf.weight_at({4, 4}, "b") == doctest::Approx(1.5));  // unaffected
        CHECK(cf.weight_at({4, 4}, "c") == doctest::Approx(1.0));
    }

    SUBCASE("entries persist exactly tau_c decays, no fading") {
        cf.diffuse({4, 4}, "b", 1.2, 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(cf.weight_at({4, 4}, "b") == doctest::Approx(1.0));  // full value while alive
            cf.decay();
        }
        CHECK(cf.weight_at({4, 4}, "b") == 0.0);
        CHECK(cf.entry_count() == 0);
    }

    SUBCASE("decay on an empty field is a no-op") {
        cf.decay();
        CHECK(cf.entry_count() == 0);
    }

    SUBCASE("an entry with one remaining step disappears after one decay") {
        cf.diffuse({4, 4}, "b", 0.0, 1);  // radius 0: only the source cell
        CHECK(cf.entry_count() == 1);
        cf.decay();
        CHECK(cf.entry_count() == 0);
    }
}

TEST_CASE("eval_f grants 1 to at most one candidate") {
    ChoiceField cf(9, 9);
    RoutePath pa = make_path({"a"});
    RoutePath pb = make_path({"b"});
    RoutePath pc = make_path({"c"});
    SimRng rng(99);

    SUBCASE("empty field: all zero") {
        auto evals = evals_for({&pa, &pb, &pc});
        eval_f_inplace(evals, cf, {4, 4}, rng);
        for (const auto& e : evals) CHECK(e.eval_f == 0.0);
    }

    SUBCASE("a single positive weight wins deterministically") {
        cf.diffuse({4, 4}, "b", 1.2, 3);
        for (int i = 0; i < 50; ++i) {
            auto evals = evals_for({&pa, &pb, &pc});
            eval_f_inplace(evals, cf, {4, 4}, rng);
            CHECK(evals[0].eval_f == 0.0);
            CHECK(evals[1].eval_f == 1.0);
            CHECK(evals[2].eval_f == 0.0);
        }
    }

    SUBCASE("weights 3:1 select at the normalized frequency") {
        cf.diffuse({4, 4}, "b", 0.0, 5);
        cf.diffuse({4, 4}, "b", 0.0, 5);
        cf.diffuse({4, 4}, "b", 0.0, 5);
        cf.diffuse({4, 4}, "c", 0.0, 5);
        int picked_b = 0;
        const int trials = 10000;
        for (int i = 0; i < trials; ++i) {
            auto evals = evals_for({&pa, &pb, &pc});
            eval_f_inplace(evals, cf, {4, 4}, rng);
            int ones = 0;
            for (const auto& e : evals) ones += (e.eval_f == 1.0);
            CHECK(ones == 1);
            picked_b += (evals[1].eval_f == 1.0);
        }
        CHECK(std::abs(picked_b / double(trials) - 0.75) <= 0.03);
    }
}

TEST_CASE("choose_path samples Eq. 1 exactly") {
    RoutePath pa = make_path({"a"});
    RoutePath pb = make_path({"b"});
    SimRng rng(1234);

    SUBCASE("all weights zero: uniform") {
        auto evals = evals_for({&pa, &pb});
        evals[0].eval_tt = 1.0;
        evals[1].eval_tt = 0.4;
        choose_path(evals, {0, 0, 0}, rng);
        CHECK(evals[0].probability == doctest::Approx(0.5));
        CHECK(evals[1].probability == doctest::Approx(0.5));
    }

    SUBCASE("identical evaluator triples: 50/50") {
        auto evals = evals_for({&pa, &pb});
        for (auto& e : evals) {
            e.eval_tt = 0.8;
            e.eval_q = 0.3;
            e.eval_f = 0.0;
        }
        choose_path(evals, {100, 25, 5}, rng);
        CHECK(evals[0].probability == doctest::Approx(0.5));
        CHECK(evals[1].probability == doctest::Approx(0.5));
    }

    SUBCASE("sharp weights reproduce the closed-form softmax") {
        auto evals = evals_for({&pa, &pb});
        evals[0].eval_tt = 1.0;
        evals[1].eval_tt = 0.940;
        choose_path(evals, {100, 0, 0}, rng);
        double expect_a = 1.0 / (1.0 + std::exp(-6.0));
        CHECK(evals[0].probability == doctest::Approx(expect_a).epsilon(1e-9));
        CHECK(evals[0].probability == doctest::Approx(0.9975).epsilon(1e-3));
        CHECK(evals[1].probability == doctest::Approx(0.0025).epsilon(0.05));
    }

    SUBCASE("probabilities sum to one for random finite inputs") {
        SimRng gen(777);
        for (int round = 0; round < 200; ++round) {
            auto evals = evals_for({&pa, &pb, &pa, &pb});
            for (auto& e : evals) {
                e.eval_tt = gen.uniform();
                e.eval_q = gen.uniform();
                e.eval_f = gen.bounded(2) ? 1.0 : 0.0;
            }
            UtilityWeights w{gen.uniform() * 200, gen.uniform() * 50, gen.uniform() * 10};
            choose_path(evals, w, rng);
            double total = 0.0;
            for (const auto& e : evals) {
                CHECK(e.probability >= 0.0);
                total += e.probability;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    SUBCASE("raising eval_q weakly decreases the path's probability") {
        double last = 1.0;
        for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            auto evals = evals_for({&pa, &pb});
            evals[0].eval_tt = 1.0;
            evals[0].eval_q = q;
            evals[1].eval_tt = 0.9;
            choose_path(evals, {10, 5, 0}, rng);
            CHECK(evals[0].probability <= last + 1e-12);
            last = evals[0].probability;
        }
    }

    SUBCASE("scaling all weights sharpens but never reorders") {
        auto base = evals_for({&pa, &pb});
        base[0].eval_tt = 1.0;
        base[0].eval_q = 0.2;
        base[1].eval_tt = 0.93;
        base[1].eval_q = 0.6;
        auto scaled = base;
        choose_path(base, {10, 2.5, 0.5}, rng);
        choose_path(scaled, {100, 25, 5}, rng);
        CHECK(scaled[0].probability > base[0].probability);  // same argmax, sharper
        CHECK((base[0].probability > base[1].probability) ==
              (scaled[0].probability > scaled[1].probability));
    }
}

TEST_CASE("choose_path empirical frequencies match the oracle softmax") {
    RoutePath pa = make_path({"a"});
    RoutePath pb = make_path({"b"});
    RoutePath pc = make_path({"c"});
    SimRng rng(31337);

    std::vector<std::array<double, 3>> triples = {
        {1.0, 0.0, 0.0}, {0.94, 1.0, 0.0}, {0.82, 0.1, 1.0}};
    auto expect = oracle::softmax_probs(triples, 10, 2.5, 0.5);

    const int draws = 20000;
    std::array<int, 3> hits{0, 0, 0};
    for (int i = 0; i < draws; ++i) {
        auto evals = evals_for({&pa, &pb, &pc});
        for (int j = 0; j < 3; ++j) {
            evals[j].eval_tt = triples[j][0];
            evals[j].eval_q = triples[j][1];
            evals[j].eval_f = triples[j][2];
        }
        const RoutePath* chosen = choose_path(evals, {10, 2.5, 0.5}, rng);
        for (int j = 0; j < 3; ++j)
            if (chosen == evals[j].path) ++hits[j];
    }
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(hits[j] / double(draws) - expect[j]) <= 0.02);
}
