#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "wayfinder/cognitive_map.hpp"
#include "wayfinder/route_choice.hpp"

namespace wayfinder {

struct Agent {
    int id = -1;
    Cell pos;
    double desired_speed = 0.0;
    int region = -1;                 // index into scenario.regions, -1 before first localization
    std::string final_dest;
    RoutePath path;                  // empty steps = no plan yet
    std::size_t next_step = 0;       // index of the current target within path.steps
    int spreading_remaining = 0;     // > 0 only within tau_a steps of a plan change
    bool finished = false;
    int finish_step = -1;
    std::uint32_t crossed_mask = 0;  // openings already counted for this agent

    bool has_plan() const { return !path.steps.empty(); }
    const std::string& current_dest() const { return path.steps[next_step]; }
};

// Immutable per-scenario knowledge shared by every run: fields, the cognitive
// map, and one paths tree per destination.
struct Knowledge {
    CognitiveMap cm;
    FieldSet fields;
    std::map<std::string, PathsTree> trees;
};

Knowledge build_knowledge(const Scenario& s);

struct TraceSinks {
    std::ostream* movement = nullptr;  // step,agent,x,y,dest
    std::ostream* choices = nullptr;   // step,agent,path,eval_tt,eval_q,eval_f,probability,chosen
};

struct SimulationState {
    int step_count = 0;
    std::vector<Agent> agents;
    ChoiceField choice_field;
    ProxemicField proxemic;
    Grid<int> occupancy;  // agent id, -1 free
    std::map<std::string, int> gate_crossings;
    SimRng rng;
    std::uint64_t trace_hash = 14695981039346656037ull;  // FNV-1a over the full state trace

    int active_count = 0;
};

// Containing region id; on opening cells, the region toward the agent's
// current destination.
std::string localize(const Agent& a, const Scenario& s, const Knowledge& k);

SimulationState make_state(const Scenario& s, std::uint64_t seed);

// Places config.agents agents on distinct random start-area cells.
void spawn_agents(SimulationState& st, const Scenario& s);

// One tick: decay choice field, rebuild proxemic field, then in one shuffled
// order all decisions, then in the same order all moves.
void step(SimulationState& st, const Scenario& s, const Knowledge& k,
          const TraceSinks* trace = nullptr);

// Target cell for one operational move (may equal the current cell = hold).
Cell move_operational(const Agent& a, SimulationState& st, const Scenario& s, const Knowledge& k);

struct RunResult {
    std::map<std::string, int> gate_crossings;
    std::vector<double> travel_times_s;  // per agent; -1 when unfinished
    int steps = 0;
    bool complete = false;
    int finished = 0;
    std::uint64_t trace_hash = 0;

    double mean_travel_time_s() const;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

// Deterministic given (scenario, knowledge, seed). Steps until every agent
// finished or the step cap is hit (then flagged incomplete).
RunResult run(const Scenario& s, const Knowledge& k, std::uint64_t seed,
              const TraceSinks* trace = nullptr);

// Convenience overload building the knowledge itself.
RunResult run(const Scenario& s, std::uint64_t seed, const TraceSinks* trace = nullptr);

}  // namespace wayfinder
