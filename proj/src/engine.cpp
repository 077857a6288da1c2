#include "wayfinder/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace wayfinder {

namespace {

void fnv_fold(std::uint64_t& h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (i * 8)) & 0xff;
        h *= 1099511628211ull;
    }
}

void fnv_fold(std::uint64_t& h, const std::string& s) {
    for (char c : s) {
        h ^= std::uint8_t(c);
        h *= 1099511628211ull;
    }
}

bool contains_cell(const std::vector<Cell>& sorted_cells, const Cell& c) {
    return std::binary_search(sorted_cells.begin(), sorted_cells.end(), c);
}

int localize_index(const Agent& a, const Scenario& s, const Knowledge& k) {
    std::int16_t r = s.region_index.at(a.pos);
    if (r >= 0) return r;

    const Opening* o = s.opening_at(a.pos);
    if (o == nullptr) throw std::logic_error("localize: agent on non-walkable cell");

    // Standing on an opening: the containing region is taken to be the
    // adjacent region toward the current destination (smaller path-field
    // value on its boundary).
    const std::string& target = a.has_plan() ? a.current_dest() : a.final_dest;
    const FloorField& pf = k.fields.field(target);
    int best = -1;
    double best_v = kInfDist;
    for (const Cell& c : o->cells) {
        for (const Cell& off : neighbor_offsets()) {
            Cell n{c.x + off.x, c.y + off.y};
            if (!s.grid.in_bounds(n)) continue;
            std::int16_t reg = s.region_index.at(n);
            if (reg < 0) continue;
            double v = pf.at(n);
            if (best < 0 || v < best_v || (v == best_v && reg < best)) {
                best = reg;
                best_v = v;
            }
        }
    }
    if (best < 0) throw std::logic_error("localize: opening without adjacent regions");
    return best;
}

std::string format_path(const RoutePath& p) {
    std::string out;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        if (i) out += '>';
        out += p.steps[i];
    }
    return out;
}

void trace_choices(std::ostream& out, int step, const Agent& a,
                   const std::vector<PathEvaluation>& evals, const RoutePath* chosen) {
    char buf[160];
    for (const PathEvaluation& e : evals) {
        std::snprintf(buf, sizeof buf, "%d,%d,%s,%.6g,%.6g,%.6g,%.6g,%d\n", step, a.id,
                      format_path(*e.path).c_str(), e.eval_tt, e.eval_q, e.eval_f, e.probability,
                      e.path == chosen ? 1 : 0);
        out << buf;
    }
}

// Advance the plan while standing on the current target; returns true when
// the final destination was reached.
bool advance_plan(Agent& a, const Scenario& s) {
    while (a.has_plan()) {
        const std::vector<Cell>* cells = s.target_cells(a.current_dest());
        if (cells == nullptr || !contains_cell(*cells, a.pos)) return false;
        if (a.next_step + 1 < a.path.steps.size()) {
            ++a.next_step;
        } else {
            return true;  // standing on the destination
        }
    }
    return false;
}

void register_crossing(SimulationState& st, Agent& a, const Scenario& s) {
    const Opening* o = s.opening_at(a.pos);
    if (o == nullptr) return;
    int idx = s.opening_pos(o->id);
    std::uint32_t bit = 1u << idx;
    if (a.crossed_mask & bit) return;
    a.crossed_mask |= bit;
    ++st.gate_crossings[o->id];
}

void finish_agent(SimulationState& st, Agent& a) {
    a.finished = true;
    a.finish_step = st.step_count;
    st.occupancy.at(a.pos) = -1;
    --st.active_count;
}

void decide(SimulationState& st, Agent& a, const Scenario& s, const Knowledge& k,
            const TraceSinks* trace) {
    a.region = localize_index(a, s, k);
    const PathsTree& tree = k.trees.at(a.final_dest);
    std::vector<const RoutePath*> cands = paths(tree, s.regions[a.region].id);

    if (!cands.empty() && (!a.has_plan() || cands.size() > 1)) {
        std::vector<PathEvaluation> evals;
        evals.reserve(cands.size());
        for (const RoutePath* p : cands) {
            auto tt = travel_time(*p, a.pos, k.fields, a.desired_speed);
            if (!tt) continue;  // cut off from this path's first target
            PathEvaluation e;
            e.path = p;
            e.travel_time_s = *tt;
            evals.push_back(e);
        }
        if (!evals.empty()) {
            eval_tt_inplace(evals);

            std::vector<TargetedAgent> others;
            others.reserve(st.agents.size());
            std::size_t self = 0;
            for (const Agent& other : st.agents) {
                if (other.finished) continue;
                if (other.id == a.id) self = others.size();
                others.push_back({other.pos, other.has_plan() ? std::string_view(other.current_dest())
                                                              : std::string_view()});
            }
            eval_q_inplace(evals, s, k.fields, self, others, s.config.gamma);
            eval_f_inplace(evals, st.choice_field, a.pos, st.rng);

            UtilityWeights w{s.config.kappa_tt, s.config.kappa_q, s.config.kappa_f};
            const RoutePath* chosen = choose_path(evals, w, st.rng);

            bool plan_change = a.has_plan() && chosen->first() != a.current_dest();
            a.path = *chosen;
            a.next_step = 0;
            if (plan_change) a.spreading_remaining = s.config.tau_a;
            if (trace && trace->choices) trace_choices(*trace->choices, st.step_count, a, evals, chosen);
        }
    }

    if (a.spreading_remaining > 0 && a.has_plan()) {
        st.choice_field.diffuse(a.pos, a.current_dest(), s.config.rho_c, s.config.tau_c);
        --a.spreading_remaining;
    }
}

}  // namespace

std::string localize(const Agent& a, const Scenario& s, const Knowledge& k) {
    return s.regions[localize_index(a, s, k)].id;
}

Knowledge build_knowledge(const Scenario& s) {
    Knowledge k;
    k.cm = build_cognitive_map(s);
    k.fields = compute_all_fields(s);
    for (const DestinationArea& d : s.destinations)
        k.trees.emplace(d.id, build_paths_tree(s, k.cm, d.id, k.fields));
    return k;
}

SimulationState make_state(const Scenario& s, std::uint64_t seed) {
    SimulationState st;
    st.choice_field = ChoiceField(s.grid.width(), s.grid.height());
    st.occupancy = Grid<int>(s.grid.width(), s.grid.height(), -1);
    st.rng = SimRng(seed);
    for (const Opening& o : s.openings) st.gate_crossings[o.id] = 0;
    return st;
}

void spawn_agents(SimulationState& st, const Scenario& s) {
    if (s.start_areas.empty()) throw std::runtime_error("scenario has no start area");
    if (s.destinations.empty()) throw std::runtime_error("scenario has no destination");

    std::vector<Cell> cells;
    for (const StartArea& area : s.start_areas)
        cells.insert(cells.end(), area.cells.begin(), area.cells.end());
    if (int(cells.size()) < s.config.agents)
        throw std::runtime_error("start area too small for " + std::to_string(s.config.agents) +
                                 " agents");
    st.rng.shuffle(cells);

    st.agents.reserve(s.config.agents);
    for (int i = 0; i < s.config.agents; ++i) {
        Agent a;
        a.id = i;
        a.pos = cells[i];
        a.desired_speed = s.config.desired_speed;
        a.final_dest = s.destinations.front().id;
        st.agents.push_back(std::move(a));
        st.occupancy.at(cells[i]) = i;
    }
    st.active_count = s.config.agents;
}

Cell move_operational(const Agent& a, SimulationState& st, const Scenario& s, const Knowledge& k) {
    if (!a.has_plan()) return a.pos;
    const FloorField& pf = k.fields.field(a.current_dest());
    double here = pf.at(a.pos);
    if (!std::isfinite(here)) return a.pos;

    const SimulationConfig& cfg = s.config;
    std::vector<Cell> moves;
    std::vector<double> weights;
    moves.reserve(9);
    weights.reserve(9);

    auto push = [&](const Cell& n) {
        double drop = here - pf.at(n);  // -inf on unreachable cells -> weight 0
        double prox = st.proxemic.at(n) - proxemic_kernel(euclid_m(a.pos, n));
        double wall = std::max(0.0, cfg.d_0 - k.fields.obstacle.at(n));
        double u = cfg.k_s * drop - cfg.k_p * std::max(prox, 0.0) - cfg.k_o * wall;
        double w = std::exp(u);
        if (w > 0.0) {
            moves.push_back(n);
            weights.push_back(w);
        }
    };

    push(a.pos);  // holding is always available
    for (const Cell& off : neighbor_offsets()) {
        Cell n{a.pos.x + off.x, a.pos.y + off.y};
        if (!step_allowed(s, a.pos, n)) continue;
        if (st.occupancy.at(n) >= 0) continue;
        push(n);
    }
    return moves[st.rng.sample_weighted(weights)];
}

void step(SimulationState& st, const Scenario& s, const Knowledge& k, const TraceSinks* trace) {
    ++st.step_count;
    st.choice_field.decay();

    std::vector<Cell> positions;
    positions.reserve(st.agents.size());
    std::vector<int> order;
    order.reserve(st.agents.size());
    for (const Agent& a : st.agents) {
        if (a.finished) continue;
        positions.push_back(a.pos);
        order.push_back(a.id);
    }
    st.proxemic.rebuild(s, positions);
    st.rng.shuffle(order);

    for (int id : order) decide(st, st.agents[id], s, k, trace);

    for (int id : order) {
        Agent& a = st.agents[id];
        Cell to = move_operational(a, st, s, k);
        if (to != a.pos) {
            st.occupancy.at(a.pos) = -1;
            st.occupancy.at(to) = a.id;
            a.pos = to;
            register_crossing(st, a, s);
            if (advance_plan(a, s)) finish_agent(st, a);
        }
        if (trace && trace->movement) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%s\n", st.step_count, a.id, a.pos.x, a.pos.y,
                          a.finished ? "-" : (a.has_plan() ? a.current_dest().c_str() : "-"));
            *trace->movement << buf;
        }
    }

    fnv_fold(st.trace_hash, std::uint64_t(st.step_count));
    for (const Agent& a : st.agents) {
        fnv_fold(st.trace_hash, std::uint64_t(a.id));
        fnv_fold(st.trace_hash, std::uint64_t(std::uint32_t(a.pos.x)));
        fnv_fold(st.trace_hash, std::uint64_t(std::uint32_t(a.pos.y)));
        fnv_fold(st.trace_hash, std::uint64_t(a.finished ? 1 : 0));
        if (!a.finished && a.has_plan()) fnv_fold(st.trace_hash, a.current_dest());
    }
}

double RunResult::mean_travel_time_s() const {
    double sum = 0.0;
    int n = 0;
    for (double t : travel_times_s) {
        if (t >= 0.0) {
            sum += t;
            ++n;
        }
    }
    return n > 0 ? sum / n : 0.0;
}

RunResult run(const Scenario& s, const Knowledge& k, std::uint64_t seed, const TraceSinks* trace) {
    SimulationState st = make_state(s, seed);
    spawn_agents(st, s);
    if (trace && trace->movement) *trace->movement << "step,agent,x,y,dest\n";
    if (trace && trace->choices)
        *trace->choices << "step,agent,path,eval_tt,eval_q,eval_f,probability,chosen\n";

    while (st.active_count > 0 && st.step_count < s.config.step_cap) step(st, s, k, trace);

    RunResult r;
    r.gate_crossings = st.gate_crossings;
    r.steps = st.step_count;
    r.complete = (st.active_count == 0);
    r.finished = int(st.agents.size()) - st.active_count;
    r.travel_times_s.reserve(st.agents.size());
    for (const Agent& a : st.agents)
        r.travel_times_s.push_back(a.finished ? a.finish_step * s.config.step_duration : -1.0);
    for (const auto& [id, count] : r.gate_crossings) {
        fnv_fold(st.trace_hash, id);
        fnv_fold(st.trace_hash, std::uint64_t(std::uint32_t(count)));
    }
    r.trace_hash = st.trace_hash;
    return r;
}

RunResult run(const Scenario& s, std::uint64_t seed, const TraceSinks* trace) {
    Knowledge k = build_knowledge(s);
    return run(s, k, seed, trace);
}

}  // namespace wayfinder
