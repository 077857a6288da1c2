#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wayfinder/cognitive_map.hpp"
#include "wayfinder/floor_fields.hpp"
#include "wayfinder/rng.hpp"

namespace wayfinder {

struct UtilityWeights {
    double kappa_tt = 0.0;
    double kappa_q = 0.0;
    double kappa_f = 0.0;
};

// Position and current destination of an agent, as perceived by others.
struct TargetedAgent {
    Cell pos;
    std::string_view dest;
};

/**
 * Dynamic grid spreading influence from agents that just changed their plan.
 * Each cell holds (target id, weight, remaining steps) entries; weights for
 * the same target are summed on read, entries are discarded (not faded) when
 * their remaining step count hits zero.
 */
class ChoiceField {
public:
    struct Entry {
        std::string target;
        double weight = 0.0;
        int remaining = 0;
    };

    ChoiceField() = default;
    ChoiceField(int width, int height) : cells_(width, height) {}

    // Spread 1/dist (1 on the origin cell itself, distance in cell units)
    // to every cell within rho_c meters; new entries persist tau_c steps.
    void diffuse(const Cell& origin, const std::string& target, double rho_c_m, int tau_c);

    // One per engine step: decrement remaining counters, drop expired entries.
    void decay();

    // Summed weight for a target at one cell.
    double weight_at(const Cell& c, std::string_view target) const;

    std::size_t entry_count() const;
    const std::vector<Entry>& entries_at(const Cell& c) const { return cells_.at(c); }

private:
    Grid<std::vector<Entry>> cells_;
};

// One candidate path with its evaluator values and choice probability.
struct PathEvaluation {
    const RoutePath* path = nullptr;
    double travel_time_s = 0.0;
    double eval_tt = 0.0;
    double eval_q = 0.0;
    double eval_f = 0.0;
    double probability = 0.0;
};

// TravelTime(P) = tt_P + PF_first(pos)/speed; nullopt when the agent is cut
// off from the path's first target (infinite path-field value).
std::optional<double> travel_time(const RoutePath& path, const Cell& pos,
                                  const FieldSet& fields, double speed);

// Eval_tt: min travel time over candidates divided by own travel time, in (0,1].
void eval_tt_inplace(std::vector<PathEvaluation>& evals);

// |{a' != a : Dest(a') = omega && PF_omega(Pos(a')) < PF_omega(Pos(a))}|
int forward_count(const FloorField& pf_omega, std::string_view omega, std::size_t self,
                  std::span<const TargetedAgent> agents);

// forward_count gated by PF_omega(Pos(a)) < gamma (strict).
int perceive_forward(const FloorField& pf_omega, std::string_view omega, std::size_t self,
                     std::span<const TargetedAgent> agents, double gamma_m);

// Eval_q: PerceiveForward(first)/width(first), max-normalized over the
// candidate set; all-zero counts stay all zero.
void eval_q_inplace(std::vector<PathEvaluation>& evals, const Scenario& s, const FieldSet& fields,
                    std::size_t self, std::span<const TargetedAgent> agents, double gamma_m);

// Eval_f: at most one candidate gets 1, sampled proportionally to the
// choice-field weights of the candidates' first targets at the agent's cell.
void eval_f_inplace(std::vector<PathEvaluation>& evals, const ChoiceField& cf, const Cell& pos,
                    SimRng& rng);

// Samples a path with Prob(P) = exp(k_tt*tt - k_q*q + k_f*f) / sum; stores
// the probabilities in evals. evals must be nonempty.
const RoutePath* choose_path(std::vector<PathEvaluation>& evals, const UtilityWeights& w,
                             SimRng& rng);

}  // namespace wayfinder
