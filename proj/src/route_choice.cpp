#include "wayfinder/route_choice.hpp"

#include <algorithm>
#include <cmath>

namespace wayfinder {

void ChoiceField::diffuse(const Cell& origin, const std::string& target, double rho_c_m, int tau_c) {
    if (tau_c <= 0) return;
    // radius compared in cell units with a tolerance so that e.g. 1.2 m
    // really covers cells exactly three 0.4 m steps away
    const double radius_cells = rho_c_m / kCellSize + 1e-9;
    const int r = int(radius_cells);
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            Cell c{origin.x + dx, origin.y + dy};
            if (!cells_.in_bounds(c)) continue;
            if (euclid_cells(origin, c) > radius_cells) continue;
            double w = (dx == 0 && dy == 0) ? 1.0 : 1.0 / euclid_cells(origin, c);
            std::vector<Entry>& bucket = cells_.at(c);
            // same-step diffusions toward the same target share one entry
            auto it = std::find_if(bucket.begin(), bucket.end(), [&](const Entry& e) {
                return e.remaining == tau_c && e.target == target;
            });
            if (it != bucket.end())
                it->weight += w;
            else
                bucket.push_back({target, w, tau_c});
        }
    }
}

void ChoiceField::decay() {
    for (std::vector<Entry>& bucket : cells_.raw()) {
        if (bucket.empty()) continue;
        for (Entry& e : bucket) --e.remaining;
        std::erase_if(bucket, [](const Entry& e) { return e.remaining <= 0; });
    }
}

double ChoiceField::weight_at(const Cell& c, std::string_view target) const {
    if (!cells_.in_bounds(c)) return 0.0;
    double w = 0.0;
    for (const Entry& e : cells_.at(c))
        if (e.target == target) w += e.weight;
    return w;
}

std::size_t ChoiceField::entry_count() const {
    std::size_t n = 0;
    for (const std::vector<Entry>& bucket : cells_.raw()) n += bucket.size();
    return n;
}

std::optional<double> travel_time(const RoutePath& path, const Cell& pos, const FieldSet& fields,
                                  double speed) {
    double pf = fields.field(path.first()).at(pos);
    if (!std::isfinite(pf)) return std::nullopt;
    return path.free_flow_time + pf / speed;
}

void eval_tt_inplace(std::vector<PathEvaluation>& evals) {
    double best = kInfDist;
    for (const PathEvaluation& e : evals) best = std::min(best, e.travel_time_s);
    for (PathEvaluation& e : evals) e.eval_tt = best / e.travel_time_s;
}

int forward_count(const FloorField& pf_omega, std::string_view omega, std::size_t self,
                  std::span<const TargetedAgent> agents) {
    double own = pf_omega.at(agents[self].pos);
    int n = 0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (i == self) continue;
        if (agents[i].dest == omega && pf_omega.at(agents[i].pos) < own) ++n;
    }
    return n;
}

int perceive_forward(const FloorField& pf_omega, std::string_view omega, std::size_t self,
                     std::span<const TargetedAgent> agents, double gamma_m) {
    if (!(pf_omega.at(agents[self].pos) < gamma_m)) return 0;
    return forward_count(pf_omega, omega, self, agents);
}

void eval_q_inplace(std::vector<PathEvaluation>& evals, const Scenario& s, const FieldSet& fields,
                    std::size_t self, std::span<const TargetedAgent> agents, double gamma_m) {
    double max_raw = 0.0;
    for (PathEvaluation& e : evals) {
        const std::string& omega = e.path->first();
        int count = perceive_forward(fields.field(omega), omega, self, agents, gamma_m);
        e.eval_q = count / s.target_width(omega);
        max_raw = std::max(max_raw, e.eval_q);
    }
    if (max_raw > 0.0)
        for (PathEvaluation& e : evals) e.eval_q /= max_raw;
}

void eval_f_inplace(std::vector<PathEvaluation>& evals, const ChoiceField& cf, const Cell& pos,
                    SimRng& rng) {
    std::vector<double> weights(evals.size());
    double total = 0.0;
    for (std::size_t i = 0; i < evals.size(); ++i) {
        evals[i].eval_f = 0.0;
        weights[i] = cf.weight_at(pos, evals[i].path->first());
        total += weights[i];
    }
    if (total <= 0.0) return;
    evals[rng.sample_weighted(weights)].eval_f = 1.0;
}

const RoutePath* choose_path(std::vector<PathEvaluation>& evals, const UtilityWeights& w,
                             SimRng& rng) {
    double max_u = -kInfDist;
    for (const PathEvaluation& e : evals)
        max_u = std::max(max_u, w.kappa_tt * e.eval_tt - w.kappa_q * e.eval_q + w.kappa_f * e.eval_f);

    std::vector<double> expo(evals.size());
    double total = 0.0;
    for (std::size_t i = 0; i < evals.size(); ++i) {
        const PathEvaluation& e = evals[i];
        double u = w.kappa_tt * e.eval_tt - w.kappa_q * e.eval_q + w.kappa_f * e.eval_f;
        expo[i] = std::exp(u - max_u);  // shift keeps exp() in range for any weights
        total += expo[i];
    }
    for (std::size_t i = 0; i < evals.size(); ++i) evals[i].probability = expo[i] / total;
    return evals[rng.sample_weighted(expo)].path;
}

}  // namespace wayfinder
