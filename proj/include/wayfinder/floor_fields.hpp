#pragma once

#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wayfinder/scenario.hpp"

namespace wayfinder {

inline constexpr double kInfDist = std::numeric_limits<double>::infinity();

/**
 * Static distance field spread from one target (opening or destination).
 * Values are exact weighted shortest-path distances in meters over the
 * 8-neighborhood (0.4 orthogonal, 0.4*sqrt(2) diagonal); infinity on
 * obstacles and unreachable cells; 0 exactly on target cells.
 */
struct FloorField {
    std::string target_id;
    Grid<double> values;

    double at(const Cell& c) const { return values.in_bounds(c) ? values.at(c) : kInfDist; }
};

// Distance to the nearest obstacle cell (grid boundary counts as obstacle).
struct ObstacleField {
    Grid<double> values;

    double at(const Cell& c) const { return values.in_bounds(c) ? values.at(c) : 0.0; }
};

FloorField compute_path_field(const Scenario& s, const std::string& target_id,
                              const std::vector<Cell>& target);

ObstacleField compute_obstacle_field(const Scenario& s);

// Linear kernel: contribution max(0, 1 - d/1.2) per agent, summed.
// The paper names the proxemic field but gives no formula; this is the
// documented stand-in, with its constants exposed here.
inline constexpr double kProxemicRadiusM = 1.2;
inline double proxemic_kernel(double dist_m) {
    double v = 1.0 - dist_m / kProxemicRadiusM;
    return v > 0.0 ? v : 0.0;
}

/**
 * Dynamic field rebuilt each step from agent positions; produces
 * inter-personal spacing at low densities via the movement utility.
 */
struct ProxemicField {
    Grid<double> values;

    void rebuild(const Scenario& s, std::span<const Cell> agent_positions);

    double at(const Cell& c) const { return values.in_bounds(c) ? values.at(c) : 0.0; }
};

// Path fields keyed by target id (every opening and destination), plus the
// obstacle field. Built once per scenario and shared read-only.
struct FieldSet {
    std::map<std::string, FloorField> path;
    ObstacleField obstacle;

    const FloorField& field(const std::string& target_id) const { return path.at(target_id); }
};

FieldSet compute_all_fields(const Scenario& s);

// 8-neighborhood step offsets, orthogonals first; shared by fields and movement.
std::span<const Cell> neighbor_offsets();

// Diagonal moves are blocked when both flanking orthogonal cells are
// obstacles (no wall-clipping); orthogonal moves only need a walkable target.
bool step_allowed(const Scenario& s, const Cell& from, const Cell& to);

}  // namespace wayfinder
