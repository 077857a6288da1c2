#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wayfinder/floor_fields.hpp"
#include "wayfinder/scenario.hpp"

namespace wayfinder {

// Labelled multigraph of the walkable space: regions as nodes, openings as edges.
struct CognitiveMap {
    struct Edge {
        std::string opening;
        std::string region_a;
        std::string region_b;
    };

    std::vector<std::string> nodes;  // region ids
    std::vector<Edge> edges;         // sorted by opening id

    const Edge* edge_for(const std::string& opening_id) const;
};

CognitiveMap build_cognitive_map(const Scenario& s);

/**
 * One plausible route: the ordered targets to cross, ending with the final
 * destination id. A path queried from the destination's own region is just
 * {destination} with zero free-flow time.
 */
struct RoutePath {
    std::vector<std::string> steps;   // opening ids, destination id last
    double free_flow_time = 0.0;      // seconds, from the first step's cells to the destination

    const std::string& first() const { return steps.front(); }
};

/**
 * Per-destination route knowledge: for each (region, first opening) the best
 * plausible path with its free-flow travel time, plus non-dominated
 * alternates. Built once, then shared read-only by all agents.
 */
struct PathsTree {
    std::string destination_id;
    std::map<std::pair<std::string, std::string>, RoutePath> entries;
    std::map<std::pair<std::string, std::string>, std::vector<RoutePath>> alternates;
};

// Paths whose free-flow time exceeds the best alternative for the same
// (region, first opening) by more than this factor are pruned as implausible.
inline constexpr double kDominanceFactor = 3.0;

PathsTree build_paths_tree(const Scenario& s, const CognitiveMap& cm,
                           const std::string& destination_id, const FieldSet& fields);

// Paths(R, End): all stored couples for the region; empty if unreachable.
std::vector<const RoutePath*> paths(const PathsTree& pt, const std::string& region_id);

}  // namespace wayfinder
