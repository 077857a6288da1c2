#include "wayfinder/cognitive_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wayfinder {

const CognitiveMap::Edge* CognitiveMap::edge_for(const std::string& opening_id) const {
    for (const Edge& e : edges)
        if (e.opening == opening_id) return &e;
    return nullptr;
}

CognitiveMap build_cognitive_map(const Scenario& s) {
    CognitiveMap cm;
    for (const Region& r : s.regions) cm.nodes.push_back(r.id);
    for (const Opening& o : s.openings) {
        // scenario validation guarantees exactly two adjacent regions
        std::vector<std::string> adj;
        for (const Region& r : s.regions)
            if (std::find(r.openings.begin(), r.openings.end(), o.id) != r.openings.end())
                adj.push_back(r.id);
        cm.edges.push_back({o.id, adj[0], adj[1]});
    }
    std::sort(cm.edges.begin(), cm.edges.end(),
              [](const auto& a, const auto& b) { return a.opening < b.opening; });
    return cm;
}

namespace {

struct RegionGraph {
    // per region index: (opening id, neighbor region index), sorted by opening id
    std::vector<std::vector<std::pair<std::string, int>>> adj;
};

RegionGraph region_graph(const Scenario& s, const CognitiveMap& cm) {
    RegionGraph g;
    g.adj.resize(s.regions.size());
    auto region_pos = [&](const std::string& id) {
        for (std::size_t i = 0; i < s.regions.size(); ++i)
            if (s.regions[i].id == id) return int(i);
        return -1;
    };
    for (const CognitiveMap::Edge& e : cm.edges) {
        int a = region_pos(e.region_a), b = region_pos(e.region_b);
        g.adj[a].push_back({e.opening, b});
        g.adj[b].push_back({e.opening, a});
    }
    for (auto& v : g.adj) std::sort(v.begin(), v.end());
    return g;
}

// Free-flow time: centroid-to-centroid floor-field distances between
// consecutive targets, divided by the desired speed. The leg from the agent
// position to the first target is not included here; the travel-time
// evaluator adds it.
double free_flow_time(const Scenario& s, const FieldSet& fields,
                      const std::vector<std::string>& steps) {
    double meters = 0.0;
    for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
        const std::vector<Cell>* from = s.target_cells(steps[i]);
        const FloorField& pf = fields.field(steps[i + 1]);
        meters += pf.at(centroid_cell(*from));
    }
    return meters / s.config.desired_speed;
}

}  // namespace

PathsTree build_paths_tree(const Scenario& s, const CognitiveMap& cm,
                           const std::string& destination_id, const FieldSet& fields) {
    const std::vector<Cell>* dest_cells = s.target_cells(destination_id);
    if (dest_cells == nullptr)
        throw std::invalid_argument("build_paths_tree: unknown destination '" + destination_id + "'");
    int dest_region = s.region_index.at(dest_cells->front());

    PathsTree pt;
    pt.destination_id = destination_id;
    RegionGraph g = region_graph(s, cm);

    // All simple region-paths (no region revisited) from every region to the
    // destination's region; paths through unreachable segments are dropped.
    std::map<std::pair<std::string, std::string>, std::vector<RoutePath>> collected;
    std::vector<char> visited(s.regions.size(), 0);
    std::vector<std::string> steps;

    auto record = [&](int origin) {
        RoutePath p;
        p.steps = steps;
        p.steps.push_back(destination_id);
        p.free_flow_time = free_flow_time(s, fields, p.steps);
        if (!std::isfinite(p.free_flow_time)) return;
        collected[{s.regions[origin].id, p.steps.front()}].push_back(std::move(p));
    };

    auto dfs = [&](auto&& self, int origin, int at) -> void {
        if (at == dest_region) {
            record(origin);
            return;
        }
        for (const auto& [opening, next] : g.adj[at]) {
            if (visited[next]) continue;
            visited[next] = 1;
            steps.push_back(opening);
            self(self, origin, next);
            steps.pop_back();
            visited[next] = 0;
        }
    };

    for (std::size_t r = 0; r < s.regions.size(); ++r) {
        std::fill(visited.begin(), visited.end(), 0);
        visited[r] = 1;
        steps.clear();
        dfs(dfs, int(r), int(r));
    }

    for (auto& [key, group] : collected) {
        std::stable_sort(group.begin(), group.end(), [](const RoutePath& a, const RoutePath& b) {
            return a.free_flow_time < b.free_flow_time;
        });
        double best = group.front().free_flow_time;
        pt.entries[key] = group.front();
        for (std::size_t i = 1; i < group.size(); ++i)
            if (group[i].free_flow_time <= kDominanceFactor * best)
                pt.alternates[key].push_back(group[i]);
    }
    return pt;
}

std::vector<const RoutePath*> paths(const PathsTree& pt, const std::string& region_id) {
    std::vector<const RoutePath*> out;
    for (const auto& [key, path] : pt.entries)
        if (key.first == region_id) out.push_back(&path);
    return out;
}

}  // namespace wayfinder
