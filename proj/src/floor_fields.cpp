#include "wayfinder/floor_fields.hpp"

#include <array>
#include <queue>
#include <stdexcept>

namespace wayfinder {

std::span<const Cell> neighbor_offsets() {
    static constexpr std::array<Cell, 8> k = {{
        {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1},
    }};
    return {k.data(), k.size()};
}

bool step_allowed(const Scenario& s, const Cell& from, const Cell& to) {
    if (!s.is_walkable(to)) return false;
    int dx = to.x - from.x, dy = to.y - from.y;
    if (dx != 0 && dy != 0) {
        bool flank_x = s.is_walkable({from.x + dx, from.y});
        bool flank_y = s.is_walkable({from.x, from.y + dy});
        if (!flank_x && !flank_y) return false;
    }
    return true;
}

namespace {

// Multi-source Dijkstra over walkable cells, 0.4 / 0.4*sqrt(2) step costs.
Grid<double> propagate(const Scenario& s, const std::vector<std::pair<Cell, double>>& sources) {
    const int w = s.grid.width(), h = s.grid.height();
    Grid<double> dist(w, h, kInfDist);
    using Item = std::pair<double, int>;  // distance, flat index
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;

    for (const auto& [c, d] : sources) {
        int idx = c.y * w + c.x;
        if (d < dist.raw()[idx]) {
            dist.raw()[idx] = d;
            pq.push({d, idx});
        }
    }
    while (!pq.empty()) {
        auto [d, idx] = pq.top();
        pq.pop();
        if (d > dist.raw()[idx]) continue;
        Cell c{idx % w, idx / w};
        for (const Cell& off : neighbor_offsets()) {
            Cell n{c.x + off.x, c.y + off.y};
            if (!step_allowed(s, c, n)) continue;
            double nd = d + ((off.x != 0 && off.y != 0) ? kDiagCost : kCellSize);
            int nidx = n.y * w + n.x;
            if (nd < dist.raw()[nidx]) {
                dist.raw()[nidx] = nd;
                pq.push({nd, nidx});
            }
        }
    }
    return dist;
}

}  // namespace

FloorField compute_path_field(const Scenario& s, const std::string& target_id,
                              const std::vector<Cell>& target) {
    if (target.empty()) throw std::invalid_argument("compute_path_field: empty target");
    std::vector<std::pair<Cell, double>> sources;
    sources.reserve(target.size());
    for (const Cell& c : target) {
        if (!s.is_walkable(c))
            throw std::invalid_argument("compute_path_field: target cell is not walkable");
        sources.push_back({c, 0.0});
    }
    FloorField f;
    f.target_id = target_id;
    f.values = propagate(s, sources);
    return f;
}

ObstacleField compute_obstacle_field(const Scenario& s) {
    const int w = s.grid.width(), h = s.grid.height();
    std::vector<std::pair<Cell, double>> sources;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Cell c{x, y};
            if (!s.is_walkable(c)) continue;
            double seed = kInfDist;
            for (const Cell& off : neighbor_offsets()) {
                Cell n{c.x + off.x, c.y + off.y};
                bool obstacle = !s.grid.in_bounds(n) || s.grid.at(n) == CellKind::Obstacle;
                if (!obstacle) continue;
                double d = (off.x != 0 && off.y != 0) ? kDiagCost : kCellSize;
                seed = std::min(seed, d);
            }
            if (seed < kInfDist) sources.push_back({c, seed});
        }
    }
    ObstacleField f;
    f.values = propagate(s, sources);
    // obstacle cells themselves sit at distance zero
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (s.grid.at(x, y) == CellKind::Obstacle) f.values.at(x, y) = 0.0;
    return f;
}

void ProxemicField::rebuild(const Scenario& s, std::span<const Cell> agent_positions) {
    const int w = s.grid.width(), h = s.grid.height();
    if (values.width() != w || values.height() != h)
        values = Grid<double>(w, h, 0.0);
    else
        values.fill(0.0);

    const int r = int(kProxemicRadiusM / kCellSize);  // 3 cells
    for (const Cell& p : agent_positions) {
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                Cell c{p.x + dx, p.y + dy};
                if (!values.in_bounds(c)) continue;
                double d = euclid_m(p, c);
                if (d <= kProxemicRadiusM) values.at(c) += proxemic_kernel(d);
            }
        }
    }
}

FieldSet compute_all_fields(const Scenario& s) {
    FieldSet fs;
    for (const Opening& o : s.openings) fs.path.emplace(o.id, compute_path_field(s, o.id, o.cells));
    for (const DestinationArea& d : s.destinations)
        fs.path.emplace(d.id, compute_path_field(s, d.id, d.cells));
    fs.obstacle = compute_obstacle_field(s);
    return fs;
}

}  // namespace wayfinder
