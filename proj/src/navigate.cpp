#include "esni/navigate.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <tuple>

#include "esni/explore.hpp"

namespace esni {

SectionPath section_path(const SectionGraph& graph, SectionLabel from, SectionLabel to) {
  if (!graph.nodes.contains(from) || !graph.nodes.contains(to))
    throw Error(ErrorCode::Unreachable, std::string(section_name(from)) + " or " + std::string(section_name(to)) +
                                            " is not a section of the graph");

  // Hop distances to the destination, then a greedy walk that always takes the
  // smallest label one hop closer.
  std::array<int, kSectionCount> dist;
  dist.fill(-1);
  dist[index_of(to)] = 0;
  std::deque<SectionLabel> queue{to};
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    for (auto n : graph.neighbors(s)) {
      if (dist[index_of(n)] < 0) {
        dist[index_of(n)] = dist[index_of(s)] + 1;
        queue.push_back(n);
      }
    }
  }
  if (dist[index_of(from)] < 0)
    throw Error(ErrorCode::Unreachable,
                "no section path from " + std::string(section_name(from)) + " to " + std::string(section_name(to)));

  SectionPath path{from};
  while (path.back() != to) {
    const int here = dist[index_of(path.back())];
    for (auto n : graph.neighbors(path.back())) {
      if (dist[index_of(n)] == here - 1) {
        path.push_back(n);
        break;
      }
    }
  }
  return path;
}

Position select_boundary(std::span<const BoundaryPoint> candidates, Position cur, Position next_goal) {
  if (candidates.empty()) throw Error(ErrorCode::Unreachable, "no boundary points to cross");
  Position best = candidates.front().pos;
  int best_cost = std::numeric_limits<int>::max();
  for (const auto& bp : candidates) {
    const int cost = manhattan(cur, bp.pos) + manhattan(bp.pos, next_goal);
    if (cost < best_cost || (cost == best_cost && bp.pos < best)) {
      best_cost = cost;
      best = bp.pos;
    }
  }
  return best;
}

namespace {

std::optional<std::vector<Position>> straight_legs(const GridMap& map, Position from, Position to, bool x_first) {
  std::vector<Position> path{from};
  Position p = from;
  auto walk_x = [&] {
    while (p.x != to.x) {
      p.x += to.x > p.x ? 1 : -1;
      path.push_back(p);
    }
  };
  auto walk_y = [&] {
    while (p.y != to.y) {
      p.y += to.y > p.y ? 1 : -1;
      path.push_back(p);
    }
  };
  if (x_first) {
    walk_x();
    walk_y();
  } else {
    walk_y();
    walk_x();
  }
  if (std::all_of(path.begin(), path.end(), [&](Position c) { return map.is_walkable(c); })) return path;
  return std::nullopt;
}

std::vector<Position> unwind(const Grid<int>& parent, Position from, Position to) {
  std::vector<Position> path{to};
  while (path.back() != from) path.push_back(parent.position_of(static_cast<std::size_t>(parent[path.back()])));
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<Position> astar(const GridMap& map, Position from, Position to) {
  const int w = map.width();
  Grid<int> g(w, map.height(), std::numeric_limits<int>::max());
  Grid<int> parent(w, map.height(), -1);
  // (f, h, y, x): ties prefer cells closer to the goal, then row-major order.
  using Node = std::tuple<int, int, int, int>;
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  g[from] = 0;
  open.emplace(manhattan(from, to), manhattan(from, to), from.y, from.x);
  while (!open.empty()) {
    auto [f, h, y, x] = open.top();
    open.pop();
    const Position p{x, y};
    if (f - h > g[p]) continue;  // stale entry
    if (p == to) return unwind(parent, from, to);
    for (Move m : legal_moves(map, p)) {
      const Position n = apply(p, m);
      if (g[p] + 1 < g[n]) {
        g[n] = g[p] + 1;
        parent[n] = p.y * w + p.x;
        const int hn = manhattan(n, to);
        open.emplace(g[n] + hn, hn, n.y, n.x);
      }
    }
  }
  return {};
}

}  // namespace

std::vector<Position> local_path(const GridMap& map, Position from, Position to) {
  if (!map.is_walkable(from) || !map.is_walkable(to))
    throw Error(ErrorCode::Unreachable, "path endpoints must be walkable");
  if (auto p = straight_legs(map, from, to, true)) return *p;
  if (auto p = straight_legs(map, from, to, false)) return *p;
  auto path = astar(map, from, to);
  if (path.empty()) throw Error(ErrorCode::Unreachable, "no path from " + to_string(from) + " to " + to_string(to));
  return path;
}

std::vector<Position> bfs_path(const GridMap& map, Position from, Position to) {
  if (!map.is_walkable(from) || !map.is_walkable(to)) return {};
  Grid<int> parent(map.width(), map.height(), -1);
  Grid<std::uint8_t> seen(map.width(), map.height(), 0);
  std::deque<Position> queue{from};
  seen[from] = 1;
  while (!queue.empty()) {
    const Position p = queue.front();
    queue.pop_front();
    if (p == to) return unwind(parent, from, to);
    for (Move m : legal_moves(map, p)) {
      const Position n = apply(p, m);
      if (!seen[n]) {
        seen[n] = 1;
        parent[n] = p.y * map.width() + p.x;
        queue.push_back(n);
      }
    }
  }
  return {};
}

std::string_view waypoint_kind_name(WaypointKind k) {
  switch (k) {
    case WaypointKind::BoundaryCrossing: return "boundary";
    case WaypointKind::ObjectPickup: return "pickup";
    case WaypointKind::Destination: return "destination";
  }
  return "?";
}

Trajectory plan_trajectory(const GridMap& map, const LabelGrid& labels, const SectionGraph& graph, Position cur,
                           std::span<const NavGoal> goals) {
  auto label_at = [&](Position p) {
    if (!labels.in_bounds(p) || !labels[p])
      throw Error(ErrorCode::UnlabeledPosition, "position " + to_string(p) + " has no section label");
    return *labels[p];
  };
  label_at(cur);

  Trajectory t;
  t.steps.push_back(cur);
  auto extend = [&](const std::vector<Position>& leg) { t.steps.insert(t.steps.end(), leg.begin() + 1, leg.end()); };

  for (const auto& goal : goals) {
    const auto path = section_path(graph, label_at(cur), label_at(goal.pos));
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const auto& candidates = graph.boundaries(path[i], path[i + 1]);
      const Position b = select_boundary(candidates, cur, goal.pos);
      extend(local_path(map, cur, b));
      t.waypoints.push_back({b, WaypointKind::BoundaryCrossing, make_pair_sorted(path[i], path[i + 1])});
      cur = b;
    }
    extend(local_path(map, cur, goal.pos));
    t.waypoints.push_back({goal.pos, goal.kind, std::nullopt});
    t.section_paths.push_back(path);
    cur = goal.pos;
  }
  return t;
}

Trajectory plan_trajectory(const GridMap& map, const LabelGrid& labels, const SectionGraph& graph, Position cur,
                           std::span<const Position> goals) {
  std::vector<NavGoal> nav;
  nav.reserve(goals.size());
  for (Position p : goals) nav.push_back({p, WaypointKind::Destination});
  return plan_trajectory(map, labels, graph, cur, nav);
}

}  // namespace esni
