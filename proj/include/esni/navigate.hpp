#pragma once

#include <optional>
#include <span>
#include <vector>

#include "esni/segment.hpp"
#include "esni/world.hpp"

namespace esni {

using SectionPath = std::vector<SectionLabel>;

// Fewest hops; among equally short paths the lexicographically smallest by label order.
SectionPath section_path(const SectionGraph& graph, SectionLabel from, SectionLabel to);

// Boundary cell minimising manhattan(cur, b) + manhattan(b, next_goal); ties by (y, x).
Position select_boundary(std::span<const BoundaryPoint> candidates, Position cur, Position next_goal);

// Straight L-shaped path (x leg first, then the y-first variant); when both hit a
// blocked cell, an A* search with the Manhattan heuristic. Includes both endpoints.
std::vector<Position> local_path(const GridMap& map, Position from, Position to);

// Plain breadth-first shortest path over walkable cells; empty when unreachable.
std::vector<Position> bfs_path(const GridMap& map, Position from, Position to);

enum class WaypointKind { BoundaryCrossing, ObjectPickup, Destination };

std::string_view waypoint_kind_name(WaypointKind k);

struct Waypoint {
  Position pos;
  WaypointKind kind = WaypointKind::Destination;
  std::optional<SectionPair> crossing;  // set for boundary crossings

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct NavGoal {
  Position pos;
  WaypointKind kind = WaypointKind::Destination;
};

struct Trajectory {
  std::vector<Waypoint> waypoints;
  std::vector<Position> steps;
  // Section sequence planned for each goal, concatenated (junction duplicates kept out).
  std::vector<SectionPath> section_paths;

  std::size_t length() const { return steps.empty() ? 0 : steps.size() - 1; }
};

Trajectory plan_trajectory(const GridMap& map, const LabelGrid& labels, const SectionGraph& graph, Position cur,
                           std::span<const NavGoal> goals);
Trajectory plan_trajectory(const GridMap& map, const LabelGrid& labels, const SectionGraph& graph, Position cur,
                           std::span<const Position> goals);

}  // namespace esni
