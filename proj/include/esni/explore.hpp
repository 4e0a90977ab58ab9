#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "esni/world.hpp"

namespace esni {

enum class Move : std::uint8_t { Up, Down, Left, Right };

Position apply(Position p, Move m);

// Moves from pos onto in-bounds walkable cells, in Up, Down, Left, Right order.
std::vector<Move> legal_moves(const GridMap& map, Position pos);

struct RememberedObject {
  int id = 0;
  std::string name;
  Position pos;

  friend bool operator==(const RememberedObject&, const RememberedObject&) = default;
};

// What the agent has seen, keyed by object id.
class ObjectMemory {
 public:
  void observe(const WorldObject& o) { entries_[o.id] = {o.id, o.name, o.pos}; }
  void forget(int id) { entries_.erase(id); }
  void relocate(int id, Position pos);

  const RememberedObject* find(int id) const;
  const RememberedObject* find(std::string_view name) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const ObjectMemory&, const ObjectMemory&) = default;

 private:
  std::map<int, RememberedObject> entries_;
};

using WalkingValues = std::unordered_map<Position, int>;

struct ExplorationResult {
  std::unordered_set<Position> visited;
  ObjectMemory memory;
  WalkingValues walking_values;
  int steps_taken = 0;
  std::vector<Position> trace;
};

// Least-visited greedy walk under a step budget `mas`. Ties between equally
// visited neighbours are broken uniformly at random from `seed`.
ExplorationResult explore(const GridMap& map, Position start, int mas, double radius, std::uint64_t seed);

double coverage(const ExplorationResult& result, const GridMap& map);

// The bundled plans start the agent in the bottom-right corner: the walkable cell
// maximising x + y, ties going to the larger y.
Position default_start(const GridMap& map);

}  // namespace esni
