#include "esni/explore.hpp"

#include <limits>
#include <random>

namespace esni {

Position apply(Position p, Move m) {
  switch (m) {
    case Move::Up: return {p.x, p.y - 1};
    case Move::Down: return {p.x, p.y + 1};
    case Move::Left: return {p.x - 1, p.y};
    case Move::Right: return {p.x + 1, p.y};
  }
  return p;
}

std::vector<Move> legal_moves(const GridMap& map, Position pos) {
  std::vector<Move> moves;
  for (Move m : {Move::Up, Move::Down, Move::Left, Move::Right}) {
    if (map.is_walkable(apply(pos, m))) moves.push_back(m);
  }
  return moves;
}

void ObjectMemory::relocate(int id, Position pos) {
  if (auto it = entries_.find(id); it != entries_.end()) it->second.pos = pos;
}

const RememberedObject* ObjectMemory::find(int id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

const RememberedObject* ObjectMemory::find(std::string_view name) const {
  for (const auto& [id, o] : entries_) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

ExplorationResult explore(const GridMap& map, Position start, int mas, double radius, std::uint64_t seed) {
  if (!map.is_walkable(start))
    throw Error(ErrorCode::StartNotWalkable, "start " + to_string(start) + " is not walkable");
  if (mas < 0) throw Error(ErrorCode::InvalidConfig, "mas must be non-negative");

  std::mt19937_64 rng(seed);
  ExplorationResult r;
  // Walkable cells next to the visited region that have never been stepped on.
  std::unordered_set<Position> frontier;

  Position pos = start;
  auto arrive = [&](Position p) {
    r.trace.push_back(p);
    r.visited.insert(p);
    frontier.erase(p);
    ++r.walking_values[p];
    for (Move m : legal_moves(map, p)) {
      const Position n = apply(p, m);
      if (!r.visited.contains(n)) frontier.insert(n);
    }
    for (const auto& o : perceive(map, p, radius)) r.memory.observe(o);
  };
  arrive(pos);

  std::vector<Position> best;
  while (r.steps_taken < mas && !frontier.empty()) {
    const auto moves = legal_moves(map, pos);
    if (moves.empty()) break;
    int best_value = std::numeric_limits<int>::max();
    best.clear();
    for (Move m : moves) {
      const Position n = apply(pos, m);
      auto it = r.walking_values.find(n);
      const int v = it == r.walking_values.end() ? 0 : it->second;
      if (v < best_value) {
        best_value = v;
        best.clear();
      }
      if (v == best_value) best.push_back(n);
    }
    pos = best.size() == 1 ? best.front()
                           : best[std::uniform_int_distribution<std::size_t>(0, best.size() - 1)(rng)];
    ++r.steps_taken;
    arrive(pos);
  }
  return r;
}

double coverage(const ExplorationResult& result, const GridMap& map) {
  const auto total = map.walkable_count();
  return total == 0 ? 0.0 : static_cast<double>(result.visited.size()) / static_cast<double>(total);
}

Position default_start(const GridMap& map) {
  Position best{-1, -1};
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.is_walkable({x, y})) continue;
      if (best.x < 0 || x + y > best.x + best.y || (x + y == best.x + best.y && y > best.y)) best = {x, y};
    }
  }
  return best;
}

}  // namespace esni
