#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "esni/types.hpp"

namespace esni {

// Dense row-major grid of values.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height), cells_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }

  bool in_bounds(Position p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }

  T& operator[](Position p) { return cells_[index(p)]; }
  const T& operator[](Position p) const { return cells_[index(p)]; }

  Position position_of(std::size_t i) const {
    return {static_cast<int>(i % width_), static_cast<int>(i / width_)};
  }

  auto begin() { return cells_.begin(); }
  auto end() { return cells_.end(); }
  auto begin() const { return cells_.begin(); }
  auto end() const { return cells_.end(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(Position p) const { return static_cast<std::size_t>(p.y) * width_ + p.x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

using LabelGrid = Grid<std::optional<SectionLabel>>;

struct WorldObject {
  int id = 0;
  std::string name;
  Position pos;
  bool movable = true;
  std::optional<SectionLabel> section;  // ground-truth room of the object, if annotated

  friend bool operator==(const WorldObject&, const WorldObject&) = default;
};

struct GridMap {
  Grid<std::uint8_t> walkable;
  std::vector<WorldObject> objects;
  std::optional<LabelGrid> ground_truth;  // evaluation only, never shown to the agent

  int width() const { return walkable.width(); }
  int height() const { return walkable.height(); }
  bool in_bounds(Position p) const { return walkable.in_bounds(p); }
  bool is_walkable(Position p) const { return in_bounds(p) && walkable[p] != 0; }
  std::size_t walkable_count() const;

  const WorldObject* find_object(int id) const;
  const WorldObject* find_object(std::string_view name) const;

  friend bool operator==(const GridMap&, const GridMap&) = default;
};

// Plan file: grid rows ('.' walkable, '#' blocked), a `---` line, one object per line
// (`id name x y movable [section]`), then an optional `sections:` block of label rows.
GridMap parse_plan(std::string_view text);
std::string serialize_plan(const GridMap& map);

struct KnowledgeEntry {
  std::vector<std::pair<SectionLabel, double>> weights;
  std::optional<SectionLabel> key;  // set for key objects (toilet, bed, gas cooker)

  friend bool operator==(const KnowledgeEntry&, const KnowledgeEntry&) = default;
};

struct KnowledgeBase {
  std::map<std::string, KnowledgeEntry, std::less<>> entries;

  const KnowledgeEntry* find(std::string_view name) const {
    auto it = entries.find(name);
    return it == entries.end() ? nullptr : &it->second;
  }
  bool empty() const { return entries.empty(); }

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

// Knowledge file: `name key_section|- section:weight[,section:weight...]` per line.
KnowledgeBase parse_knowledge(std::string_view text);
std::string serialize_knowledge(const KnowledgeBase& kb);

// Places one movable instance of every knowledge entry on a free walkable cell of a
// section drawn from the entry's weight distribution. Requires ground-truth labels.
GridMap sample_objects(const GridMap& map, const KnowledgeBase& kb, std::uint64_t seed);

// Cells whose interior the segment between the centres of a and b passes through,
// endpoints excluded, ordered from a to b. Exact corner touches are not crossings.
std::vector<Position> traced_cells(Position a, Position b);

bool line_blocked(const GridMap& map, Position a, Position b);

inline constexpr double kDefaultPerceptionRadius = 3.0;

// Objects within Euclidean `radius` of pos with clear line of sight, sorted by (distance, id).
std::vector<WorldObject> perceive(const GridMap& map, Position pos, double radius);

std::string read_text_file(const std::string& path);

}  // namespace esni
