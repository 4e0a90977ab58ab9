#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "esni/explore.hpp"
#include "esni/navigate.hpp"
#include "esni/segment.hpp"
#include "esni/world.hpp"

namespace esni {

// Contextual queries.
struct Bring {
  std::string object;
  SectionLabel section;
  friend bool operator==(const Bring&, const Bring&) = default;
};
struct Navigate {
  SectionLabel section;
  friend bool operator==(const Navigate&, const Navigate&) = default;
};
struct Find {
  std::string object;
  friend bool operator==(const Find&, const Find&) = default;
};
struct Swap {
  std::string first;
  std::string second;
  friend bool operator==(const Swap&, const Swap&) = default;
};

using ContextualQuery = std::variant<Bring, Navigate, Find, Swap>;

// Canonical form, e.g. "Bring[banana,Bedroom]".
std::string to_string(const ContextualQuery& q);

struct Vocabulary {
  std::set<std::string> objects;  // names as stored in plans ("gas_cooker" matches "gas cooker")
};

Vocabulary make_vocabulary(const KnowledgeBase& kb, const GridMap& map);

std::vector<std::string> tokenize(std::string_view text);

ContextualQuery parse_command(std::string_view text, const Vocabulary& vocab);

enum class SubTaskKind { Find, NavigateObject, NavigateSection, Pickup, Drop };

struct SubTask {
  SubTaskKind kind;
  std::string object;                    // empty for NavigateSection
  std::optional<SectionLabel> section;   // NavigateSection only
  bool origin = false;                   // NavigateObject: go where the object stood at plan start

  friend bool operator==(const SubTask&, const SubTask&) = default;
};

// "find(banana)", "navigate(Bedroom)", "navigate(cloth origin)", ...
std::string to_string(const SubTask& t);

std::vector<SubTask> compile_query(const ContextualQuery& q);

struct AgentState {
  Position pos;
  std::optional<WorldObject> carried;
  ObjectMemory memory;
};

// Everything a command executes against. Carried objects leave map.objects and
// come back on drop.
struct WorldSession {
  GridMap map;
  KnowledgeBase kb;
  Segmentation seg;
  SectionGraph graph;
  AgentState agent;
};

struct ObjectMove {
  int id = 0;
  std::string name;
  std::optional<Position> to;  // nullopt while carried
};

struct StepEvent {
  Position agent;
  std::optional<std::string> carried;
  std::optional<ObjectMove> moved;
};

using StepObserver = std::function<void(const StepEvent&)>;

struct LogEntry {
  SubTask task;
  Position agent;
  std::optional<std::string> carried;
  Trajectory trajectory;  // empty for actions without motion
};

struct ExecutionLog {
  std::vector<LogEntry> entries;
  std::vector<ObjectMove> object_moves;  // final placement of every object that moved
};

// Runs the subtasks in order. On error the session may be partially updated; callers
// that need atomicity execute on a copy.
ExecutionLog execute(WorldSession& session, const std::vector<SubTask>& plan, const StepObserver& observer = {});

// Explore from `start` with `mas` steps, segment, and build the section graph.
WorldSession make_session(const GridMap& map, const KnowledgeBase& kb, Position start, int mas, double radius,
                          std::uint64_t seed, const SegmentConfig& cfg = {});

}  // namespace esni
