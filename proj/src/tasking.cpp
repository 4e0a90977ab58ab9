#include "esni/tasking.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <limits>

namespace esni {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

enum class VerbClass { BringOrNavigate, Find, Swap, Navigate };

const std::map<std::string, VerbClass, std::less<>>& verb_lexicon() {
  static const std::map<std::string, VerbClass, std::less<>> kVerbs = {
      {"bring", VerbClass::BringOrNavigate}, {"carry", VerbClass::BringOrNavigate},
      {"want", VerbClass::BringOrNavigate},  {"get", VerbClass::BringOrNavigate},
      {"serve", VerbClass::BringOrNavigate}, {"where", VerbClass::Find},
      {"find", VerbClass::Find},             {"swap", VerbClass::Swap},
      {"exchange", VerbClass::Swap},         {"come", VerbClass::Navigate},
      {"go", VerbClass::Navigate},           {"navigate", VerbClass::Navigate},
  };
  return kVerbs;
}

const std::vector<std::pair<std::vector<std::string>, SectionLabel>>& section_lexicon() {
  static const std::vector<std::pair<std::vector<std::string>, SectionLabel>> kSections = {
      {{"kitchen"}, SectionLabel::Kitchen},      {{"living", "room"}, SectionLabel::LivingRoom},
      {{"livingroom"}, SectionLabel::LivingRoom}, {{"bedroom"}, SectionLabel::Bedroom},
      {{"studio"}, SectionLabel::Studio},        {{"bathroom"}, SectionLabel::Bathroom},
      {{"balcony"}, SectionLabel::Balcony},
  };
  return kSections;
}

bool matches_at(const std::vector<std::string>& tokens, std::size_t i, const std::vector<std::string>& phrase) {
  if (i + phrase.size() > tokens.size()) return false;
  return std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i));
}

enum class QueryClass { Bring, Navigate, Find, Swap };

}  // namespace

std::string to_string(const ContextualQuery& q) {
  return std::visit(overloaded{
                        [](const Bring& b) { return "Bring[" + b.object + "," + std::string(section_name(b.section)) + "]"; },
                        [](const Navigate& n) { return "Navigate[" + std::string(section_name(n.section)) + "]"; },
                        [](const Find& f) { return "Find[" + f.object + "]"; },
                        [](const Swap& s) { return "Swap[" + s.first + "," + s.second + "]"; },
                    },
                    q);
}

Vocabulary make_vocabulary(const KnowledgeBase& kb, const GridMap& map) {
  Vocabulary v;
  for (const auto& [name, entry] : kb.entries) v.objects.insert(name);
  for (const auto& o : map.objects) v.objects.insert(o.name);
  return v;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

ContextualQuery parse_command(std::string_view text, const Vocabulary& vocab) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw Error(ErrorCode::NoVerbMatch, "empty command");

  std::vector<std::pair<std::vector<std::string>, std::string>> object_phrases;
  for (const auto& name : vocab.objects) {
    auto parts = tokenize(name);
    if (!parts.empty()) object_phrases.emplace_back(std::move(parts), name);
  }
  // Longest phrase first so "gas cooker" wins over a hypothetical "gas".
  std::stable_sort(object_phrases.begin(), object_phrases.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

  std::vector<QueryClass> candidates;
  auto add_candidate = [&](QueryClass c) {
    if (std::find(candidates.begin(), candidates.end(), c) == candidates.end()) candidates.push_back(c);
  };
  std::vector<std::string> objects;
  std::vector<SectionLabel> sections;

  for (std::size_t i = 0; i < tokens.size();) {
    std::size_t consumed = 0;
    for (const auto& [phrase, label] : section_lexicon()) {
      if (matches_at(tokens, i, phrase)) {
        if (std::find(sections.begin(), sections.end(), label) == sections.end()) sections.push_back(label);
        consumed = phrase.size();
        break;
      }
    }
    if (!consumed) {
      for (const auto& [phrase, name] : object_phrases) {
        bool hit = matches_at(tokens, i, phrase);
        // Simple plural: "bananas" names a banana.
        if (!hit && phrase.size() == 1 && tokens[i].size() > 1 && tokens[i].back() == 's')
          hit = tokens[i].substr(0, tokens[i].size() - 1) == phrase.front();
        if (hit) {
          if (std::find(objects.begin(), objects.end(), name) == objects.end()) objects.push_back(name);
          consumed = phrase.size();
          break;
        }
      }
    }
    if (!consumed) {
      if (auto it = verb_lexicon().find(tokens[i]); it != verb_lexicon().end()) {
        switch (it->second) {
          case VerbClass::BringOrNavigate:
            add_candidate(QueryClass::Bring);
            add_candidate(QueryClass::Navigate);
            break;
          case VerbClass::Find: add_candidate(QueryClass::Find); break;
          case VerbClass::Swap: add_candidate(QueryClass::Swap); break;
          case VerbClass::Navigate: add_candidate(QueryClass::Navigate); break;
        }
      }
      consumed = 1;
    }
    i += consumed;
  }

  if (candidates.empty()) throw Error(ErrorCode::NoVerbMatch, "no known verb in \"" + std::string(text) + "\"");

  auto complete = [&](QueryClass c) {
    switch (c) {
      case QueryClass::Bring: return !objects.empty() && !sections.empty();
      case QueryClass::Navigate: return !sections.empty() && objects.empty();
      case QueryClass::Find: return !objects.empty();
      case QueryClass::Swap: return objects.size() == 2;
    }
    return false;
  };

  std::vector<QueryClass> matched;
  std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(matched), complete);
  if (matched.size() > 1) throw Error(ErrorCode::AmbiguousQuery, "command matches several query classes");
  if (matched.empty()) {
    switch (candidates.front()) {
      case QueryClass::Bring:
        if (objects.empty()) throw Error(ErrorCode::MissingObject, "bring: no known object named");
        throw Error(ErrorCode::MissingSection, "bring: no destination section named");
      case QueryClass::Navigate: throw Error(ErrorCode::MissingSection, "navigate: no section named");
      case QueryClass::Find: throw Error(ErrorCode::MissingObject, "find: no known object named");
      case QueryClass::Swap: throw Error(ErrorCode::MissingObject, "swap: needs exactly two known objects");
    }
  }

  switch (matched.front()) {
    case QueryClass::Bring: return Bring{objects.front(), sections.front()};
    case QueryClass::Navigate: return Navigate{sections.front()};
    case QueryClass::Find: return Find{objects.front()};
    case QueryClass::Swap: return Swap{objects[0], objects[1]};
  }
  throw Error(ErrorCode::NoVerbMatch, "unreachable");
}

std::string to_string(const SubTask& t) {
  switch (t.kind) {
    case SubTaskKind::Find: return "find(" + t.object + ")";
    case SubTaskKind::NavigateObject: return "navigate(" + t.object + (t.origin ? " origin)" : ")");
    case SubTaskKind::NavigateSection: return "navigate(" + std::string(section_name(*t.section)) + ")";
    case SubTaskKind::Pickup: return "pickup(" + t.object + ")";
    case SubTaskKind::Drop: return "drop(" + t.object + ")";
  }
  return "?";
}

std::vector<SubTask> compile_query(const ContextualQuery& q) {
  auto find = [](const std::string& o) { return SubTask{SubTaskKind::Find, o, std::nullopt, false}; };
  auto go = [](const std::string& o) { return SubTask{SubTaskKind::NavigateObject, o, std::nullopt, false}; };
  auto go_origin = [](const std::string& o) { return SubTask{SubTaskKind::NavigateObject, o, std::nullopt, true}; };
  auto go_section = [](SectionLabel s) { return SubTask{SubTaskKind::NavigateSection, "", s, false}; };
  auto pickup = [](const std::string& o) { return SubTask{SubTaskKind::Pickup, o, std::nullopt, false}; };
  auto drop = [](const std::string& o) { return SubTask{SubTaskKind::Drop, o, std::nullopt, false}; };

  return std::visit(
      overloaded{
          [&](const Bring& b) -> std::vector<SubTask> {
            return {find(b.object), go(b.object), pickup(b.object), go_section(b.section), drop(b.object)};
          },
          [&](const Navigate& n) -> std::vector<SubTask> { return {go_section(n.section)}; },
          [&](const Find& f) -> std::vector<SubTask> { return {go(f.object)}; },
          [&](const Swap& s) -> std::vector<SubTask> {
            return {find(s.first),   go(s.first), pickup(s.first),
                    find(s.second),  go(s.second),                               drop(s.first),
                    pickup(s.second), go_origin(s.first),                        drop(s.second)};
          },
      },
      q);
}

namespace {

class Executor {
 public:
  Executor(WorldSession& s, const StepObserver& observer) : s_(s), observer_(observer) {}

  ExecutionLog run(const std::vector<SubTask>& plan) {
    // Origins are fixed before anything moves.
    for (const auto& t : plan) {
      if (!t.object.empty() && !origins_.contains(t.object)) {
        if (auto p = locate(t.object)) origins_[t.object] = *p;
      }
    }
    for (const auto& t : plan) step(t);
    for (const auto& [id, mv] : moves_) log_.object_moves.push_back(mv);
    return std::move(log_);
  }

 private:
  std::optional<Position> locate(const std::string& name) const {
    if (s_.agent.carried && s_.agent.carried->name == name) return s_.agent.pos;
    if (const auto* m = s_.agent.memory.find(name)) return m->pos;
    return std::nullopt;
  }

  Position require_location(const std::string& name) const {
    auto p = locate(name);
    if (!p) throw Error(ErrorCode::ObjectNotInMemory, "'" + name + "' has not been seen");
    return *p;
  }

  std::optional<std::string> carried_name() const {
    return s_.agent.carried ? std::optional<std::string>(s_.agent.carried->name) : std::nullopt;
  }

  void emit(Position agent, std::optional<ObjectMove> moved = std::nullopt) {
    if (observer_) observer_({agent, carried_name(), std::move(moved)});
  }

  void record(const SubTask& t, Trajectory traj = {}) {
    log_.entries.push_back({t, s_.agent.pos, carried_name(), std::move(traj)});
  }

  Trajectory plan_to(Position target, WaypointKind kind) const {
    const NavGoal goal{target, kind};
    return plan_trajectory(s_.map, s_.seg.labels, s_.graph, s_.agent.pos, std::span<const NavGoal>(&goal, 1));
  }

  void walk(const Trajectory& traj) {
    for (std::size_t i = 1; i < traj.steps.size(); ++i) {
      s_.agent.pos = traj.steps[i];
      emit(s_.agent.pos);
    }
  }

  // Cheapest labeled walkable cell to stand on for reaching `target`.
  Trajectory plan_to_object_cell(Position target) const {
    if (s_.map.is_walkable(target) && s_.seg.labels[target]) return plan_to(target, WaypointKind::ObjectPickup);
    std::optional<Trajectory> best;
    for (Move m : {Move::Up, Move::Down, Move::Left, Move::Right}) {
      const Position n = apply(target, m);
      if (!s_.map.is_walkable(n) || !s_.seg.labels[n]) continue;
      try {
        auto t = plan_to(n, WaypointKind::ObjectPickup);
        if (!best || t.length() < best->length()) best = std::move(t);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Unreachable) throw;
      }
    }
    if (!best) throw Error(ErrorCode::Unreachable, "no labeled cell next to " + to_string(target));
    return *best;
  }

  Trajectory plan_to_section(SectionLabel section) const {
    if (!s_.graph.nodes.contains(section))
      throw Error(ErrorCode::SectionUnknown, std::string(section_name(section)) + " was not segmented");
    if (s_.seg.labels[s_.agent.pos] == section) return plan_to(s_.agent.pos, WaypointKind::Destination);

    // A trajectory is never shorter than the grid BFS distance, so candidates are
    // scanned in BFS order and the scan stops once no closer trajectory is possible.
    const auto& map = s_.map;
    Grid<int> dist(map.width(), map.height(), -1);
    std::deque<Position> queue{s_.agent.pos};
    dist[s_.agent.pos] = 0;
    std::vector<std::pair<int, Position>> candidates;
    while (!queue.empty()) {
      const Position p = queue.front();
      queue.pop_front();
      if (s_.seg.labels[p] == section) candidates.emplace_back(dist[p], p);
      for (Move m : legal_moves(map, p)) {
        const Position n = apply(p, m);
        if (dist[n] < 0) {
          dist[n] = dist[p] + 1;
          queue.push_back(n);
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());

    std::optional<Trajectory> best;
    Position best_pos{};
    for (const auto& [d, p] : candidates) {
      if (best && static_cast<std::size_t>(d) > best->length()) break;
      Trajectory t;
      try {
        t = plan_to(p, WaypointKind::Destination);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Unreachable) throw;
        continue;
      }
      if (!best || t.length() < best->length() || (t.length() == best->length() && p < best_pos)) {
        best = std::move(t);
        best_pos = p;
      }
    }
    if (!best) throw Error(ErrorCode::Unreachable, "cannot reach " + std::string(section_name(section)));
    return *best;
  }

  void step(const SubTask& t) {
    switch (t.kind) {
      case SubTaskKind::Find:
        require_location(t.object);
        record(t);
        break;
      case SubTaskKind::NavigateObject: {
        Position target = require_location(t.object);
        if (t.origin) target = origins_.at(t.object);
        auto traj = plan_to_object_cell(target);
        walk(traj);
        record(t, std::move(traj));
        break;
      }
      case SubTaskKind::NavigateSection: {
        auto traj = plan_to_section(*t.section);
        walk(traj);
        record(t, std::move(traj));
        break;
      }
      case SubTaskKind::Pickup: {
        if (s_.agent.carried)
          throw Error(ErrorCode::HandsFull, "already carrying '" + s_.agent.carried->name + "'");
        const auto* remembered = s_.agent.memory.find(t.object);
        if (!remembered) throw Error(ErrorCode::ObjectNotInMemory, "'" + t.object + "' has not been seen");
        auto it = std::find_if(s_.map.objects.begin(), s_.map.objects.end(),
                               [&](const WorldObject& o) { return o.id == remembered->id; });
        if (it == s_.map.objects.end())
          throw Error(ErrorCode::ObjectNotInMemory, "'" + t.object + "' is no longer where it was seen");
        if (!it->movable) throw Error(ErrorCode::NotMovable, "'" + t.object + "' cannot be picked up");
        if (manhattan(it->pos, s_.agent.pos) > 1)
          throw Error(ErrorCode::NotAdjacent, "'" + t.object + "' is not next to the agent");
        s_.agent.carried = *it;
        s_.map.objects.erase(it);
        ObjectMove mv{s_.agent.carried->id, s_.agent.carried->name, std::nullopt};
        moves_[mv.id] = mv;
        emit(s_.agent.pos, mv);
        record(t);
        break;
      }
      case SubTaskKind::Drop: {
        if (!s_.agent.carried || s_.agent.carried->name != t.object)
          throw Error(ErrorCode::NotCarrying, "not carrying '" + t.object + "'");
        WorldObject obj = std::move(*s_.agent.carried);
        s_.agent.carried.reset();
        obj.pos = s_.agent.pos;
        s_.agent.memory.observe(obj);
        ObjectMove mv{obj.id, obj.name, obj.pos};
        moves_[mv.id] = mv;
        s_.map.objects.push_back(std::move(obj));
        emit(s_.agent.pos, mv);
        record(t);
        break;
      }
    }
  }

  WorldSession& s_;
  const StepObserver& observer_;
  std::map<std::string, Position> origins_;
  std::map<int, ObjectMove> moves_;
  ExecutionLog log_;
};

}  // namespace

ExecutionLog execute(WorldSession& session, const std::vector<SubTask>& plan, const StepObserver& observer) {
  return Executor(session, observer).run(plan);
}

WorldSession make_session(const GridMap& map, const KnowledgeBase& kb, Position start, int mas, double radius,
                          std::uint64_t seed, const SegmentConfig& cfg) {
  auto result = explore(map, start, mas, radius, seed);
  WorldSession s;
  s.map = map;
  s.kb = kb;
  s.seg = segment(result.memory, result.visited, map, kb, cfg);
  s.graph = build_section_graph(s.seg.labels);
  s.agent.pos = result.trace.back();
  s.agent.memory = std::move(result.memory);
  return s;
}

}  // namespace esni
