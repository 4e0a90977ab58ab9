#include "esni/bridge.hpp"

#include <cstdio>

#include "esni/explore.hpp"

namespace esni {

using nlohmann::json;

namespace {

json position_json(Position p) { return json{{"x", p.x}, {"y", p.y}}; }

json object_json(const WorldObject& o) {
  return json{{"id", o.id}, {"name", o.name}, {"x", o.pos.x}, {"y", o.pos.y}, {"movable", o.movable}};
}

}  // namespace

json to_json(const SessionEvent& e) {
  json j{{"seq", e.seq}, {"agent", position_json(e.agent)}};
  j["carried"] = e.carried ? json(*e.carried) : json(nullptr);
  if (e.moved) {
    json mv{{"id", e.moved->id}, {"name", e.moved->name}};
    if (e.moved->to) {
      mv["x"] = e.moved->to->x;
      mv["y"] = e.moved->to->y;
    } else {
      mv["x"] = nullptr;
      mv["y"] = nullptr;
    }
    j["moved"] = mv;
  } else {
    j["moved"] = nullptr;
  }
  return j;
}

CreateRequest create_request_from_json(const json& body) {
  CreateRequest req;
  if (!body.is_object()) throw Error(ErrorCode::InvalidPlan, "request body must be an object");
  if (body.contains("plan")) req.plan_name = body.at("plan").get<std::string>();
  if (body.contains("plan_text")) req.plan_text = body.at("plan_text").get<std::string>();
  if (body.contains("knowledge")) req.knowledge_name = body.at("knowledge").get<std::string>();
  if (body.contains("knowledge_text")) req.knowledge_text = body.at("knowledge_text").get<std::string>();
  if (body.contains("seed")) req.seed = body.at("seed").get<std::uint64_t>();
  if (body.contains("mas")) req.mas = body.at("mas").get<int>();
  if (body.contains("start")) {
    const auto& s = body.at("start");
    req.start = Position{s.at("x").get<int>(), s.at("y").get<int>()};
  }
  return req;
}

json state_document(const std::string& id, const WorldSession& s, std::uint64_t last_seq) {
  json walkable = json::array();
  json labels = json::array();
  for (int y = 0; y < s.map.height(); ++y) {
    std::string wrow;
    std::string lrow;
    for (int x = 0; x < s.map.width(); ++x) {
      const Position p{x, y};
      wrow += s.map.is_walkable(p) ? '.' : '#';
      const auto& l = s.seg.labels[p];
      lrow += l ? section_letter(*l) : '.';
    }
    walkable.push_back(wrow);
    labels.push_back(lrow);
  }
  json objects = json::array();
  for (const auto& o : s.map.objects) objects.push_back(object_json(o));
  json sections = json::array();
  for (auto sec : s.seg.sections_present()) sections.push_back(std::string(1, section_letter(sec)));

  json doc{{"id", id},
           {"width", s.map.width()},
           {"height", s.map.height()},
           {"walkable", walkable},
           {"labels", labels},
           {"sections", sections},
           {"objects", objects},
           {"agent", position_json(s.agent.pos)},
           {"seq", last_seq}};
  doc["carried"] = s.agent.carried ? json(object_json(*s.agent.carried)) : json(nullptr);
  return doc;
}

void apply_event(json& state, const json& event) {
  state["agent"] = event.at("agent");
  state["seq"] = event.at("seq");
  const auto& moved = event.at("moved");
  if (moved.is_null()) return;

  auto& objects = state["objects"];
  const int id = moved.at("id").get<int>();
  auto it = std::find_if(objects.begin(), objects.end(), [&](const json& o) { return o.at("id").get<int>() == id; });
  if (moved.at("x").is_null()) {
    if (it != objects.end()) {
      state["carried"] = *it;
      objects.erase(it);
    }
  } else {
    json obj = state["carried"].is_null() ? json{{"id", id}, {"name", moved.at("name")}, {"movable", true}}
                                          : state["carried"];
    obj["x"] = moved.at("x");
    obj["y"] = moved.at("y");
    objects.push_back(obj);
    state["carried"] = nullptr;
  }
}

json error_envelope(ErrorCode code, const std::string& message) {
  return json{{"error", {{"code", std::string(error_code_name(code))}, {"message", message}}}};
}

std::string SessionManager::create(const CreateRequest& req) {
  GridMap map;
  KnowledgeBase kb;
  try {
    if (req.plan_text) {
      map = parse_plan(*req.plan_text);
    } else if (req.plan_name) {
      map = parse_plan(read_text_file((options_.plans_dir / (*req.plan_name + ".plan")).string()));
    } else {
      throw Error(ErrorCode::InvalidPlan, "request names no plan");
    }
    if (req.knowledge_text) {
      kb = parse_knowledge(*req.knowledge_text);
    } else {
      const auto name = req.knowledge_name.value_or(options_.default_knowledge);
      kb = parse_knowledge(read_text_file((options_.plans_dir / (name + ".knowledge")).string()));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidPlan) throw;
    throw Error(ErrorCode::InvalidPlan, e.what());
  }
  if (req.mas < 0) throw Error(ErrorCode::InvalidConfig, "mas must be non-negative");

  const Position start = req.start.value_or(default_start(map));
  auto session = std::make_shared<Session>();
  session->world = make_session(map, kb, start, req.mas, kDefaultPerceptionRadius, req.seed);
  session->last_access = std::chrono::steady_clock::now();

  expire_idle();
  std::lock_guard lock(sessions_mutex_);
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(next_id_++));
  session->id = buf;
  sessions_.emplace(session->id, session);
  return session->id;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
  return it->second;
}

json SessionManager::state(const std::string& id) {
  auto s = find(id);
  std::unique_lock lock(s->state_mutex);
  s->last_access = std::chrono::steady_clock::now();
  return state_document(s->id, s->world, s->events.empty() ? 0 : s->events.back().seq);
}

json SessionManager::command(const std::string& id, const std::string& text) {
  auto s = find(id);

  std::uint64_t ticket;
  {
    std::unique_lock lock(s->ticket_mutex);
    ticket = s->next_ticket++;
    s->ticket_cv.wait(lock, [&] { return s->now_serving == ticket; });
  }
  struct Release {
    Session& s;
    ~Release() {
      {
        std::lock_guard lock(s.ticket_mutex);
        ++s.now_serving;
      }
      s.ticket_cv.notify_all();
    }
  } release{*s};

  // Only this thread writes the session now; readers may still look at it.
  WorldSession working;
  std::uint64_t seq;
  {
    std::shared_lock lock(s->state_mutex);
    working = s->world;
    seq = s->events.empty() ? 0 : s->events.back().seq;
  }

  const auto vocab = make_vocabulary(working.kb, working.map);
  const auto query = parse_command(text, vocab);
  const auto subtasks = compile_query(query);

  std::vector<SessionEvent> pending;
  const auto log = execute(working, subtasks, [&](const StepEvent& e) {
    pending.push_back({++seq, e.agent, e.carried, e.moved});
  });

  json steps = json::array();
  json entries = json::array();
  for (const auto& entry : log.entries) {
    json traj = json::array();
    for (Position p : entry.trajectory.steps) {
      traj.push_back({p.x, p.y});
      if (steps.empty() || steps.back() != json{p.x, p.y}) steps.push_back({p.x, p.y});
    }
    json e{{"task", to_string(entry.task)}, {"agent", position_json(entry.agent)}, {"trajectory", traj}};
    e["carried"] = entry.carried ? json(*entry.carried) : json(nullptr);
    entries.push_back(e);
  }
  json subtask_names = json::array();
  for (const auto& t : subtasks) subtask_names.push_back(to_string(t));

  json response{{"query", to_string(query)},
                {"subtasks", subtask_names},
                {"log", entries},
                {"trajectory", steps},
                {"events", {{"first", pending.empty() ? 0 : pending.front().seq},
                            {"last", pending.empty() ? 0 : pending.back().seq}}}};

  {
    std::unique_lock lock(s->state_mutex);
    s->world = std::move(working);
    s->events.insert(s->events.end(), pending.begin(), pending.end());
    s->last_access = std::chrono::steady_clock::now();
  }
  s->events_cv.notify_all();
  return response;
}

std::vector<SessionEvent> SessionManager::events_since(const std::string& id, std::uint64_t after,
                                                       std::chrono::milliseconds wait) {
  auto s = find(id);
  std::shared_lock lock(s->state_mutex);
  auto ready = [&] { return !s->events.empty() && s->events.back().seq > after; };
  if (!ready() && wait.count() > 0) s->events_cv.wait_for(lock, wait, ready);
  std::vector<SessionEvent> out;
  for (const auto& e : s->events) {
    if (e.seq > after) out.push_back(e);
  }
  return out;
}

std::size_t SessionManager::expire_idle(std::chrono::steady_clock::time_point now) {
  std::lock_guard lock(sessions_mutex_);
  std::size_t removed = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool idle;
    {
      std::shared_lock slock(it->second->state_mutex);
      idle = now - it->second->last_access > options_.idle_expiry;
    }
    if (idle) {
      it = sessions_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

}  // namespace esni
