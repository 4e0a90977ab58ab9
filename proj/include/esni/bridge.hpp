#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "esni/tasking.hpp"

namespace httplib {
class Server;
}

namespace esni {

struct SessionEvent {
  std::uint64_t seq = 0;
  Position agent;
  std::optional<std::string> carried;
  std::optional<ObjectMove> moved;
};

nlohmann::json to_json(const SessionEvent& e);

struct CreateRequest {
  std::optional<std::string> plan_name;  // resolved as <plans_dir>/<name>.plan
  std::optional<std::string> plan_text;  // uploaded plan, wins over plan_name
  std::optional<std::string> knowledge_name;
  std::optional<std::string> knowledge_text;
  std::uint64_t seed = 1;
  int mas = 2000;
  std::optional<Position> start;
};

CreateRequest create_request_from_json(const nlohmann::json& body);

// Grid size, per-cell walkability and labels (plan-format letters), objects, agent.
nlohmann::json state_document(const std::string& id, const WorldSession& s, std::uint64_t last_seq);

// Applies one event to a state document the way the server applied it to the session.
void apply_event(nlohmann::json& state, const nlohmann::json& event);

nlohmann::json error_envelope(ErrorCode code, const std::string& message);

class SessionManager {
 public:
  struct Options {
    std::filesystem::path plans_dir = "data";
    std::string default_knowledge = "house";
    std::chrono::seconds idle_expiry{30 * 60};
  };

  SessionManager() = default;
  explicit SessionManager(Options options) : options_(std::move(options)) {}

  std::string create(const CreateRequest& req);
  nlohmann::json state(const std::string& id);
  // Parse, compile and execute `text`. Commands on one session run one at a time in
  // arrival order. Failed commands leave the session untouched and throw.
  nlohmann::json command(const std::string& id, const std::string& text);
  // Events with seq > after, waiting up to `wait` for at least one to appear.
  std::vector<SessionEvent> events_since(const std::string& id, std::uint64_t after,
                                         std::chrono::milliseconds wait = std::chrono::milliseconds{0});
  std::size_t expire_idle(std::chrono::steady_clock::time_point now = std::chrono::steady_clock::now());
  std::size_t size() const;

 private:
  struct Session {
    std::string id;
    WorldSession world;
    std::vector<SessionEvent> events;
    std::chrono::steady_clock::time_point last_access;

    mutable std::shared_mutex state_mutex;  // guards world, events, last_access
    std::condition_variable_any events_cv;

    // FIFO admission for commands.
    std::mutex ticket_mutex;
    std::condition_variable ticket_cv;
    std::uint64_t next_ticket = 0;
    std::uint64_t now_serving = 0;
  };

  std::shared_ptr<Session> find(const std::string& id);

  Options options_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

// Routes: POST /sessions, GET /sessions/{id}/state, POST /sessions/{id}/command,
// GET /sessions/{id}/events (text/event-stream; ?since=N, ?wait=0 closes after the backlog).
void register_routes(httplib::Server& server, SessionManager& manager);

}  // namespace esni
