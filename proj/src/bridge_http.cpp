#include <httplib.h>

#include "esni/bridge.hpp"

namespace esni {

using nlohmann::json;

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession: return 404;
    default: return 400;
  }
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    reply(res, status_for(e.code()), error_envelope(e.code(), e.what()));
  } catch (const json::exception& e) {
    reply(res, 400, error_envelope(ErrorCode::InvalidConfig, e.what()));
  }
}

}  // namespace

void register_routes(httplib::Server& server, SessionManager& manager) {
  server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = req.body.empty() ? json::object() : json::parse(req.body);
      const auto id = manager.create(create_request_from_json(body));
      reply(res, 201, json{{"id", id}});
    });
  });

  server.Get(R"(/sessions/([^/]+)/state)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, manager.state(req.matches[1])); });
  });

  server.Post(R"(/sessions/([^/]+)/command)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      reply(res, 200, manager.command(req.matches[1], body.at("text").get<std::string>()));
    });
  });

  server.Get(R"(/sessions/([^/]+)/events)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      std::uint64_t since = req.has_param("since") ? std::stoull(req.get_param_value("since")) : 0;
      const bool follow = !req.has_param("wait") || req.get_param_value("wait") != "0";
      manager.state(id);  // 404 before committing to a stream
      res.set_chunked_content_provider(
          "text/event-stream", [&manager, id, since, follow](std::size_t, httplib::DataSink& sink) mutable {
            try {
              const auto events =
                  manager.events_since(id, since, follow ? std::chrono::milliseconds{1000} : std::chrono::milliseconds{0});
              for (const auto& e : events) {
                const auto line = "id: " + std::to_string(e.seq) + "\ndata: " + to_json(e).dump() + "\n\n";
                if (!sink.write(line.data(), line.size())) return false;
                since = e.seq;
              }
            } catch (const Error&) {
              sink.done();
              return true;
            }
            if (!follow) {
              sink.done();
              return true;
            }
            return sink.is_writable();
          });
    });
  });
}

}  // namespace esni
