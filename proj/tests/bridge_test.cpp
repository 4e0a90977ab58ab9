#include <gtest/gtest.h>
#include <httplib.h>

#include <set>
#include <thread>

#include "esni/bridge.hpp"
#include "test_support.hpp"

using namespace esni;
using nlohmann::json;

namespace {

SessionManager::Options options() {
  SessionManager::Options o;
  o.plans_dir = ESNI_DATA_DIR;
  return o;
}

CreateRequest bundled_request() {
  CreateRequest req;
  req.plan_name = "house";
  req.seed = 1;
  req.mas = 2000;
  return req;
}

ErrorCode failure(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidConfig;
}

json object_named(const json& state, const std::string& name) {
  for (const auto& o : state.at("objects")) {
    if (o.at("name") == name) return o;
  }
  return nullptr;
}

}  // namespace

TEST(SessionManager, CreatesBundledSession) {
  SessionManager mgr(options());
  const auto id = mgr.create(bundled_request());
  const auto state = mgr.state(id);
  EXPECT_EQ(state.at("id"), id);
  EXPECT_EQ(state.at("width"), 40);
  EXPECT_EQ(state.at("height"), 40);
  ASSERT_EQ(state.at("walkable").size(), 40u);
  ASSERT_EQ(state.at("labels").size(), 40u);
  EXPECT_EQ(state.at("labels")[0].get<std::string>().size(), 40u);
  EXPECT_EQ(state.at("sections"), (json{"K", "L", "B", "S", "T", "A"}));
  EXPECT_EQ(state.at("seq"), 0);
  EXPECT_TRUE(state.at("carried").is_null());
  EXPECT_EQ(state.at("objects").size(), 28u);
}

TEST(SessionManager, SameInputsSameSegmentation) {
  SessionManager mgr(options());
  const auto a = mgr.state(mgr.create(bundled_request()));
  const auto b = mgr.state(mgr.create(bundled_request()));
  EXPECT_NE(a.at("id"), b.at("id"));
  EXPECT_EQ(a.at("labels"), b.at("labels"));
  EXPECT_EQ(a.at("agent"), b.at("agent"));
  EXPECT_EQ(mgr.size(), 2u);
}

TEST(SessionManager, RejectsBadPlans) {
  SessionManager mgr(options());
  CreateRequest bad;
  bad.plan_text = "..Q\n---\n";
  EXPECT_EQ(failure([&] { mgr.create(bad); }), ErrorCode::InvalidPlan);
  CreateRequest missing;
  missing.plan_name = "no_such_plan";
  EXPECT_EQ(failure([&] { mgr.create(missing); }), ErrorCode::InvalidPlan);
  EXPECT_EQ(failure([&] { mgr.create(CreateRequest{}); }), ErrorCode::InvalidPlan);
  EXPECT_EQ(mgr.size(), 0u);
}

TEST(SessionManager, AcceptsUploadedPlan) {
  SessionManager mgr(options());
  CreateRequest req;
  req.plan_text = "....\n....\n---\n1 toilet 0 0 0\n2 towel 3 1 1\n";
  req.knowledge_text = "toilet Bathroom Bathroom:1\ntowel - Bathroom:0.8,Bedroom:0.2\n";
  req.mas = 50;
  const auto state = mgr.state(mgr.create(req));
  EXPECT_EQ(state.at("width"), 4);
  EXPECT_EQ(state.at("sections"), (json{"T"}));
}

TEST(SessionManager, UnknownSession) {
  SessionManager mgr(options());
  EXPECT_EQ(failure([&] { mgr.state("s999999"); }), ErrorCode::UnknownSession);
  EXPECT_EQ(failure([&] { mgr.command("nope", "go to the kitchen"); }), ErrorCode::UnknownSession);
}

TEST(SessionManager, BringUpdatesState) {
  SessionManager mgr(options());
  const auto id = mgr.create(bundled_request());
  const auto before = object_named(mgr.state(id), "banana");
  const auto response = mgr.command(id, "I want an banana. I am at bedroom");
  EXPECT_EQ(response.at("query"), "Bring[banana,Bedroom]");
  EXPECT_EQ(response.at("subtasks").size(), 5u);
  EXPECT_EQ(response.at("log").size(), 5u);
  const auto state = mgr.state(id);
  const auto after = object_named(state, "banana");
  EXPECT_NE(after, before);
  EXPECT_EQ(after.at("x"), state.at("agent").at("x"));
  EXPECT_EQ(after.at("y"), state.at("agent").at("y"));
  const int x = after.at("x"), y = after.at("y");
  EXPECT_EQ(state.at("labels")[y].get<std::string>()[x], 'B');
  EXPECT_EQ(state.at("seq"), response.at("events").at("last"));
  EXPECT_EQ(response.at("trajectory").back(), (json{x, y}));
}

TEST(SessionManager, FailedCommandsChangeNothing) {
  SessionManager mgr(options());
  const auto id = mgr.create(bundled_request());
  mgr.command(id, "go to the studio");
  const auto before = mgr.state(id);
  EXPECT_EQ(failure([&] { mgr.command(id, "dance for me"); }), ErrorCode::NoVerbMatch);
  EXPECT_EQ(failure([&] { mgr.command(id, "swap my banana and my bathtub"); }), ErrorCode::NotMovable);
  EXPECT_EQ(mgr.state(id), before);
  EXPECT_EQ(mgr.events_since(id, before.at("seq").get<std::uint64_t>()).size(), 0u);
}

TEST(SessionManager, ReplayingEventsReproducesState) {
  SessionManager mgr(options());
  const auto id = mgr.create(bundled_request());
  auto replayed = mgr.state(id);
  for (const char* text : {"I want an banana. I am at bedroom", "swap my cloth and toothbrush", "go to the balcony",
                           "bring the tv to the kitchen"}) {
    mgr.command(id, text);
  }
  const auto events = mgr.events_since(id, 0);
  ASSERT_FALSE(events.empty());
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_EQ(events[i].seq, i + 1);
    apply_event(replayed, to_json(events[i]));
  }
  EXPECT_EQ(replayed, mgr.state(id));
}

TEST(SessionManager, ConcurrentCommandsRunOneAtATime) {
  SessionManager mgr(options());
  const auto id = mgr.create(bundled_request());
  const std::vector<std::string> texts{"go to the bathroom", "go to the kitchen", "go to the balcony",
                                       "go to the living room", "go to the bedroom", "go to the studio"};
  std::vector<json> responses(texts.size() * 3);
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < responses.size(); ++i) {
      workers.emplace_back([&, i] { responses[i] = mgr.command(id, texts[i % texts.size()]); });
    }
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
  for (const auto& r : responses) {
    const std::uint64_t first = r.at("events").at("first"), last = r.at("events").at("last");
    if (last != 0) ranges.emplace_back(first, last);
  }
  std::sort(ranges.begin(), ranges.end());
  for (std::size_t i = 1; i < ranges.size(); ++i) EXPECT_EQ(ranges[i].first, ranges[i - 1].second + 1);
  EXPECT_EQ(ranges.back().second, mgr.state(id).at("seq").get<std::uint64_t>());
  EXPECT_EQ(mgr.events_since(id, 0).size(), ranges.back().second);
}

TEST(SessionManager, CommandsAreAdmittedInArrivalOrder) {
  SessionManager mgr(options());
  const auto id = mgr.create(bundled_request());
  // Each command starts only after the previous one was admitted, so the event ranges
  // must follow submission order.
  std::vector<json> responses(6);
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < responses.size(); ++i) {
      workers.emplace_back(
          [&, i] { responses[i] = mgr.command(id, i % 2 == 0 ? "go to the bathroom" : "go to the kitchen"); });
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }
  for (std::size_t i = 1; i < responses.size(); ++i)
    EXPECT_GT(responses[i].at("events").at("first"), responses[i - 1].at("events").at("last"));
}

TEST(SessionManager, IdleSessionsExpire) {
  SessionManager mgr(options());
  const auto id = mgr.create(bundled_request());
  EXPECT_EQ(mgr.expire_idle(std::chrono::steady_clock::now() + std::chrono::minutes(5)), 0u);
  EXPECT_EQ(mgr.expire_idle(std::chrono::steady_clock::now() + std::chrono::minutes(31)), 1u);
  EXPECT_EQ(failure([&] { mgr.state(id); }), ErrorCode::UnknownSession);
}

TEST(StateDocument, EventJsonShape) {
  const SessionEvent moving{3, {4, 5}, std::string("banana"), std::nullopt};
  EXPECT_EQ(to_json(moving), json::parse(R"({"seq":3,"agent":{"x":4,"y":5},"carried":"banana","moved":null})"));
  const SessionEvent pick{4, {4, 5}, std::string("banana"), ObjectMove{25, "banana", std::nullopt}};
  EXPECT_EQ(to_json(pick).at("moved"), json::parse(R"({"id":25,"name":"banana","x":null,"y":null})"));
  EXPECT_EQ(error_envelope(ErrorCode::NoVerbMatch, "x"), json::parse(R"({"error":{"code":"NoVerbMatch","message":"x"}})"));
}

class HttpBridge : public ::testing::Test {
 protected:
  void SetUp() override {
    register_routes(server_, manager_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::jthread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override { server_.stop(); }

  httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

  std::string create_session() {
    auto res = client().Post("/sessions", R"({"plan":"house","seed":1,"mas":2000})", "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201);
    return json::parse(res->body).at("id");
  }

  SessionManager manager_{options()};
  httplib::Server server_;
  int port_ = 0;
  std::jthread thread_;
};

TEST_F(HttpBridge, CreateStateAndCommand) {
  const auto id = create_session();
  auto c = client();
  auto state = c.Get("/sessions/" + id + "/state");
  ASSERT_TRUE(state);
  EXPECT_EQ(state->status, 200);
  EXPECT_EQ(json::parse(state->body).at("width"), 40);

  auto res = c.Post("/sessions/" + id + "/command", R"({"text":"Can you come to my bedroom to serve me?"})",
                    "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto body = json::parse(res->body);
  EXPECT_EQ(body.at("query"), "Navigate[Bedroom]");
  const auto after = json::parse(c.Get("/sessions/" + id + "/state")->body);
  const int x = after.at("agent").at("x"), y = after.at("agent").at("y");
  EXPECT_EQ(after.at("labels")[y].get<std::string>()[x], 'B');
}

TEST_F(HttpBridge, ErrorEnvelopes) {
  const auto id = create_session();
  auto c = client();
  const auto before = c.Get("/sessions/" + id + "/state")->body;

  auto bad = c.Post("/sessions/" + id + "/command", R"({"text":"dance for me"})", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(json::parse(bad->body).at("error").at("code"), "NoVerbMatch");
  EXPECT_EQ(c.Get("/sessions/" + id + "/state")->body, before);

  auto missing = c.Get("/sessions/s424242/state");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body).at("error").at("code"), "UnknownSession");

  auto plan = c.Post("/sessions", R"({"plan_text":"##\n##\n---\n"})", "application/json");
  ASSERT_TRUE(plan);
  EXPECT_EQ(plan->status, 400);
  EXPECT_EQ(json::parse(plan->body).at("error").at("code"), "InvalidPlan");

  auto garbage = c.Post("/sessions/" + id + "/command", "{not json", "application/json");
  ASSERT_TRUE(garbage);
  EXPECT_EQ(garbage->status, 400);
  EXPECT_TRUE(json::parse(garbage->body).contains("error"));
}

TEST_F(HttpBridge, EventStreamReplaysBacklog) {
  const auto id = create_session();
  auto c = client();
  const auto response =
      json::parse(c.Post("/sessions/" + id + "/command", R"({"text":"go to the studio"})", "application/json")->body);
  const std::uint64_t last = response.at("events").at("last");
  ASSERT_GT(last, 0u);

  auto stream = c.Get("/sessions/" + id + "/events?wait=0");
  ASSERT_TRUE(stream);
  EXPECT_EQ(stream->status, 200);
  EXPECT_NE(stream->get_header_value("Content-Type").find("text/event-stream"), std::string::npos);
  std::uint64_t count = 0;
  std::istringstream in(stream->body);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("data: ", 0) == 0) {
      const auto event = json::parse(line.substr(6));
      EXPECT_EQ(event.at("seq"), ++count);
    }
  }
  EXPECT_EQ(count, last);

  auto tail = c.Get("/sessions/" + id + "/events?wait=0&since=" + std::to_string(last - 2));
  ASSERT_TRUE(tail);
  EXPECT_NE(tail->body.find("id: " + std::to_string(last) + "\n"), std::string::npos);
  EXPECT_EQ(tail->body.find("id: " + std::to_string(last - 2) + "\n"), std::string::npos);

  auto unknown = c.Get("/sessions/s424242/events?wait=0");
  ASSERT_TRUE(unknown);
  EXPECT_EQ(unknown->status, 404);
}
