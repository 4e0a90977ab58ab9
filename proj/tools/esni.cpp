// esni: command-line front end for exploration, segmentation, routing, commands,
// experiment sweeps and the session server.

#include <CLI11.hpp>
#include <httplib.h>

#include <fstream>
#include <iostream>

#include "esni/bridge.hpp"
#include "esni/harness.hpp"
#include "esni/navigate.hpp"
#include "esni/segment.hpp"
#include "esni/tasking.hpp"

namespace {

using namespace esni;

Position parse_xy(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("expected x,y but got '" + text + "'");
  return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path);
  out << content;
}

struct WorldArgs {
  std::string plan;
  std::string knowledge;
  int mas = 2000;
  std::uint64_t seed = 1;
  double radius = kDefaultPerceptionRadius;
  std::string start;

  void add_to(CLI::App* cmd, bool knowledge_required = true) {
    cmd->add_option("--plan", plan, "Plan file")->required()->check(CLI::ExistingFile);
    auto* k = cmd->add_option("--knowledge", knowledge, "Knowledge file")->check(CLI::ExistingFile);
    if (knowledge_required) k->required();
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--radius", radius, "Perception radius in cells");
    cmd->add_option("--start", start, "Start cell x,y (default: bottom-right corner)");
  }

  GridMap load_map() const { return parse_plan(read_text_file(plan)); }
  KnowledgeBase load_kb() const { return parse_knowledge(read_text_file(knowledge)); }
  Position start_on(const GridMap& map) const { return start.empty() ? default_start(map) : parse_xy(start); }
};

void print_execution(const ContextualQuery& q, const std::vector<SubTask>& tasks, const ExecutionLog& log) {
  std::cout << "query: " << to_string(q) << '\n' << "subtasks:";
  for (const auto& t : tasks) std::cout << ' ' << to_string(t);
  std::cout << '\n';
  for (const auto& e : log.entries) {
    std::cout << "  " << to_string(e.task) << " -> agent " << to_string(e.agent) << ", carrying "
              << e.carried.value_or("nothing");
    if (!e.trajectory.steps.empty()) std::cout << ", " << e.trajectory.length() << " steps";
    std::cout << '\n';
  }
  for (const auto& mv : log.object_moves) {
    std::cout << "  moved " << mv.name << " (#" << mv.id << ") to " << (mv.to ? to_string(*mv.to) : "agent")
              << '\n';
  }
}

int run_command(WorldSession& session, const std::string& text) {
  try {
    const auto query = parse_command(text, make_vocabulary(session.kb, session.map));
    const auto tasks = compile_query(query);
    WorldSession working = session;
    const auto log = execute(working, tasks);
    session = std::move(working);
    print_execution(query, tasks, log);
    return 0;
  } catch (const Error& e) {
    std::cout << "error " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-world household agent: explore, segment, navigate, instruct"};
  app.require_subcommand(1);

  // explore
  WorldArgs ex;
  std::string trace_out;
  auto* explore_cmd = app.add_subcommand("explore", "Explore a plan under a step budget");
  ex.add_to(explore_cmd);
  explore_cmd->add_option("--mas", ex.mas, "Maximum allowed steps")->required();
  explore_cmd->add_option("--trace", trace_out, "Write the visited cell sequence (x,y per line)");
  explore_cmd->callback([&] {
    const auto map = ex.load_map();
    ex.load_kb();
    const auto r = explore(map, ex.start_on(map), ex.mas, ex.radius, ex.seed);
    std::cout << "steps " << r.steps_taken << "\ncoverage " << coverage(r, map) << "\nmemory " << r.memory.size()
              << '\n';
    if (!trace_out.empty()) {
      std::string text;
      for (Position p : r.trace) text += to_string(p) + '\n';
      write_output(trace_out, text);
    }
  });

  // segment
  WorldArgs sg;
  double n_factor = SegmentConfig{}.occlusion_factor;
  std::string labels_out = "-";
  std::string boundary_out = "-";
  auto* segment_cmd = app.add_subcommand("segment", "Explore, then label cells by section");
  sg.add_to(segment_cmd);
  segment_cmd->add_option("--mas", sg.mas, "Maximum allowed steps")->required();
  segment_cmd->add_option("--n-factor", n_factor, "Occlusion discount factor N");
  segment_cmd->add_option("--labels-out", labels_out, "Label grid output (default stdout)");
  segment_cmd->add_option("--boundary-out", boundary_out, "Boundary CSV output (default stdout)");
  segment_cmd->callback([&] {
    const auto map = sg.load_map();
    const auto kb = sg.load_kb();
    SegmentConfig cfg;
    cfg.occlusion_factor = n_factor;
    const auto r = explore(map, sg.start_on(map), sg.mas, sg.radius, sg.seed);
    const auto seg = segment(r.memory, r.visited, map, kb, cfg);
    write_output(labels_out, format_labels(seg.labels));
    std::string csv = "x,y,section_a,section_b\n";
    for (const auto& bp : boundary_points(seg.labels)) {
      csv += std::to_string(bp.pos.x) + ',' + std::to_string(bp.pos.y) + ',' +
             std::string(section_name(bp.sections.first)) + ',' + std::string(section_name(bp.sections.second)) +
             '\n';
    }
    if (labels_out == "-" && boundary_out == "-") std::cout << '\n';
    write_output(boundary_out, csv);
  });

  // route
  WorldArgs rt;
  std::string from_text, to_text, steps_out = "-";
  auto* route_cmd = app.add_subcommand(
      "route", "Plan a trajectory; uses the plan's section labels unless --knowledge is given");
  rt.add_to(route_cmd, false);
  route_cmd->add_option("--from", from_text, "Start cell x,y")->required();
  route_cmd->add_option("--to", to_text, "Goal cell x,y")->required();
  route_cmd->add_option("--mas", rt.mas, "Exploration budget when segmenting from knowledge");
  route_cmd->add_option("--out", steps_out, "Step list output (default stdout)");
  route_cmd->callback([&] {
    const auto map = rt.load_map();
    LabelGrid labels;
    if (!rt.knowledge.empty()) {
      const auto kb = rt.load_kb();
      const auto r = explore(map, rt.start_on(map), rt.mas, rt.radius, rt.seed);
      labels = segment(r.memory, r.visited, map, kb, {}).labels;
    } else if (map.ground_truth) {
      labels = *map.ground_truth;
    } else {
      throw Error(ErrorCode::InvalidConfig, "plan has no sections block; pass --knowledge");
    }
    const auto graph = build_section_graph(labels);
    const Position goal = parse_xy(to_text);
    const auto traj = plan_trajectory(map, labels, graph, parse_xy(from_text), std::span<const Position>(&goal, 1));
    std::string path_text;
    for (auto s : traj.section_paths.front()) {
      if (!path_text.empty()) path_text += " -> ";
      path_text += section_name(s);
    }
    std::cout << "section path: " << path_text << '\n';
    std::string text;
    for (Position p : traj.steps) text += to_string(p) + '\n';
    write_output(steps_out, text);
  });

  // do
  WorldArgs dd;
  std::string command_text;
  auto* do_cmd = app.add_subcommand("do", "Execute one natural-language command");
  dd.add_to(do_cmd);
  do_cmd->add_option("--mas", dd.mas, "Exploration budget before the command");
  do_cmd->add_option("command", command_text, "Command text")->required();
  int do_status = 0;
  do_cmd->callback([&] {
    const auto map = dd.load_map();
    auto session = make_session(map, dd.load_kb(), dd.start_on(map), dd.mas, dd.radius, dd.seed);
    do_status = run_command(session, command_text);
  });

  // repl
  WorldArgs rp;
  auto* repl_cmd = app.add_subcommand("repl", "Read commands from stdin against one session");
  rp.add_to(repl_cmd);
  repl_cmd->add_option("--mas", rp.mas, "Exploration budget before the first command");
  repl_cmd->callback([&] {
    const auto map = rp.load_map();
    auto session = make_session(map, rp.load_kb(), rp.start_on(map), rp.mas, rp.radius, rp.seed);
    std::cout << "sections:";
    for (auto s : session.seg.sections_present()) std::cout << ' ' << section_name(s);
    std::cout << "\nagent at " << to_string(session.agent.pos) << '\n';
    std::string line;
    while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
      if (line == "quit" || line == "exit") break;
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      run_command(session, line);
    }
  });

  // sweep
  WorldArgs sw;
  SweepConfig sweep_cfg;
  std::string sweep_out = "-";
  auto* sweep_cmd = app.add_subcommand("sweep", "Coverage and sections recognized across step budgets");
  sw.add_to(sweep_cmd);
  sweep_cmd->add_option("--mas-min", sweep_cfg.mas_min);
  sweep_cmd->add_option("--mas-max", sweep_cfg.mas_max);
  sweep_cmd->add_option("--mas-step", sweep_cfg.mas_step);
  sweep_cmd->add_option("--trials", sweep_cfg.trials);
  sweep_cmd->add_option("--threads", sweep_cfg.threads, "Worker threads (0: all cores)");
  sweep_cmd->add_option("--out", sweep_out, "CSV output (default stdout)");
  bool independent_seeds = false;
  sweep_cmd->add_flag("--independent-seeds", independent_seeds,
                      "Fresh walk per (budget, trial) instead of one walk per trial observed at every budget");
  sweep_cmd->callback([&] {
    const auto map = sw.load_map();
    sweep_cfg.master_seed = sw.seed;
    sweep_cfg.radius = sw.radius;
    sweep_cfg.seed_mode = independent_seeds ? SeedMode::Independent : SeedMode::Shared;
    write_output(sweep_out, sweep_csv(run_sweep(map, sw.load_kb(), sw.start_on(map), sweep_cfg)));
  });

  // serve
  int port = 8080;
  std::string plans_dir = "data";
  auto* serve_cmd = app.add_subcommand("serve", "Serve sessions over HTTP");
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--plans-dir", plans_dir)->check(CLI::ExistingDirectory);
  serve_cmd->callback([&] {
    SessionManager::Options opts;
    opts.plans_dir = plans_dir;
    SessionManager manager(opts);
    httplib::Server server;
    register_routes(server, manager);
    std::cout << "listening on port " << port << std::endl;
    if (!server.listen("0.0.0.0", port)) throw Error(ErrorCode::InvalidConfig, "cannot bind port");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  }
  return do_status;
}
