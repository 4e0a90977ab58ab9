#include "esni/world.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace esni {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

[[noreturn]] void plan_error(ErrorCode code, std::size_t line_no, const std::string& msg) {
  throw Error(code, "plan line " + std::to_string(line_no + 1) + ": " + msg);
}

bool is_blank(std::string_view line) { return split_ws(line).empty(); }

}  // namespace

std::size_t GridMap::walkable_count() const {
  return static_cast<std::size_t>(std::count(walkable.begin(), walkable.end(), std::uint8_t{1}));
}

const WorldObject* GridMap::find_object(int id) const {
  auto it = std::find_if(objects.begin(), objects.end(), [&](const auto& o) { return o.id == id; });
  return it == objects.end() ? nullptr : &*it;
}

const WorldObject* GridMap::find_object(std::string_view name) const {
  auto it = std::find_if(objects.begin(), objects.end(), [&](const auto& o) { return o.name == name; });
  return it == objects.end() ? nullptr : &*it;
}

GridMap parse_plan(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t i = 0;

  std::vector<std::string_view> rows;
  for (; i < lines.size() && lines[i] != "---"; ++i) {
    if (is_blank(lines[i])) continue;
    if (!rows.empty() && lines[i].size() != rows.front().size())
      plan_error(ErrorCode::MalformedPlan, i, "ragged grid row");
    for (char c : lines[i]) {
      if (c != '.' && c != '#')
        plan_error(ErrorCode::UnknownCellChar, i, std::string("unknown cell character '") + c + "'");
    }
    rows.push_back(lines[i]);
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyMap, "plan has no grid rows");

  GridMap map;
  const int width = static_cast<int>(rows.front().size());
  const int height = static_cast<int>(rows.size());
  map.walkable = Grid<std::uint8_t>(width, height, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) map.walkable[{x, y}] = rows[y][x] == '.' ? 1 : 0;
  }
  if (map.walkable_count() == 0) throw Error(ErrorCode::EmptyMap, "plan has no walkable cell");

  if (i < lines.size()) ++i;  // skip ---
  std::set<int> ids;
  for (; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    if (lines[i] == "sections:") break;
    const auto fields = split_ws(lines[i]);
    if (fields.size() != 5 && fields.size() != 6)
      plan_error(ErrorCode::MalformedPlan, i, "expected `id name x y movable [section]`");
    WorldObject obj;
    auto id = parse_number<int>(fields[0]);
    auto x = parse_number<int>(fields[2]);
    auto y = parse_number<int>(fields[3]);
    if (!id || !x || !y || (fields[4] != "0" && fields[4] != "1"))
      plan_error(ErrorCode::MalformedPlan, i, "bad numeric field");
    obj.id = *id;
    obj.name = std::string(fields[1]);
    obj.pos = {*x, *y};
    obj.movable = fields[4] == "1";
    if (fields.size() == 6) {
      obj.section = parse_section(fields[5]);
      if (!obj.section) plan_error(ErrorCode::MalformedPlan, i, "unknown section '" + std::string(fields[5]) + "'");
    }
    if (!map.in_bounds(obj.pos))
      plan_error(ErrorCode::ObjectOutOfBounds, i, "object '" + obj.name + "' out of bounds");
    if (obj.movable && !map.is_walkable(obj.pos))
      plan_error(ErrorCode::ObjectOnWall, i, "movable object '" + obj.name + "' on a non-walkable cell");
    if (!ids.insert(obj.id).second)
      plan_error(ErrorCode::DuplicateObjectId, i, "duplicate object id " + std::to_string(obj.id));
    map.objects.push_back(std::move(obj));
  }

  if (i < lines.size() && lines[i] == "sections:") {
    ++i;
    LabelGrid labels(width, height);
    int y = 0;
    for (; i < lines.size(); ++i) {
      if (is_blank(lines[i])) continue;
      if (y >= height) plan_error(ErrorCode::MalformedPlan, i, "too many section rows");
      if (static_cast<int>(lines[i].size()) != width)
        plan_error(ErrorCode::MalformedPlan, i, "section row width mismatch");
      for (int x = 0; x < width; ++x) {
        const char c = lines[i][x];
        if (c == '.') continue;
        auto s = section_from_letter(c);
        if (!s) plan_error(ErrorCode::UnknownCellChar, i, std::string("unknown section letter '") + c + "'");
        if (!map.is_walkable({x, y}))
          plan_error(ErrorCode::MalformedPlan, i, "section label on a non-walkable cell");
        labels[{x, y}] = s;
      }
      ++y;
    }
    if (y != height) throw Error(ErrorCode::MalformedPlan, "sections block must have one row per grid row");
    map.ground_truth = std::move(labels);
  }
  return map;
}

std::string serialize_plan(const GridMap& map) {
  std::string out;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) out += map.walkable[{x, y}] ? '.' : '#';
    out += '\n';
  }
  out += "---\n";
  for (const auto& o : map.objects) {
    out += std::to_string(o.id) + ' ' + o.name + ' ' + std::to_string(o.pos.x) + ' ' +
           std::to_string(o.pos.y) + ' ' + (o.movable ? '1' : '0');
    if (o.section) {
      out += ' ';
      out += section_name(*o.section);
    }
    out += '\n';
  }
  if (map.ground_truth) {
    out += "sections:\n";
    const auto& gt = *map.ground_truth;
    for (int y = 0; y < gt.height(); ++y) {
      for (int x = 0; x < gt.width(); ++x) {
        const auto& s = gt[{x, y}];
        out += s ? section_letter(*s) : '.';
      }
      out += '\n';
    }
  }
  return out;
}

KnowledgeBase parse_knowledge(std::string_view text) {
  KnowledgeBase kb;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = split_ws(lines[i]);
    if (fields.empty() || fields[0].front() == '#') continue;
    auto fail = [&](const std::string& msg) {
      throw Error(ErrorCode::MalformedKnowledge, "knowledge line " + std::to_string(i + 1) + ": " + msg);
    };
    if (fields.size() != 3) fail("expected `name key_section|- section:weight[,...]`");
    KnowledgeEntry entry;
    if (fields[1] != "-") {
      entry.key = parse_section(fields[1]);
      if (!entry.key) fail("unknown key section");
    }
    std::string_view rest = fields[2];
    double total = 0.0;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      auto colon = item.find(':');
      if (colon == std::string_view::npos) fail("expected section:weight");
      auto section = parse_section(item.substr(0, colon));
      auto weight_text = std::string(item.substr(colon + 1));
      char* end = nullptr;
      const double weight = std::strtod(weight_text.c_str(), &end);
      if (!section || end != weight_text.c_str() + weight_text.size() || !(weight > 0.0) || weight > 1.0)
        fail("bad section weight '" + std::string(item) + "'");
      entry.weights.emplace_back(*section, weight);
      total += weight;
    }
    if (entry.weights.empty()) fail("no section weights");
    if (total > 1.0 + 1e-9) fail("weights sum above 1");
    if (entry.key) {
      auto it = std::find_if(entry.weights.begin(), entry.weights.end(),
                             [&](const auto& w) { return w.first == *entry.key; });
      if (it == entry.weights.end() || it->second != 1.0) fail("key section must carry weight 1.0");
    }
    if (!kb.entries.emplace(std::string(fields[0]), std::move(entry)).second) fail("duplicate object name");
  }
  return kb;
}

std::string serialize_knowledge(const KnowledgeBase& kb) {
  std::ostringstream out;
  for (const auto& [name, entry] : kb.entries) {
    out << name << ' ' << (entry.key ? std::string(section_name(*entry.key)) : "-") << ' ';
    for (std::size_t k = 0; k < entry.weights.size(); ++k) {
      if (k) out << ',';
      out << section_name(entry.weights[k].first) << ':' << entry.weights[k].second;
    }
    out << '\n';
  }
  return out.str();
}

GridMap sample_objects(const GridMap& map, const KnowledgeBase& kb, std::uint64_t seed) {
  if (!map.ground_truth) throw Error(ErrorCode::InvalidConfig, "sample_objects needs ground-truth sections");
  if (kb.empty()) throw Error(ErrorCode::InvalidConfig, "sample_objects needs a nonempty knowledge base");

  GridMap out = map;
  std::mt19937_64 rng(seed);
  std::set<Position> occupied;
  int next_id = 0;
  for (const auto& o : out.objects) {
    occupied.insert(o.pos);
    next_id = std::max(next_id, o.id + 1);
  }

  const auto& gt = *map.ground_truth;
  for (const auto& [name, entry] : kb.entries) {
    double total = 0.0;
    for (const auto& [s, w] : entry.weights) total += w;
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    SectionLabel chosen = entry.weights.back().first;
    for (const auto& [s, w] : entry.weights) {
      if (u < w) {
        chosen = s;
        break;
      }
      u -= w;
    }

    std::vector<Position> candidates;
    for (int y = 0; y < map.height(); ++y) {
      for (int x = 0; x < map.width(); ++x) {
        const Position p{x, y};
        if (map.is_walkable(p) && gt[p] == chosen && !occupied.contains(p)) candidates.push_back(p);
      }
    }
    if (candidates.empty())
      throw Error(ErrorCode::NoCellInSection,
                  "no free cell in " + std::string(section_name(chosen)) + " for '" + name + "'");
    const auto pick = std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng);
    occupied.insert(candidates[pick]);
    out.objects.push_back({next_id++, name, candidates[pick], true, chosen});
  }
  return out;
}

std::vector<Position> traced_cells(Position a, Position b) {
  // Walk the segment between cell centres. Crossing a vertical grid line happens at
  // parameter (1 + 2i) / (2 nx), a horizontal one at (1 + 2j) / (2 ny); comparing the
  // cross-multiplied numerators keeps everything in integers. A tie is an exact corner,
  // where the walk steps diagonally without entering either side cell.
  std::vector<Position> cells;
  const int nx = std::abs(b.x - a.x);
  const int ny = std::abs(b.y - a.y);
  const int sx = b.x > a.x ? 1 : -1;
  const int sy = b.y > a.y ? 1 : -1;
  Position p = a;
  int ix = 0;
  int iy = 0;
  while (ix < nx || iy < ny) {
    const long lhs = static_cast<long>(1 + 2 * ix) * ny;
    const long rhs = static_cast<long>(1 + 2 * iy) * nx;
    if (iy >= ny || (ix < nx && lhs < rhs)) {
      p.x += sx;
      ++ix;
    } else if (ix >= nx || lhs > rhs) {
      p.y += sy;
      ++iy;
    } else {
      p.x += sx;
      p.y += sy;
      ++ix;
      ++iy;
    }
    if (p != b) cells.push_back(p);
  }
  return cells;
}

bool line_blocked(const GridMap& map, Position a, Position b) {
  for (Position p : traced_cells(a, b)) {
    if (!map.is_walkable(p)) return true;
  }
  return false;
}

std::vector<WorldObject> perceive(const GridMap& map, Position pos, double radius) {
  std::vector<std::pair<long, const WorldObject*>> seen;
  const double r2 = radius * radius;
  for (const auto& o : map.objects) {
    const long d2 = squared_distance(pos, o.pos);
    if (static_cast<double>(d2) <= r2 && !line_blocked(map, pos, o.pos)) seen.emplace_back(d2, &o);
  }
  std::sort(seen.begin(), seen.end(), [](const auto& l, const auto& r) {
    return l.first != r.first ? l.first < r.first : l.second->id < r.second->id;
  });
  std::vector<WorldObject> out;
  out.reserve(seen.size());
  for (const auto& [d2, o] : seen) out.push_back(*o);
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace esni
