#include "esni/segment.hpp"

#include <algorithm>
#include <limits>

namespace esni {

void validate(const SegmentConfig& cfg) {
  if (!(cfg.occlusion_factor > 1.0)) throw Error(ErrorCode::InvalidConfig, "occlusion factor must exceed 1");
  if (!(cfg.min_sq_distance > 0.0)) throw Error(ErrorCode::InvalidConfig, "distance clamp must be positive");
}

SectionLabel SectionHistogram::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < bins.size(); ++i) {
    if (bins[i] > bins[best]) best = i;
  }
  return kAllSections[best];
}

bool SectionHistogram::all_zero() const {
  return std::all_of(bins.begin(), bins.end(), [](double b) { return b == 0.0; });
}

SectionHistogram& SectionHistogram::operator+=(const SectionHistogram& other) {
  for (std::size_t i = 0; i < bins.size(); ++i) bins[i] += other.bins[i];
  return *this;
}

SectionHistogram bin_contribution(Position cell, const RememberedObject& obj, const KnowledgeBase& kb,
                                  const SegmentConfig& cfg, bool occluded) {
  const auto* entry = kb.find(obj.name);
  if (!entry) throw Error(ErrorCode::UnknownObjectName, "no knowledge about '" + obj.name + "'");
  const double d2 = std::max(static_cast<double>(squared_distance(cell, obj.pos)), cfg.min_sq_distance);
  const double n = occluded ? cfg.occlusion_factor : 1.0;
  SectionHistogram h;
  for (const auto& [section, weight] : entry->weights) h[section] += weight / (n * d2);
  return h;
}

CellClassification classify_cell(Position cell, const ObjectMemory& memory, const KnowledgeBase& kb,
                                 const GridMap& map, const SegmentConfig& cfg) {
  CellClassification out{};
  std::optional<SectionLabel> key_label;
  long key_d2 = std::numeric_limits<long>::max();

  for (const auto& [id, obj] : memory) {
    const auto* entry = kb.find(obj.name);
    if (!entry) continue;
    const bool occluded = line_blocked(map, cell, obj.pos);
    out.histogram += bin_contribution(cell, obj, kb, cfg, occluded);
    if (entry->key && !occluded) {
      const long d2 = squared_distance(cell, obj.pos);
      if (d2 < key_d2 || (d2 == key_d2 && *entry->key < *key_label)) {
        key_d2 = d2;
        key_label = entry->key;
      }
    }
  }

  if (key_label) {
    out.label = *key_label;
    out.key_override = true;
    return out;
  }
  if (out.histogram.all_zero())
    throw Error(ErrorCode::NoEvidence, "no remembered evidence for cell " + to_string(cell));
  out.label = out.histogram.argmax();
  return out;
}

std::set<SectionLabel> Segmentation::sections_present() const {
  std::set<SectionLabel> out;
  for (const auto& l : labels) {
    if (l) out.insert(*l);
  }
  return out;
}

std::size_t Segmentation::labeled_count() const {
  return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); }));
}

Segmentation segment(const ObjectMemory& memory, const std::unordered_set<Position>& visited, const GridMap& map,
                     const KnowledgeBase& kb, const SegmentConfig& cfg) {
  validate(cfg);
  Segmentation seg{LabelGrid(map.width(), map.height()), 0};
  // Row-major sweep keeps the result independent of the visited set's hash order.
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const Position p{x, y};
      if (!map.is_walkable(p) || !visited.contains(p)) continue;
      try {
        seg.labels[p] = classify_cell(p, memory, kb, map, cfg).label;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoEvidence) throw;
        ++seg.no_evidence_cells;
      }
    }
  }
  return seg;
}

int sections_recognized(const Segmentation& seg) { return static_cast<int>(seg.sections_present().size()); }

double label_accuracy(const Segmentation& seg, const GridMap& map) {
  if (!map.ground_truth) return 0.0;
  std::size_t labeled = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < seg.labels.size(); ++i) {
    const Position p = seg.labels.position_of(i);
    if (!seg.labels[p]) continue;
    ++labeled;
    if ((*map.ground_truth)[p] == seg.labels[p]) ++correct;
  }
  return labeled == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(labeled);
}

SectionPair make_pair_sorted(SectionLabel a, SectionLabel b) { return a < b ? SectionPair{a, b} : SectionPair{b, a}; }

std::vector<BoundaryPoint> boundary_points(const LabelGrid& labels) {
  std::vector<BoundaryPoint> out;
  static constexpr Position kOffsets[] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}};
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const Position p{x, y};
      const auto& own = labels[p];
      if (!own) continue;
      std::set<SectionLabel> others;
      for (Position d : kOffsets) {
        const Position n{x + d.x, y + d.y};
        if (!labels.in_bounds(n)) continue;
        if (const auto& other = labels[n]; other && *other != *own) others.insert(*other);
      }
      // std::set iterates in label order, which is also pair order for a fixed own label.
      std::vector<SectionPair> pairs;
      for (auto s : others) pairs.push_back(make_pair_sorted(*own, s));
      std::sort(pairs.begin(), pairs.end());
      for (const auto& pr : pairs) out.push_back({p, pr});
    }
  }
  return out;
}

std::vector<SectionLabel> SectionGraph::neighbors(SectionLabel s) const {
  std::vector<SectionLabel> out;
  for (const auto& [pr, pts] : edges) {
    if (pr.first == s) out.push_back(pr.second);
    if (pr.second == s) out.push_back(pr.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const std::vector<BoundaryPoint>& SectionGraph::boundaries(SectionLabel a, SectionLabel b) const {
  static const std::vector<BoundaryPoint> kNone;
  auto it = edges.find(make_pair_sorted(a, b));
  return it == edges.end() ? kNone : it->second;
}

SectionGraph build_section_graph(const LabelGrid& labels) {
  SectionGraph g;
  for (const auto& l : labels) {
    if (l) g.nodes.insert(*l);
  }
  for (const auto& bp : boundary_points(labels)) g.edges[bp.sections].push_back(bp);
  return g;
}

std::string format_labels(const LabelGrid& labels) {
  std::string out;
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const auto& l = labels[{x, y}];
      out += l ? section_letter(*l) : '.';
    }
    out += '\n';
  }
  return out;
}

}  // namespace esni
