#pragma once

#include <array>
#include <map>
#include <set>
#include <unordered_set>
#include <utility>
#include <vector>

#include "esni/explore.hpp"
#include "esni/world.hpp"

namespace esni {

struct SegmentConfig {
  double occlusion_factor = 10.0;  // N: divisor for evidence seen through walls, must exceed 1
  double min_sq_distance = 1.0;    // clamp on d^2 so an object on the cell itself stays finite
};

void validate(const SegmentConfig& cfg);

struct SectionHistogram {
  std::array<double, kSectionCount> bins{};

  double& operator[](SectionLabel s) { return bins[index_of(s)]; }
  double operator[](SectionLabel s) const { return bins[index_of(s)]; }

  // Highest bin; equal bins resolve to the earliest section in declaration order.
  SectionLabel argmax() const;
  bool all_zero() const;

  SectionHistogram& operator+=(const SectionHistogram& other);
  friend bool operator==(const SectionHistogram&, const SectionHistogram&) = default;
};

// Evidence one remembered object adds to each bin of `cell`: weight / (n * max(d^2, clamp)),
// n = N when the line to the object is blocked, 1 otherwise.
SectionHistogram bin_contribution(Position cell, const RememberedObject& obj, const KnowledgeBase& kb,
                                  const SegmentConfig& cfg, bool occluded);

struct CellClassification {
  SectionLabel label;
  SectionHistogram histogram;
  bool key_override = false;
};

// A visible key object decides the cell outright (nearest one first); otherwise the
// histogram vote over every remembered object decides.
CellClassification classify_cell(Position cell, const ObjectMemory& memory, const KnowledgeBase& kb,
                                 const GridMap& map, const SegmentConfig& cfg);

struct Segmentation {
  LabelGrid labels;
  std::size_t no_evidence_cells = 0;  // visited cells left unlabeled for lack of evidence

  std::set<SectionLabel> sections_present() const;
  std::size_t labeled_count() const;
};

Segmentation segment(const ObjectMemory& memory, const std::unordered_set<Position>& visited, const GridMap& map,
                     const KnowledgeBase& kb, const SegmentConfig& cfg);

// Number of distinct labels in the segmentation.
int sections_recognized(const Segmentation& seg);

// Fraction of labeled cells whose label matches the map's ground truth.
double label_accuracy(const Segmentation& seg, const GridMap& map);

using SectionPair = std::pair<SectionLabel, SectionLabel>;  // always first < second

SectionPair make_pair_sorted(SectionLabel a, SectionLabel b);

struct BoundaryPoint {
  Position pos;
  SectionPair sections;

  friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;
};

// Labeled cells with a 4-neighbour of a different label, one entry per (cell, other
// section), sorted by (y, x, section pair).
std::vector<BoundaryPoint> boundary_points(const LabelGrid& labels);

struct SectionGraph {
  std::set<SectionLabel> nodes;
  std::map<SectionPair, std::vector<BoundaryPoint>> edges;

  bool adjacent(SectionLabel a, SectionLabel b) const { return edges.contains(make_pair_sorted(a, b)); }
  std::vector<SectionLabel> neighbors(SectionLabel s) const;
  const std::vector<BoundaryPoint>& boundaries(SectionLabel a, SectionLabel b) const;
};

SectionGraph build_section_graph(const LabelGrid& labels);

// Printable label grid: one letter per cell, '.' for unlabeled.
std::string format_labels(const LabelGrid& labels);

}  // namespace esni
