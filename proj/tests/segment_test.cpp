#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "esni/segment.hpp"
#include "test_support.hpp"

using namespace esni;
using esni::testing::grid_from_rows;
using esni::testing::labels_from_rows;

namespace {

const KnowledgeBase& kb() {
  static const KnowledgeBase k = esni::testing::bundled_knowledge();
  return k;
}

ObjectMemory remember(std::initializer_list<RememberedObject> objects) {
  ObjectMemory m;
  for (const auto& o : objects) m.observe({o.id, o.name, o.pos, true, std::nullopt});
  return m;
}

struct FullRun {
  GridMap map;
  ExplorationResult exploration;
  Segmentation seg;
};

const FullRun& full_run() {
  static const FullRun run = [] {
    FullRun r{esni::testing::bundled_plan(), {}, {}};
    r.exploration = explore(r.map, default_start(r.map), 6000, kDefaultPerceptionRadius, 1);
    r.seg = segment(r.exploration.memory, r.exploration.visited, r.map, kb(), {});
    return r;
  }();
  return run;
}

}  // namespace

TEST(BinContribution, HandEvaluatedExamples) {
  const RememberedObject toilet{1, "toilet", {4, 3}};
  const SegmentConfig cfg;
  EXPECT_DOUBLE_EQ(bin_contribution({2, 2}, toilet, kb(), cfg, false)[SectionLabel::Bathroom], 0.2);
  EXPECT_DOUBLE_EQ(bin_contribution({2, 2}, toilet, kb(), cfg, true)[SectionLabel::Bathroom], 0.02);
  EXPECT_DOUBLE_EQ(bin_contribution({4, 3}, toilet, kb(), cfg, false)[SectionLabel::Bathroom], 1.0);
  EXPECT_DOUBLE_EQ(bin_contribution({2, 2}, toilet, kb(), cfg, false)[SectionLabel::Kitchen], 0.0);
}

TEST(BinContribution, UnknownNameIsAnError) {
  EXPECT_THROW(bin_contribution({0, 0}, {1, "spaceship", {1, 1}}, kb(), {}, false), Error);
}

TEST(BinContribution, OcclusionDividesByN) {
  std::mt19937_64 rng(8);
  for (double n : {1.5, 10.0, 37.0}) {
    SegmentConfig cfg;
    cfg.occlusion_factor = n;
    for (int k = 0; k < 200; ++k) {
      const Position cell{static_cast<int>(rng() % 20), static_cast<int>(rng() % 20)};
      auto it = kb().entries.begin();
      std::advance(it, rng() % kb().entries.size());
      const RememberedObject obj{1, it->first, {static_cast<int>(rng() % 20), static_cast<int>(rng() % 20)}};
      const auto clear = bin_contribution(cell, obj, kb(), cfg, false);
      const auto occluded = bin_contribution(cell, obj, kb(), cfg, true);
      for (auto s : kAllSections) {
        if (clear[s] == 0.0) {
          EXPECT_EQ(occluded[s], 0.0);
        } else {
          EXPECT_DOUBLE_EQ(clear[s] / occluded[s], n);
        }
      }
    }
  }
}

TEST(SegmentConfig, RejectsNonAttenuatingFactor) {
  SegmentConfig cfg;
  cfg.occlusion_factor = 1.0;
  EXPECT_THROW(validate(cfg), Error);
}

TEST(ClassifyCell, VisibleToiletDecidesRegardlessOfOtherEvidence) {
  const auto map = grid_from_rows({"........", "........", "........"});
  const auto memory = remember({{1, "toilet", {7, 2}},
                                {2, "fridge", {0, 0}},
                                {3, "utensils", {1, 0}},
                                {4, "apple", {0, 1}},
                                {5, "banana", {1, 1}}});
  const auto c = classify_cell({0, 0}, memory, kb(), map, {});
  EXPECT_EQ(c.label, SectionLabel::Bathroom);
  EXPECT_TRUE(c.key_override);
  EXPECT_GT(c.histogram[SectionLabel::Kitchen], c.histogram[SectionLabel::Bathroom]);
}

TEST(ClassifyCell, SingleBedAccumulation) {
  const auto map = grid_from_rows({".....", ".....", "....."});
  auto plain = kb();
  plain.entries["bed"].key.reset();
  const auto c = classify_cell({0, 0}, remember({{1, "bed", {2, 0}}}), plain, map, {});
  EXPECT_EQ(c.label, SectionLabel::Bedroom);
  EXPECT_FALSE(c.key_override);
  SectionHistogram expected;
  expected[SectionLabel::Bedroom] = 0.25;
  EXPECT_EQ(c.histogram, expected);
}

TEST(ClassifyCell, EmptyMemoryHasNoEvidence) {
  const auto map = grid_from_rows({"..."});
  try {
    classify_cell({0, 0}, {}, kb(), map, {});
    FAIL() << "expected NoEvidence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoEvidence);
  }
}

TEST(ClassifyCell, HiddenKeyObjectOnlyVotes) {
  const auto map = grid_from_rows({"..#..", "..#..", "....."});
  const auto memory = remember({{1, "toilet", {3, 0}}, {2, "sofa", {0, 1}}});
  const auto c = classify_cell({0, 0}, memory, kb(), map, {});
  EXPECT_FALSE(c.key_override);
  EXPECT_EQ(c.label, SectionLabel::LivingRoom);
}

TEST(ClassifyCell, ArgmaxTiesResolveInDeclarationOrder) {
  SectionHistogram h;
  h[SectionLabel::Balcony] = 0.5;
  h[SectionLabel::Studio] = 0.5;
  EXPECT_EQ(h.argmax(), SectionLabel::Studio);
}

TEST(ClassifyCell, ScaledWeightsKeepLabels) {
  const auto& run = full_run();
  std::mt19937_64 rng(21);
  std::vector<Position> cells(run.exploration.visited.begin(), run.exploration.visited.end());
  std::sort(cells.begin(), cells.end());
  for (double factor : {0.5, 0.01, 3.0}) {
    auto scaled = kb();
    for (auto& [name, entry] : scaled.entries) {
      for (auto& [s, w] : entry.weights) w *= factor;
    }
    for (int k = 0; k < 100; ++k) {
      const Position p = cells[rng() % cells.size()];
      EXPECT_EQ(classify_cell(p, run.exploration.memory, kb(), run.map, {}).label,
                classify_cell(p, run.exploration.memory, scaled, run.map, {}).label)
          << to_string(p);
    }
  }
}

TEST(Segment, TwoRoomFixtureFollowsKeyObjects) {
  // Left room holds the toilet, right room the bed; one gap joins them. A towel in the
  // bedroom would pull nearby cells towards Bathroom without the key rule.
  auto map = grid_from_rows({"#########",
                             "#...#...#",
                             "#.......#",
                             "#...#...#",
                             "#########"});
  const auto memory = remember({{1, "toilet", {1, 1}}, {2, "bed", {7, 3}}, {3, "towel", {5, 1}}, {4, "towel", {6, 1}}});
  std::unordered_set<Position> all;
  for (std::size_t i = 0; i < map.walkable.size(); ++i) {
    if (map.walkable[map.walkable.position_of(i)]) all.insert(map.walkable.position_of(i));
  }
  const auto seg = segment(memory, all, map, kb(), {});

  // Every cell is labeled by its nearest visible key object, ties in label order.
  for (Position p : all) {
    std::optional<SectionLabel> expected;
    long best = -1;
    for (const auto& [id, o] : memory) {
      const auto key = kb().find(o.name)->key;
      if (!key || line_blocked(map, p, o.pos)) continue;
      const long d2 = squared_distance(p, o.pos);
      if (best < 0 || d2 < best || (d2 == best && *key < *expected)) best = d2, expected = key;
    }
    ASSERT_TRUE(expected.has_value()) << to_string(p);
    EXPECT_EQ(seg.labels[p], expected) << to_string(p);
  }
  for (int y = 1; y <= 3; ++y) {
    for (int x = 1; x <= 3; ++x) EXPECT_EQ(seg.labels[(Position{x, y})], SectionLabel::Bathroom);
    for (int x = 5; x <= 7; ++x) EXPECT_EQ(seg.labels[(Position{x, y})], SectionLabel::Bedroom);
  }
}

TEST(Segment, OnlyVisitedCellsAreLabeled) {
  const auto& run = full_run();
  const auto* bed = run.map.find_object("bed");
  Position near = bed->pos;
  for (Position d : {Position{0, 1}, Position{0, -1}, Position{1, 0}, Position{-1, 0}}) {
    if (run.map.is_walkable({bed->pos.x + d.x, bed->pos.y + d.y})) near = {bed->pos.x + d.x, bed->pos.y + d.y};
  }
  const auto seg = segment(run.exploration.memory, {near}, run.map, kb(), {});
  EXPECT_EQ(seg.labeled_count(), 1u);
  EXPECT_EQ(seg.labels[near], SectionLabel::Bedroom);
}

TEST(Segment, FullyExploredBundledPlanHasAllSections) {
  const auto& run = full_run();
  EXPECT_EQ(coverage(run.exploration, run.map), 1.0);
  EXPECT_EQ(sections_recognized(run.seg), 6);
  EXPECT_GT(label_accuracy(run.seg, run.map), 0.9);
  for (std::size_t i = 0; i < run.seg.labels.size(); ++i) {
    const Position p = run.seg.labels.position_of(i);
    if (run.seg.labels[p]) EXPECT_TRUE(run.map.is_walkable(p));
  }
}

TEST(Segment, IndependentOfObservationOrder) {
  const auto& run = full_run();
  std::vector<RememberedObject> objects;
  for (const auto& [id, o] : run.exploration.memory) objects.push_back(o);
  std::reverse(objects.begin(), objects.end());
  ObjectMemory reversed;
  for (const auto& o : objects) reversed.observe({o.id, o.name, o.pos, true, std::nullopt});
  const auto again = segment(reversed, run.exploration.visited, run.map, kb(), {});
  EXPECT_EQ(again.labels, run.seg.labels);
}

TEST(BoundaryPoints, Examples) {
  EXPECT_TRUE(boundary_points(labels_from_rows({"KKK", "KKK", "KKK"})).empty());
  const auto split = boundary_points(labels_from_rows({"KS", "KS"}));
  ASSERT_EQ(split.size(), 4u);
  for (const auto& bp : split) EXPECT_EQ(bp.sections, (SectionPair{SectionLabel::Kitchen, SectionLabel::Studio}));
  EXPECT_TRUE(boundary_points(labels_from_rows({"K.", ".S"})).empty());
}

TEST(BoundaryPoints, MatchBruteForceDefinition) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const auto labels = esni::testing::random_labels(rng);
    ASSERT_EQ(boundary_points(labels), esni::testing::brute_force_boundaries(labels)) << format_labels(labels);
  }
}

TEST(SectionGraph, Examples) {
  const auto single = build_section_graph(labels_from_rows({"BB", "BB"}));
  EXPECT_EQ(single.nodes.size(), 1u);
  EXPECT_TRUE(single.edges.empty());
  const auto islands = build_section_graph(labels_from_rows({"K..", "...", "..T"}));
  EXPECT_EQ(islands.nodes.size(), 2u);
  EXPECT_TRUE(islands.edges.empty());
}

TEST(SectionGraph, SymmetricWithNonEmptyBoundaries) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = build_section_graph(esni::testing::random_labels(rng));
    for (const auto& [pr, pts] : g.edges) {
      EXPECT_LT(pr.first, pr.second);
      EXPECT_FALSE(pts.empty());
      EXPECT_TRUE(g.adjacent(pr.second, pr.first));
      const auto n = g.neighbors(pr.second);
      EXPECT_NE(std::find(n.begin(), n.end(), pr.first), n.end());
    }
  }
}

TEST(SectionGraph, BundledPlanEdges) {
  using S = SectionLabel;
  const std::set<SectionPair> expected{make_pair_sorted(S::Balcony, S::Bedroom),  make_pair_sorted(S::Balcony, S::Studio),
                                       make_pair_sorted(S::Studio, S::Bedroom),   make_pair_sorted(S::Studio, S::Kitchen),
                                       make_pair_sorted(S::Kitchen, S::LivingRoom), make_pair_sorted(S::Bedroom, S::Bathroom)};
  auto edge_set = [](const SectionGraph& g) {
    std::set<SectionPair> out;
    for (const auto& [pr, pts] : g.edges) out.insert(pr);
    return out;
  };
  EXPECT_EQ(edge_set(build_section_graph(*full_run().map.ground_truth)), expected);
  EXPECT_EQ(edge_set(build_section_graph(full_run().seg.labels)), expected);
}
