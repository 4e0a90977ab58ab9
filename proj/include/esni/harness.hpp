#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esni/segment.hpp"
#include "esni/world.hpp"

namespace esni {

// How trial seeds relate across step budgets. Shared: trial t uses the same walk at every
// budget, so a larger budget extends the smaller one's run (common random numbers).
// Independent: every (budget, trial) pair draws a fresh walk.
enum class SeedMode { Shared, Independent };

struct SweepConfig {
  int mas_min = 50;
  int mas_max = 2000;
  int mas_step = 50;
  int trials = 20;
  std::uint64_t master_seed = 0;
  double radius = kDefaultPerceptionRadius;
  SeedMode seed_mode = SeedMode::Shared;
  SegmentConfig segment;
  unsigned threads = 0;  // 0: hardware concurrency
};

void validate(const SweepConfig& cfg);

struct SweepRecord {
  int mas = 0;
  double mean_coverage = 0.0;
  double mean_sections_recognized = 0.0;
  double mean_label_accuracy = 0.0;
  int trials = 0;
};

struct TrialMetrics {
  double coverage = 0.0;
  int sections_recognized = 0;
  double label_accuracy = 0.0;
};

// splitmix64 finaliser chained over (master_seed, mas, trial); Shared mode hashes mas as 0.
std::uint64_t trial_seed(std::uint64_t master_seed, int mas, int trial);
std::uint64_t trial_seed(const SweepConfig& cfg, int mas, int trial);

TrialMetrics run_trial(const GridMap& map, const KnowledgeBase& kb, Position start, int mas, double radius,
                       std::uint64_t seed, const SegmentConfig& cfg);

std::vector<SweepRecord> run_sweep(const GridMap& map, const KnowledgeBase& kb, Position start,
                                   const SweepConfig& cfg);

inline constexpr const char* kSweepCsvHeader = "mas,mean_coverage,mean_sections_recognized,mean_label_accuracy,trials";

std::string sweep_csv(const std::vector<SweepRecord>& records);

}  // namespace esni
