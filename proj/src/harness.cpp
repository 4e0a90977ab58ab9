#include "esni/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include "esni/explore.hpp"

namespace esni {

void validate(const SweepConfig& cfg) {
  if (cfg.mas_min <= 0 || cfg.mas_min > cfg.mas_max)
    throw Error(ErrorCode::InvalidConfig, "need 0 < mas_min <= mas_max");
  if (cfg.mas_step <= 0) throw Error(ErrorCode::InvalidConfig, "mas_step must be positive");
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be at least 1");
  validate(cfg.segment);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, int mas, int trial) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(mas)));
  return splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(trial)));
}

std::uint64_t trial_seed(const SweepConfig& cfg, int mas, int trial) {
  return trial_seed(cfg.master_seed, cfg.seed_mode == SeedMode::Shared ? 0 : mas, trial);
}

TrialMetrics run_trial(const GridMap& map, const KnowledgeBase& kb, Position start, int mas, double radius,
                       std::uint64_t seed, const SegmentConfig& cfg) {
  const auto result = explore(map, start, mas, radius, seed);
  const auto seg = segment(result.memory, result.visited, map, kb, cfg);
  return {coverage(result, map), sections_recognized(seg), label_accuracy(seg, map)};
}

std::vector<SweepRecord> run_sweep(const GridMap& map, const KnowledgeBase& kb, Position start,
                                   const SweepConfig& cfg) {
  validate(cfg);
  std::vector<int> mas_values;
  for (int mas = cfg.mas_min; mas <= cfg.mas_max; mas += cfg.mas_step) mas_values.push_back(mas);

  const std::size_t jobs = mas_values.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<TrialMetrics> metrics(jobs);

  // Each slot is written by exactly one worker; aggregation below runs in (mas, trial) order.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const int mas = mas_values[j / cfg.trials];
      const int trial = static_cast<int>(j % cfg.trials);
      metrics[j] = run_trial(map, kb, start, mas, cfg.radius, trial_seed(cfg, mas, trial), cfg.segment);
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  std::vector<SweepRecord> records;
  records.reserve(mas_values.size());
  for (std::size_t m = 0; m < mas_values.size(); ++m) {
    SweepRecord r{mas_values[m], 0.0, 0.0, 0.0, cfg.trials};
    for (int t = 0; t < cfg.trials; ++t) {
      const auto& tm = metrics[m * cfg.trials + t];
      r.mean_coverage += tm.coverage;
      r.mean_sections_recognized += tm.sections_recognized;
      r.mean_label_accuracy += tm.label_accuracy;
    }
    r.mean_coverage /= cfg.trials;
    r.mean_sections_recognized /= cfg.trials;
    r.mean_label_accuracy /= cfg.trials;
    records.push_back(r);
  }
  return records;
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%d\n", r.mas, r.mean_coverage, r.mean_sections_recognized,
                  r.mean_label_accuracy, r.trials);
    out += buf;
  }
  return out;
}

}  // namespace esni
