#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ihmm/bench.hpp"
#include "ihmm/config.hpp"
#include "ihmm/experiments.hpp"

namespace ihmm {

// Writes observations.txt (one value per line), states.txt for synthetic
// data, test.txt when a held-out block is configured, and data.json with
// the schema and provenance.
void cmd_generate(const ExperimentConfig& cfg, const std::string& out_dir);

struct FitSummary {
  std::int64_t first_iteration = 0;
  std::int64_t last_iteration = 0;
  std::size_t samples_written = 0;
};

// Runs the configured sampler into out_dir: trace.csv (flushed every
// iteration), run.json, checkpoint.json (periodic and final) and
// samples/sample-NNNNNN.json every `thin` iterations after burn-in. With
// `resume`, continues from that checkpoint; trace rows past the checkpoint
// are dropped first so the numbering has no gaps or repeats.
FitSummary cmd_fit(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& out_dir,
                   const std::optional<std::string>& resume = std::nullopt);

struct BenchReport {
  std::vector<BenchPoint> points;
  std::vector<std::pair<std::string, double>> slopes;         // per sampler
  std::vector<std::pair<std::string, double>> doubling_ratios;  // time(2T) / time(T)
};

// Timed sweeps over the configured K grid; writes bench.csv and bench.json
// when out_dir is non-empty.
BenchReport cmd_bench(const ExperimentConfig& cfg, const std::string& out_dir);

// Expands a shell-style pattern; sorted.
std::vector<std::string> expand_glob(const std::string& pattern);

// Predictive report over the checkpoints matching `pattern`, against the
// series at `test_path` or, when empty, the configured held-out block.
PredictiveReport cmd_eval(const ExperimentConfig& cfg, const std::string& pattern,
                          const std::string& test_path);

std::string report_to_json(const PredictiveReport& report);

}  // namespace ihmm
