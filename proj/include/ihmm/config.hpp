#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ihmm/experiments.hpp"
#include "ihmm/model.hpp"
#include "ihmm/sweep.hpp"

namespace ihmm {

enum class Family { gaussian, discrete };

struct ModelSection {
  Family family = Family::gaussian;
  NigParams nig{0.0, 1.0 / 16.0, 2.0, 0.25};
  // Symmetric Dirichlet concentration per symbol (discrete family).
  double dirichlet = 0.5;
  // 0 means "infer from the data".
  std::size_t alphabet_size = 0;
  Hyperparams hyper;
  int initial_states = 10;
};

struct DataSection {
  std::optional<SyntheticSpec> synthetic;
  std::string path;
  std::string format = "series";  // "series" or "text"
  std::size_t subsample = 1;
  std::optional<std::size_t> truncate;
  // The last `test_length` observations (text: the characters after the
  // training block) are held out from fitting.
  std::size_t test_length = 0;
};

struct RunSection {
  std::int64_t iterations = 1000;
  std::int64_t burn_in = 500;
  std::int64_t thin = 10;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;  // optional grid; overrides `seed`
  std::string out = "run";
  std::int64_t checkpoint_every = 100;
};

struct BenchSection {
  std::vector<int> states{5, 10, 20, 40, 80};
  int length = 500;
  int particles = 10;
  int sweeps = 5;
  std::vector<std::string> samplers{"pg", "beam"};
};

struct ExperimentConfig {
  ModelSection model;
  SamplerConfig sampler;
  DataSection data;
  RunSection run;
  BenchSection bench;
  // Command-line overrides applied on top of the document, by field path.
  std::map<std::string, std::string> overrides;
};

// Parses one JSON document. Unknown keys, wrong types and out-of-range
// values throw ConfigError naming the offending field.
// A missing data section means the four-state synthetic preset with seed 1.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

// Effective configuration as canonical JSON (overrides applied).
std::string config_to_json(const ExperimentConfig& cfg);
// FNV-1a of the canonical JSON, as 16 hex digits.
std::string config_digest(const ExperimentConfig& cfg);

void apply_seed(ExperimentConfig& cfg, std::uint64_t seed);
void apply_out(ExperimentConfig& cfg, const std::string& out);
void apply_sampler(ExperimentConfig& cfg, const std::string& id);
void apply_iterations(ExperimentConfig& cfg, std::int64_t iterations);

struct LoadedData {
  std::vector<double> train;
  std::vector<double> test;
  std::vector<int> states;  // ground truth for synthetic data, training part
  std::string alphabet;     // text data only
};

LoadedData load_data(const DataSection& data);

// Base measure for the configured family; the discrete alphabet comes from
// the model section or, failing that, from the data.
BaseMeasure make_base(const ModelSection& model, const LoadedData& data);

}  // namespace ihmm
