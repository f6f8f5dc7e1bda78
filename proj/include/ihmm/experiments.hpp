#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ihmm/model.hpp"

namespace ihmm {

// Finite HMM with self-transition probability `self_prob` and the rest
// spread uniformly over the other states; uniform initial state.
struct SyntheticSpec {
  int num_states = 4;
  int length = 4000;
  double self_prob = 0.75;
  // Gaussian emissions: one mean per state and a shared standard deviation.
  std::vector<double> means;
  double stddev = 0.5;
  // Discrete emissions instead, when non-empty: one probability row per state.
  std::vector<std::vector<double>> emission_probs;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  std::vector<double> observations;
  std::vector<int> states;
};

void validate(const SyntheticSpec& spec);
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// The two Gaussian configurations of the convergence experiments.
SyntheticSpec four_state_spec(std::uint64_t seed);
SyntheticSpec ten_state_spec(std::uint64_t seed);

// Every `subsample`-th point, the first `truncate` of those, natural log,
// then standardized to mean 0 and unit standard deviation.
std::vector<double> ingest_timeseries(std::span<const double> raw, std::size_t subsample,
                                      std::optional<std::size_t> truncate = std::nullopt);

struct TextData {
  std::vector<double> train;
  std::vector<double> test;
  std::string alphabet;  // symbol i is alphabet[i]

  std::string decode(std::span<const double> symbols) const;
};

// Alphabet from the distinct characters of the whole text (sorted); the
// first train_len characters train, the next test_len test.
TextData ingest_text(std::string_view text, std::size_t train_len, std::size_t test_len);

// log p(y | sample) by forward filtering over the sample's active states plus
// one absorbing pseudo-state that carries every row's remainder and emits
// through the prior predictive. Initial distribution is beta.
double log_predictive(const ChainState& sample, std::span<const double> y);

struct PredictiveReport {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t samples = 0;
};

PredictiveReport predictive_log_likelihood(std::span<const ChainState> samples,
                                           std::span<const double> y_test);

struct Diagnostics {
  int active_states = 0;
  double joint_log_likelihood = 0.0;
};

Diagnostics diagnostics(const ChainState& chain, std::span<const double> y);

struct TraceRow {
  std::int64_t iteration = 0;
  int active_states = 0;
  double jll = 0.0;
  double seconds = 0.0;
};

struct RunRecord {
  std::vector<TraceRow> rows;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string sampler;
};

inline constexpr std::string_view kTraceSchema = "ihmm-trace/1";
inline constexpr std::string_view kTraceHeader = "iteration,K_active,jll,seconds";

void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, const TraceRow& row);
std::vector<TraceRow> read_trace(std::istream& in);

// Single-column numeric text, one value per line; blank lines and lines
// starting with '#' are skipped.
std::vector<double> read_series(const std::string& path);
void write_series(const std::string& path, std::span<const double> values);
void write_states(const std::string& path, std::span<const int> states);

}  // namespace ihmm
