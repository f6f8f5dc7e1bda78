#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ihmm/model.hpp"
#include "ihmm/sweep.hpp"

namespace ihmm {

// Dense finite K-state Gaussian HMM for timing: rows ~ Dir(1, ..., 1),
// uniform beta, unit-variance emissions with means spread over [-1, 1] so no
// state's likelihood underflows and every forward message stays dense.
// Trajectory and observations sampled from the model. Finite support, so no
// state is ever created.
struct BenchModel {
  ChainState chain;
  std::vector<double> y;
};

BenchModel make_bench_model(int num_states, int length, std::uint64_t seed);

// Mean wall-clock seconds of one trajectory update (parameters fixed). Runs
// at least `min_sweeps` sweeps and keeps going until `min_seconds` elapsed.
double time_sweeps(const BenchModel& model, const SamplerConfig& cfg, int min_sweeps,
                   double min_seconds, std::uint64_t seed);

struct BenchPoint {
  std::string sampler;
  int num_states = 0;
  int length = 0;
  double seconds = 0.0;
};

// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

inline constexpr std::string_view kBenchSchema = "ihmm-bench/1";
inline constexpr std::string_view kBenchHeader = "sampler,K,T,seconds_per_sweep";

}  // namespace ihmm
