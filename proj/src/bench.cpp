#include "ihmm/bench.hpp"

#include <chrono>
#include <cmath>

#include "ihmm/error.hpp"

namespace ihmm {

BenchModel make_bench_model(int num_states, int length, std::uint64_t seed) {
  if (num_states < 1 || length < 1) throw ParameterError("bench model needs K >= 1 and T >= 1");
  Rng rng(seed);
  BenchModel m;
  auto& c = m.chain;
  c.finite = true;
  c.emissions.base = NigParams{0.0, 1.0 / 16.0, 2.0, 0.25};
  c.shared.beta.assign(num_states, 1.0 / num_states);
  c.shared.remainder = 0.0;
  const std::vector<double> ones(num_states, 1.0);
  for (int j = 0; j < num_states; ++j) {
    auto row = sample_dirichlet(std::span<const double>(ones), rng);
    row.push_back(0.0);
    c.transitions.rows.push_back(std::move(row));
    const double mean = num_states == 1 ? 0.0 : 2.0 * j / (num_states - 1) - 1.0;
    c.emissions.phi.push_back(GaussianParam{mean, 1.0});
  }
  auto [states, obs] = sample_sequence(c, length, rng);
  c.trajectory = std::move(states);
  m.y = std::move(obs);
  return m;
}

double time_sweeps(const BenchModel& model, const SamplerConfig& cfg, int min_sweeps,
                   double min_seconds, std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  Rng rng(seed);
  ChainState chain = model.chain;
  // One untimed sweep warms caches and allocations.
  update_trajectory(chain, model.y, cfg, rng);
  int sweeps = 0;
  const auto start = clock::now();
  double elapsed = 0.0;
  while (sweeps < min_sweeps || elapsed < min_seconds) {
    update_trajectory(chain, model.y, cfg, rng);
    ++sweeps;
    elapsed = std::chrono::duration<double>(clock::now() - start).count();
  }
  return elapsed / sweeps;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ParameterError("slope needs at least two matching points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("slope needs positive values");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw ParameterError("slope needs at least two distinct x values");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace ihmm
