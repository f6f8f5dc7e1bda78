#include "ihmm/sweep.hpp"

#include "ihmm/baselines.hpp"
#include "ihmm/error.hpp"
#include "ihmm/hyper.hpp"

namespace ihmm {

std::string_view to_string(SamplerId id) {
  switch (id) {
    case SamplerId::pg:
      return "pg";
    case SamplerId::pg_as:
      return "pg-as";
    case SamplerId::beam:
      return "beam";
    case SamplerId::gibbs:
      return "gibbs";
  }
  return "unknown";
}

std::optional<SamplerId> parse_sampler(std::string_view name) {
  if (name == "pg") return SamplerId::pg;
  if (name == "pg-as") return SamplerId::pg_as;
  if (name == "beam") return SamplerId::beam;
  if (name == "gibbs") return SamplerId::gibbs;
  return std::nullopt;
}

void update_trajectory(ChainState& chain, std::span<const double> y, const SamplerConfig& cfg,
                       Rng& rng) {
  switch (cfg.id) {
    case SamplerId::pg:
    case SamplerId::pg_as: {
      SweepConfig sweep{cfg.particles, cfg.id == SamplerId::pg_as, cfg.proposal};
      chain.trajectory = pg_sweep(chain, y, sweep, rng);
      break;
    }
    case SamplerId::beam:
      chain.trajectory = beam_sweep(chain, y, rng);
      break;
    case SamplerId::gibbs:
      chain.trajectory = gibbs_sweep(chain, y, rng);
      break;
  }
}

void resample_parameters(ChainState& chain, std::span<const double> y, bool hypers, Rng& rng) {
  prune_inactive(chain);
  const int k = chain.num_states();
  const auto counts = count_transitions(chain.trajectory, k);
  const auto tables = resample_tables(counts, chain.shared, chain.hyper, rng);
  if (hypers) chain.hyper = resample_hypers(chain.hyper, counts, tables, rng);
  chain.shared = resample_beta(tables, chain.hyper.gamma, rng);
  chain.transitions = resample_rows(counts, chain.shared, chain.hyper, rng);
  chain.emissions = resample_emissions(chain.trajectory, y, chain.emissions, rng);
}

void full_sweep(ChainState& chain, std::span<const double> y, const SamplerConfig& cfg, Rng& rng) {
  update_trajectory(chain, y, cfg, rng);
  if (cfg.resample_parameters) {
    resample_parameters(chain, y, cfg.resample_hyperparameters, rng);
  }
  ++chain.iteration;
}

ChainState initialize_chain(const BaseMeasure& base, const Hyperparams& hyper,
                            int initial_states, std::span<const double> y, Rng& rng) {
  if (initial_states < 1) throw ConfigError("initial state count must be >= 1");
  validate(base);
  ChainState chain;
  chain.emissions.base = base;
  chain.hyper = hyper;
  for (int i = 0; i < initial_states; ++i) add_state(chain, rng);
  std::uniform_int_distribution<int> pick(0, initial_states - 1);
  chain.trajectory.resize(y.size());
  for (auto& s : chain.trajectory) s = pick(rng);
  if (!y.empty()) resample_parameters(chain, y, false, rng);
  return chain;
}

}  // namespace ihmm
