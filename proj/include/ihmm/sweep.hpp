#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "ihmm/model.hpp"
#include "ihmm/pg.hpp"
#include "ihmm/random.hpp"

namespace ihmm {

enum class SamplerId { pg, pg_as, beam, gibbs };

std::string_view to_string(SamplerId id);
std::optional<SamplerId> parse_sampler(std::string_view name);

struct SamplerConfig {
  SamplerId id = SamplerId::pg_as;
  int particles = 10;
  Proposal proposal = Proposal::posterior;
  // Steps 2-5 can be switched off to hold (beta, pi, phi, hypers) fixed.
  bool resample_parameters = true;
  bool resample_hyperparameters = true;
};

// Step 1 only: replaces chain.trajectory using the configured sampler.
void update_trajectory(ChainState& chain, std::span<const double> y, const SamplerConfig& cfg,
                       Rng& rng);

// Steps 2-5 given the trajectory: prune unused states, then table counts,
// hyperparameters, beta, transition rows and emissions, in that order.
void resample_parameters(ChainState& chain, std::span<const double> y, bool hypers, Rng& rng);

// One full Gibbs sweep; increments chain.iteration.
void full_sweep(ChainState& chain, std::span<const double> y, const SamplerConfig& cfg, Rng& rng);

// Starting point with `initial_states` states: trajectory i.i.d. uniform over
// them, then beta, rows and phi drawn given that trajectory (hyperparameters
// held). Drawing the rows from the prior instead would leave transitions of
// the trajectory with probability that underflows to exactly zero.
ChainState initialize_chain(const BaseMeasure& base, const Hyperparams& hyper,
                            int initial_states, std::span<const double> y, Rng& rng);

}  // namespace ihmm
