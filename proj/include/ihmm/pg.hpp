#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ihmm/model.hpp"
#include "ihmm/random.hpp"

namespace ihmm {

enum class Proposal { prior, posterior };

struct SweepConfig {
  int particles = 10;
  bool ancestor_sampling = true;
  Proposal proposal = Proposal::posterior;
  // Posterior mode on infinite support: a state is proposed on its own only
  // when its beta weight is at least this; every lighter state, revealed or
  // not, shares one slot proposed through the prior predictive. The rule
  // looks at each state's own weight, never at which states the reference
  // visits, which keeps the proposal independent of the reference.
  double lump_below = 1e-3;
};

struct Proposed {
  int index = 0;              // 0..K, K meaning "some unrepresented state"
  double log_mass = 0.0;      // log q(index)
  double log_normalizer = 0.0;  // log sum_k row_k f_k (posterior mode), 0 in prior mode
};

// Draws the next state of a particle over the K + 1 entries of `row`.
// `log_lik` carries log f(y_t | phi_k) for the K active states followed by
// the prior predictive of y_t for the unrepresented slot.
Proposed propose(Proposal mode, std::span<const double> row, std::span<const double> log_lik,
                 Rng& rng);

// log(pi * f / q). Prior mode reduces to log f; posterior mode to the
// predictive normalizer log p(y_t | s_{t-1}).
double step_weight(Proposal mode, double log_pi, double log_f, double log_q);

// Ancestor for the reference particle: P(i) proportional to
// w_{t-1}^i * pi(s'_t | s_{t-1}^i), both given as logs.
int ancestor_resample(std::span<const double> log_weights,
                      std::span<const double> log_trans_to_reference, Rng& rng);

// One conditional-SMC pass with the current chain.trajectory as the
// reference. In posterior mode on infinite support, states are first
// revealed until the beta remainder falls below cfg.lump_below. States
// reached through the lumped slot are instantiated in `chain` immediately. Returns the new trajectory; chain.trajectory itself
// is left for the caller to replace.
std::vector<int> pg_sweep(ChainState& chain, std::span<const double> y, const SweepConfig& cfg,
                          Rng& rng);

}  // namespace ihmm
