#pragma once

#include <span>
#include <vector>

#include "ihmm/model.hpp"
#include "ihmm/random.hpp"

namespace ihmm {

struct BeamOptions {
  // With slicing off the dynamic program weights every transition by pi
  // instead of the slice indicator, i.e. plain forward-filtering
  // backward-sampling over the instantiated states. Test hook for the
  // u -> 0 limit.
  bool slicing = true;
};

// Beam sampler: slice variables u_t ~ U(0, pi(s_t | s_{t-1})), lazy
// expansion until no unrepresented state can clear any slice, forward
// filtering over admissible transitions, backward sampling. The slices used
// are written to `slices` when given.
std::vector<int> beam_sweep(ChainState& chain, std::span<const double> y, Rng& rng,
                            const BeamOptions& options = {},
                            std::vector<double>* slices = nullptr);

// Single-site Gibbs: each s_t in turn from
//   p(s_t = k | rest) ∝ pi(k | s_{t-1}) pi(s_{t+1} | k) f(y_t | phi_k),
// with the unrepresented states aggregated through their prior expectations;
// a draw into the aggregate instantiates the state and draws its row and phi
// from their one-observation posteriors. A state that nothing but s_t visits
// is scored the same way, its own row and phi integrated out, and redrawn
// if chosen.
std::vector<int> gibbs_sweep(ChainState& chain, std::span<const double> y, Rng& rng);

}  // namespace ihmm
