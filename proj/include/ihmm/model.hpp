#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ihmm/distributions.hpp"
#include "ihmm/random.hpp"

namespace ihmm {

// Entry of the trajectory that has no predecessor; transition "rows" indexed
// by it resolve to the initial-state distribution.
inline constexpr int kInitialSource = -1;

// Remainders below this are floored and the vector renormalized.
inline constexpr double kRemainderFloor = 1e-300;

// Shared DP measure over the K active states plus the aggregated mass of all
// unrepresented ones.
struct SharedBase {
  std::vector<double> beta;
  double remainder = 1.0;

  int size() const { return static_cast<int>(beta.size()); }
};

// rows[j] holds K + 1 entries: transitions into the K active states followed
// by the aggregated mass of the unrepresented states.
struct TransitionModel {
  std::vector<std::vector<double>> rows;

  int size() const { return static_cast<int>(rows.size()); }
};

struct EmissionModel {
  BaseMeasure base;
  std::vector<EmissionParam> phi;
};

struct Hyperparams {
  double alpha = 1.0;
  double gamma = 1.0;
  double kappa = 0.0;
  // Gamma(shape, rate) priors on gamma and on alpha + kappa; Beta prior on
  // kappa / (alpha + kappa).
  double a_gamma = 1.0;
  double b_gamma = 1.0;
  double a_s = 1.0;
  double b_s = 1.0;
  double a_kappa = 10.0;
  double b_kappa = 10.0;
  bool sticky = false;
};

struct ChainState {
  std::vector<int> trajectory;  // 0-based state indices
  SharedBase shared;
  TransitionModel transitions;
  EmissionModel emissions;
  Hyperparams hyper;
  std::int64_t iteration = 0;
  // Truncated support: every remainder is treated as zero mass and no state
  // is ever created. Used for fixed finite HMMs.
  bool finite = false;

  int num_states() const { return shared.size(); }
};

// Floors the last entry of a probability vector at kRemainderFloor and
// renormalizes. Returns true when an adjustment was needed.
bool guard_remainder(std::vector<double>& probs);
bool guard_remainder(SharedBase& base);

// Breaks the next piece off the shared stick: beta_{K+1} = fraction * rem.
void extend_beta_with_fraction(SharedBase& base, double fraction);
// fraction ~ Beta(1, gamma).
void extend_beta(SharedBase& base, double gamma, Rng& rng);

// Carves a column for the newest state out of every row's remainder:
// new = fraction_j * rem_j. Existing entries are left untouched.
void extend_rows_with_fractions(TransitionModel& trans, std::span<const double> fractions);
// fraction_j ~ Beta(alpha * beta_{K+1}, alpha * rem) with `extended` already
// carrying the new state.
void extend_rows(TransitionModel& trans, const SharedBase& extended, double alpha, Rng& rng);

// Fresh row ~ Dir(alpha beta_1, ..., alpha beta_K (+ kappa at self_index), alpha rem).
std::vector<double> new_row(const SharedBase& base, const Hyperparams& hyper,
                            std::optional<int> self_index, Rng& rng);

// Instantiates state K: extends beta and every row, draws its own row and
// phi ~ H. Returns the new index.
int add_state(ChainState& chain, Rng& rng);

// Initial-state distribution p(s_1) = beta, with the remainder appended
// (zero under finite support).
std::vector<double> initial_row(const ChainState& chain);

// Transition distribution out of `from` (or the initial distribution for
// kInitialSource), K + 1 entries.
std::span<const double> source_row(const ChainState& chain, int from,
                                   std::vector<double>& initial_scratch);

double transition_prob(const ChainState& chain, int from, int to);

// Remainder mass of a row as seen by the samplers.
double remainder_mass(const ChainState& chain, std::span<const double> row);

// Given that a draw from the row of `from` landed in its remainder, picks
// which unrepresented state it is, instantiating states lazily until the
// draw is covered. Every created state gets phi ~ H.
int draw_unrepresented(ChainState& chain, int from, Rng& rng);

// Same, over every state with index >= first plus the remainder: already
// instantiated states in that range are visited before new ones are made.
int draw_beyond(ChainState& chain, int from, int first, Rng& rng);

// Exact draw of the successor of `from` from the infinite model.
int draw_successor(ChainState& chain, int from, Rng& rng);

// Forward simulation of (s_{1:T}, y_{1:T}) from the model, instantiating
// states as they are reached. Does not touch chain.trajectory.
std::pair<std::vector<int>, std::vector<double>> sample_sequence(ChainState& chain, int length,
                                                                 Rng& rng);

double sample_observation(const EmissionParam& phi, Rng& rng);

// log p(s_{1:T}, y_{1:T}) = log beta_{s_1} + sum log pi(s_t | s_{t-1}) + sum log f(y_t | s_t).
double joint_log_likelihood(const ChainState& chain, std::span<const double> y);

// Throws ConsistencyError when any structural or mass invariant fails.
void check_invariants(const ChainState& chain, double tolerance = 1e-12);

}  // namespace ihmm
