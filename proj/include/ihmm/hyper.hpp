#pragma once

#include <span>
#include <vector>

#include "ihmm/model.hpp"
#include "ihmm/random.hpp"

namespace ihmm {

// n_ij = #{t : s_{t-1} = i, s_t = j}, plus the initial-state indicator.
struct TransitionCounts {
  int num_states = 0;
  std::vector<int> n;        // row-major K x K
  std::vector<int> initial;  // one entry per state, total 1 for T >= 1

  int at(int i, int j) const { return n[static_cast<std::size_t>(i) * num_states + j]; }
  int row_total(int i) const;
};

// Chinese-restaurant-franchise table counts. `override_tables[j]` is the
// number of the m_jj self-transition tables whose dish came from the sticky
// bias rather than from beta; they are excluded from the top-level counts.
struct TableCounts {
  int num_states = 0;
  std::vector<int> m;  // row-major K x K
  std::vector<int> override_tables;
  std::vector<int> initial;

  int at(int i, int j) const { return m[static_cast<std::size_t>(i) * num_states + j]; }
  // Total tables (including overrides).
  int total() const;
  // Per-state top-level customers: column sums minus overrides plus the
  // initial-state draw.
  std::vector<int> top_level_counts() const;
};

TransitionCounts count_transitions(std::span<const int> trajectory, int num_states);

// row_j ~ Dir(n_j1 + alpha beta_1, ..., n_jj + alpha beta_j + kappa, ..., alpha rem).
TransitionModel resample_rows(const TransitionCounts& counts, const SharedBase& base,
                              const Hyperparams& hyper, Rng& rng);

// m_jk ~ Antoniak(n_jk, alpha beta_k + kappa [j = k]); self-transition tables
// then split into override/considered with success probability
// rho / (rho + beta_j (1 - rho)), rho = kappa / (alpha + kappa).
TableCounts resample_tables(const TransitionCounts& counts, const SharedBase& base,
                            const Hyperparams& hyper, Rng& rng);

// (beta_1..beta_K, rem) ~ Dir(top-level counts, gamma).
SharedBase resample_beta(const TableCounts& tables, double gamma, Rng& rng);

// phi_k from its conjugate posterior given {y_t : s_t = k}.
EmissionModel resample_emissions(std::span<const int> trajectory, std::span<const double> y,
                                 const EmissionModel& emissions, Rng& rng);

// Auxiliary-variable updates: alpha + kappa from the per-row Beta/Bernoulli
// scheme given table totals, kappa / (alpha + kappa) from its Beta
// conditional given override counts, gamma from the two-component Gamma
// mixture given the top-level customers and active-state count.
Hyperparams resample_hypers(const Hyperparams& hyper, const TransitionCounts& counts,
                            const TableCounts& tables, Rng& rng);

// Drops states not visited by the trajectory, folding their beta and column
// mass into the remainders, and reindexes the trajectory.
void prune_inactive(ChainState& chain);

}  // namespace ihmm
