#include "ihmm/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include "ihmm/error.hpp"
#include "ihmm/log.hpp"

namespace ihmm {

void log_warning(std::string_view message) {
  static std::atomic<int> emitted{0};
  constexpr int kBudget = 20;
  const int n = emitted.fetch_add(1);
  if (n < kBudget) {
    std::clog << "[ihmm] warning: " << message << '\n';
  } else if (n == kBudget) {
    std::clog << "[ihmm] warning: further warnings suppressed\n";
  }
}

namespace {

// Concentrations handed to the gamma sampler must stay strictly positive.
double floor_concentration(double c) { return std::max(c, kRemainderFloor); }

}  // namespace

bool guard_remainder(std::vector<double>& probs) {
  if (probs.empty() || probs.back() >= kRemainderFloor) return false;
  probs.back() = kRemainderFloor;
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= total;
  log_warning("row remainder underflowed; floored and renormalized");
  return true;
}

bool guard_remainder(SharedBase& base) {
  if (base.remainder >= kRemainderFloor) return false;
  base.remainder = kRemainderFloor;
  const double total = std::accumulate(base.beta.begin(), base.beta.end(), base.remainder);
  for (double& b : base.beta) b /= total;
  base.remainder /= total;
  log_warning("beta remainder underflowed; floored and renormalized");
  return true;
}

void extend_beta_with_fraction(SharedBase& base, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ParameterError("stick fraction outside [0, 1]");
  }
  const double piece = fraction * base.remainder;
  base.beta.push_back(piece);
  base.remainder -= piece;
}

void extend_beta(SharedBase& base, double gamma, Rng& rng) {
  extend_beta_with_fraction(base, sample_beta(1.0, gamma, rng));
  guard_remainder(base);
}

void extend_rows_with_fractions(TransitionModel& trans, std::span<const double> fractions) {
  if (fractions.size() != trans.rows.size()) {
    throw ConsistencyError("one stick fraction per row is required");
  }
  for (std::size_t j = 0; j < trans.rows.size(); ++j) {
    auto& row = trans.rows[j];
    const double rem = row.back();
    const double piece = fractions[j] * rem;
    row.back() = piece;
    row.push_back(rem - piece);
  }
}

void extend_rows(TransitionModel& trans, const SharedBase& extended, double alpha, Rng& rng) {
  if (trans.rows.empty()) return;
  const double a = floor_concentration(alpha * extended.beta.back());
  const double b = floor_concentration(alpha * extended.remainder);
  std::vector<double> fractions(trans.rows.size());
  for (double& f : fractions) f = sample_beta(a, b, rng);
  extend_rows_with_fractions(trans, fractions);
  for (auto& row : trans.rows) guard_remainder(row);
}

std::vector<double> new_row(const SharedBase& base, const Hyperparams& hyper,
                            std::optional<int> self_index, Rng& rng) {
  const int k = base.size();
  std::vector<double> conc(k + 1);
  for (int i = 0; i < k; ++i) conc[i] = hyper.alpha * base.beta[i];
  conc[k] = hyper.alpha * base.remainder;
  if (self_index) {
    if (*self_index < 0 || *self_index > k) throw ParameterError("self index out of range");
    conc[*self_index] += hyper.kappa;
  }
  for (double& c : conc) c = floor_concentration(c);
  auto row = sample_dirichlet(std::span<const double>(conc), rng);
  guard_remainder(row);
  return row;
}

int add_state(ChainState& chain, Rng& rng) {
  if (chain.finite) throw ConsistencyError("cannot create states under finite support");
  const int k = chain.num_states();
  extend_beta(chain.shared, chain.hyper.gamma, rng);
  extend_rows(chain.transitions, chain.shared, chain.hyper.alpha, rng);
  chain.transitions.rows.push_back(new_row(chain.shared, chain.hyper, k, rng));
  chain.emissions.phi.push_back(sample_phi(chain.emissions.base, rng));
  return k;
}

std::vector<double> initial_row(const ChainState& chain) {
  std::vector<double> row(chain.shared.beta);
  row.push_back(chain.finite ? 0.0 : chain.shared.remainder);
  return row;
}

std::span<const double> source_row(const ChainState& chain, int from,
                                   std::vector<double>& initial_scratch) {
  if (from == kInitialSource) {
    initial_scratch = initial_row(chain);
    return initial_scratch;
  }
  return chain.transitions.rows.at(static_cast<std::size_t>(from));
}

double transition_prob(const ChainState& chain, int from, int to) {
  const int k = chain.num_states();
  if (to < 0 || to > k) throw ConsistencyError("transition target out of range");
  if (from == kInitialSource) {
    if (to == k) return chain.finite ? 0.0 : chain.shared.remainder;
    return chain.shared.beta[to];
  }
  const auto& row = chain.transitions.rows.at(static_cast<std::size_t>(from));
  if (to == k && chain.finite) return 0.0;
  return row[to];
}

double remainder_mass(const ChainState& chain, std::span<const double> row) {
  return chain.finite ? 0.0 : row.back();
}

int draw_unrepresented(ChainState& chain, int from, Rng& rng) {
  return draw_beyond(chain, from, chain.num_states(), rng);
}

int draw_beyond(ChainState& chain, int from, int first, Rng& rng) {
  if (chain.finite) throw ConsistencyError("cannot create states under finite support");
  auto piece = [&](int k) {
    return from == kInitialSource ? chain.shared.beta[k]
                                  : chain.transitions.rows.at(static_cast<std::size_t>(from))[k];
  };
  auto remainder = [&] {
    return from == kInitialSource ? chain.shared.remainder
                                  : chain.transitions.rows.at(static_cast<std::size_t>(from)).back();
  };
  double mass = remainder();
  for (int k = first; k < chain.num_states(); ++k) mass += piece(k);
  double target = uniform_open(rng) * mass;
  for (int k = first; k < chain.num_states(); ++k) {
    if (target < piece(k)) return k;
    target -= piece(k);
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const int k = add_state(chain, rng);
    if (target < piece(k)) return k;
    target -= piece(k);
  }
  throw NumericalError("lazy expansion did not cover the remainder draw");
}

int draw_successor(ChainState& chain, int from, Rng& rng) {
  std::vector<double> scratch;
  const auto row = source_row(chain, from, scratch);
  std::vector<double> weights(row.begin(), row.end());
  weights.back() = remainder_mass(chain, row);
  const int k = chain.num_states();
  const int pick = static_cast<int>(sample_categorical(weights, rng));
  if (pick < k) return pick;
  return draw_unrepresented(chain, from, rng);
}

double sample_observation(const EmissionParam& phi, Rng& rng) {
  if (const auto* g = std::get_if<GaussianParam>(&phi)) {
    std::normal_distribution<double> normal(g->mean, std::sqrt(g->variance));
    return normal(rng);
  }
  const auto& c = std::get<CategoricalParam>(phi);
  return static_cast<double>(sample_categorical(c.probs, rng));
}

std::pair<std::vector<int>, std::vector<double>> sample_sequence(ChainState& chain, int length,
                                                                 Rng& rng) {
  std::vector<int> states;
  std::vector<double> obs;
  states.reserve(length);
  obs.reserve(length);
  int prev = kInitialSource;
  for (int t = 0; t < length; ++t) {
    const int s = draw_successor(chain, prev, rng);
    states.push_back(s);
    obs.push_back(sample_observation(chain.emissions.phi[s], rng));
    prev = s;
  }
  return {std::move(states), std::move(obs)};
}

double joint_log_likelihood(const ChainState& chain, std::span<const double> y) {
  const auto& s = chain.trajectory;
  if (s.size() != y.size()) throw ConsistencyError("trajectory and observations differ in length");
  if (s.empty()) throw ConsistencyError("joint likelihood needs T >= 1");
  const int k = chain.num_states();
  double total = 0.0;
  int prev = kInitialSource;
  for (std::size_t t = 0; t < s.size(); ++t) {
    if (s[t] < 0 || s[t] >= k) {
      throw ConsistencyError("trajectory refers to inactive state " + std::to_string(s[t]));
    }
    total += std::log(transition_prob(chain, prev, s[t]));
    total += log_likelihood(chain.emissions.phi[s[t]], y[t]);
    prev = s[t];
  }
  return total;
}

void check_invariants(const ChainState& chain, double tolerance) {
  const int k = chain.num_states();
  auto fail = [](const std::string& what) { throw ConsistencyError(what); };
  if (chain.transitions.size() != k) fail("row count differs from active-state count");
  if (static_cast<int>(chain.emissions.phi.size()) != k) fail("phi count differs from K");
  double mass = chain.shared.remainder;
  for (double b : chain.shared.beta) {
    if (!(b >= 0.0)) fail("negative beta entry");
    mass += b;
  }
  if (std::abs(mass - 1.0) > tolerance) fail("beta mass is " + std::to_string(mass));
  if (!chain.finite && !(chain.shared.remainder > 0.0)) fail("beta remainder must be positive");
  for (int j = 0; j < k; ++j) {
    const auto& row = chain.transitions.rows[j];
    if (static_cast<int>(row.size()) != k + 1) fail("row " + std::to_string(j) + " has wrong length");
    double total = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) fail("negative transition probability");
      total += p;
    }
    if (std::abs(total - 1.0) > tolerance) {
      fail("row " + std::to_string(j) + " sums to " + std::to_string(total));
    }
  }
  for (int s : chain.trajectory) {
    if (s < 0 || s >= k) fail("trajectory refers to inactive state " + std::to_string(s));
  }
}

}  // namespace ihmm
