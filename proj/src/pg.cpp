#include "ihmm/pg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ihmm/error.hpp"

namespace ihmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-time-step emission cache over the distinct slots: log f(y_t | phi_k)
// for each state proposed on its own, then the prior predictive standing in
// for the lumped slot, plus a rescaled linear copy shared by all particles.
class StepLikelihood {
 public:
  void reset(const ChainState& chain, std::span<const int> distinct, double y) {
    log_lik_.resize(distinct.size() + 1);
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      log_lik_[i] = log_likelihood(chain.emissions.phi[distinct[i]], y);
    }
    log_lik_.back() = prior_predictive(chain.emissions.base, y);
    shift_ = *std::max_element(log_lik_.begin(), log_lik_.end());
    scaled_.resize(log_lik_.size());
    for (std::size_t i = 0; i < log_lik_.size(); ++i) scaled_[i] = std::exp(log_lik_[i] - shift_);
  }

  std::span<const double> log_lik() const { return log_lik_; }
  std::span<const double> scaled() const { return scaled_; }
  double shift() const { return shift_; }
  double prior_predictive_term() const { return log_lik_.back(); }
  double operator[](int slot) const { return log_lik_[slot]; }

 private:
  double shift_ = 0.0;
  std::vector<double> log_lik_;
  std::vector<double> scaled_;
};

// log sum_k row_k f_k, using the rescaled likelihoods when they do not
// underflow against this row.
double log_normalizer(std::span<const double> row, std::span<const double> log_lik,
                      std::span<const double> scaled, double shift) {
  double z = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) z += row[k] * scaled[k];
  if (z > 0.0) return std::log(z) + shift;
  std::vector<double> terms(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) {
    terms[k] = row[k] > 0.0 ? std::log(row[k]) + log_lik[k] : kNegInf;
  }
  return log_sum_exp(terms);
}

Proposed propose_scaled(Proposal mode, std::span<const double> row,
                        std::span<const double> log_lik, std::span<const double> scaled,
                        double shift, Rng& rng, std::vector<double>& work) {
  if (row.size() != log_lik.size()) {
    throw ConsistencyError("proposal row and likelihood vector differ in length");
  }
  Proposed out;
  if (mode == Proposal::prior) {
    out.index = static_cast<int>(sample_categorical(row, rng));
    out.log_mass = std::log(row[out.index]);
    return out;
  }
  work.resize(row.size());
  double z = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    work[k] = row[k] * scaled[k];
    z += work[k];
  }
  if (z > 0.0) {
    out.index = static_cast<int>(sample_categorical(work, rng));
    out.log_mass = std::log(work[out.index] / z);
    out.log_normalizer = std::log(z) + shift;
    return out;
  }
  // Every candidate underflowed relative to the global maximum.
  for (std::size_t k = 0; k < row.size(); ++k) {
    work[k] = row[k] > 0.0 ? std::log(row[k]) + log_lik[k] : kNegInf;
  }
  const double lz = log_sum_exp(work);
  out.index = static_cast<int>(sample_log_categorical(work, rng));
  out.log_mass = work[out.index] - lz;
  out.log_normalizer = lz;
  return out;
}

}  // namespace

Proposed propose(Proposal mode, std::span<const double> row, std::span<const double> log_lik,
                 Rng& rng) {
  if (row.size() != log_lik.size()) {
    throw ConsistencyError("proposal row and likelihood vector differ in length");
  }
  double shift = kNegInf;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] > 0.0) shift = std::max(shift, log_lik[k]);
  }
  if (!std::isfinite(shift)) shift = 0.0;
  std::vector<double> scaled(log_lik.size());
  for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] = std::exp(log_lik[k] - shift);
  std::vector<double> work;
  return propose_scaled(mode, row, log_lik, scaled, shift, rng, work);
}

double step_weight(Proposal mode, double log_pi, double log_f, double log_q) {
  if (mode == Proposal::prior) return log_f;
  return log_pi + log_f - log_q;
}

int ancestor_resample(std::span<const double> log_weights,
                      std::span<const double> log_trans_to_reference, Rng& rng) {
  if (log_weights.size() != log_trans_to_reference.size()) {
    throw ConsistencyError("ancestor weights and transition terms differ in length");
  }
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = log_weights[i] + log_trans_to_reference[i];
  return static_cast<int>(sample_log_categorical(w, rng));
}

std::vector<int> pg_sweep(ChainState& chain, std::span<const double> y, const SweepConfig& cfg,
                          Rng& rng) {
  const int n = cfg.particles;
  if (n < 2) throw ParameterError("particle Gibbs needs at least 2 particles");
  const int len = static_cast<int>(y.size());
  if (static_cast<int>(chain.trajectory.size()) != len) {
    throw ConsistencyError("observation length differs from the reference trajectory");
  }
  if (len == 0) return {};
  const std::vector<int> reference = chain.trajectory;
  for (int s : reference) {
    if (s < 0 || s >= chain.num_states()) {
      throw ConsistencyError("reference trajectory refers to inactive state");
    }
  }

  const int ref = n - 1;
  const bool lumping = cfg.proposal == Proposal::posterior && !chain.finite;
  if (lumping) {
    while (chain.shared.remainder >= cfg.lump_below) add_state(chain, rng);
  }
  // Slot of every state present now: its own, or the lumped one. States
  // created during the sweep always land in the lumped slot.
  const int k0 = chain.num_states();
  std::vector<int> distinct, lumped;
  std::vector<int> slot_of(k0);
  for (int k = 0; k < k0; ++k) {
    if (lumping && chain.shared.beta[k] < cfg.lump_below) {
      lumped.push_back(k);
    } else {
      slot_of[k] = static_cast<int>(distinct.size());
      distinct.push_back(k);
    }
  }
  const int lump_slot = static_cast<int>(distinct.size());
  for (int k : lumped) slot_of[k] = lump_slot;

  std::vector<int> positions(static_cast<std::size_t>(len) * n);
  std::vector<int> ancestors(static_cast<std::size_t>(len) * n, 0);
  std::vector<double> log_w(n), prev_log_w(n);
  std::vector<double> cumulative(n), trans_to_ref(n);
  std::vector<double> row_scratch, initial_scratch, work;
  StepLikelihood lik;

  auto at = [n](int t, int i) { return static_cast<std::size_t>(t) * n + i; };

  // Row of the predecessor over the distinct slots plus the lumped rest
  // (zero under finite support).
  auto predecessor_row = [&](int from) -> std::span<const double> {
    const auto row = source_row(chain, from, initial_scratch);
    row_scratch.resize(distinct.size());
    for (std::size_t i = 0; i < distinct.size(); ++i) row_scratch[i] = row[distinct[i]];
    double rest = 0.0;
    if (!chain.finite) {
      for (int k : lumped) rest += row[k];
      for (std::size_t k = k0; k < row.size(); ++k) rest += row[k];
    }
    row_scratch.push_back(rest);
    return row_scratch;
  };

  // Given that the lumped slot was chosen, the state within it, drawn in
  // proportion to the predecessor's row.
  auto land = [&](int from) {
    const auto row = source_row(chain, from, initial_scratch);
    double revealed = 0.0;
    for (int k : lumped) revealed += row[k];
    double beyond = row.back();
    for (std::size_t k = k0; k + 1 < row.size(); ++k) beyond += row[k];
    double target = uniform_open(rng) * (revealed + beyond);
    if (target < revealed) {
      for (int k : lumped) {
        if (target < row[k]) return k;
        target -= row[k];
      }
      return lumped.back();
    }
    return draw_beyond(chain, from, k0, rng);
  };

  for (int t = 0; t < len; ++t) {
    lik.reset(chain, distinct, y[t]);
    const bool first = t == 0;
    if (!first) {
      prev_log_w = log_w;
      const double z = log_sum_exp(prev_log_w);
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += std::exp(prev_log_w[i] - z);
        cumulative[i] = acc;
      }
      std::uniform_real_distribution<double> unif(0.0, acc);
      for (int i = 0; i < ref; ++i) {
        const double u = unif(rng);
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        ancestors[at(t, i)] = static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(), n - 1));
      }
      if (cfg.ancestor_sampling) {
        for (int i = 0; i < n; ++i) {
          const double p = transition_prob(chain, positions[at(t - 1, i)], reference[t]);
          trans_to_ref[i] = p > 0.0 ? std::log(p) : kNegInf;
        }
        ancestors[at(t, ref)] = ancestor_resample(prev_log_w, trans_to_ref, rng);
      } else {
        ancestors[at(t, ref)] = ref;
      }
    }

    for (int i = 0; i < ref; ++i) {
      const int from = first ? kInitialSource : positions[at(t - 1, ancestors[at(t, i)])];
      const auto row = predecessor_row(from);
      const Proposed p =
          propose_scaled(cfg.proposal, row, lik.log_lik(), lik.scaled(), lik.shift(), rng, work);
      int state = 0;
      double inc = 0.0;
      if (p.index < lump_slot) {
        state = distinct[p.index];
        inc = cfg.proposal == Proposal::prior ? lik[p.index] : p.log_normalizer;
      } else {
        state = land(from);
        const double log_f = log_likelihood(chain.emissions.phi[state], y[t]);
        // In posterior mode the lumped slot was proposed with the prior
        // predictive m(y_t); the landed state has its own phi, so the weight
        // picks up f / m.
        inc = cfg.proposal == Proposal::prior
                  ? log_f
                  : p.log_normalizer + log_f - lik.prior_predictive_term();
      }
      positions[at(t, i)] = state;
      log_w[i] = inc;
    }

    // Reference particle, clamped to s'_t; its weight is what the proposal
    // would have assigned had it drawn s'_t.
    const int from_ref = first ? kInitialSource : positions[at(t - 1, ancestors[at(t, ref)])];
    const int s_ref = reference[t];
    positions[at(t, ref)] = s_ref;
    const int ref_slot = slot_of[s_ref];
    if (cfg.proposal == Proposal::prior) {
      log_w[ref] = ref_slot < lump_slot ? lik[ref_slot]
                                        : log_likelihood(chain.emissions.phi[s_ref], y[t]);
    } else {
      const auto row = predecessor_row(from_ref);
      log_w[ref] = log_normalizer(row, lik.log_lik(), lik.scaled(), lik.shift());
      if (ref_slot == lump_slot) {
        log_w[ref] += log_likelihood(chain.emissions.phi[s_ref], y[t]) - lik.prior_predictive_term();
      }
    }
  }

  int pick = static_cast<int>(sample_log_categorical(log_w, rng));
  std::vector<int> out(len);
  for (int t = len - 1; t >= 0; --t) {
    out[t] = positions[at(t, pick)];
    if (t > 0) pick = ancestors[at(t, pick)];
  }
  return out;
}

}  // namespace ihmm
