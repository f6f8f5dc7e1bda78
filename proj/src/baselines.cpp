#include "ihmm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ihmm/error.hpp"

namespace ihmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double largest_remainder(const ChainState& chain) {
  double top = chain.shared.remainder;
  for (const auto& row : chain.transitions.rows) top = std::max(top, row.back());
  return top;
}

// exp(log f(y_t | phi_k) - max_k), one row per time step. Gaussian states
// get their normalizer and precision computed once per sweep.
std::vector<double> scaled_likelihoods(const ChainState& chain, std::span<const double> y) {
  const int k = chain.num_states();
  std::vector<double> out(y.size() * k);
  std::vector<double> lf(k), mean(k), half_prec(k), log_norm(k);
  bool gaussian = true;
  for (int j = 0; j < k && gaussian; ++j) {
    if (const auto* g = std::get_if<GaussianParam>(&chain.emissions.phi[j])) {
      mean[j] = g->mean;
      half_prec[j] = 0.5 / g->variance;
      log_norm[j] = -0.5 * std::log(2.0 * M_PI * g->variance);
    } else {
      gaussian = false;
    }
  }
  for (std::size_t t = 0; t < y.size(); ++t) {
    double top = kNegInf;
    for (int j = 0; j < k; ++j) {
      if (gaussian) {
        const double d = y[t] - mean[j];
        lf[j] = log_norm[j] - d * d * half_prec[j];
      } else {
        lf[j] = log_likelihood(chain.emissions.phi[j], y[t]);
      }
      top = std::max(top, lf[j]);
    }
    for (int j = 0; j < k; ++j) out[t * k + j] = std::exp(lf[j] - top);
  }
  return out;
}

}  // namespace

std::vector<int> beam_sweep(ChainState& chain, std::span<const double> y, Rng& rng,
                            const BeamOptions& options, std::vector<double>* slices) {
  const int len = static_cast<int>(y.size());
  const auto& s = chain.trajectory;
  if (static_cast<int>(s.size()) != len) {
    throw ConsistencyError("observation length differs from the trajectory");
  }
  if (len == 0) return {};

  std::vector<double> u(len, 0.0);
  if (options.slicing) {
    int prev = kInitialSource;
    double u_min = 1.0;
    for (int t = 0; t < len; ++t) {
      u[t] = uniform_open(rng) * transition_prob(chain, prev, s[t]);
      u_min = std::min(u_min, u[t]);
      prev = s[t];
    }
    if (!chain.finite) {
      // An unrepresented state is reachable only through some remainder.
      while (largest_remainder(chain) >= u_min) add_state(chain, rng);
    }
  }
  if (slices) *slices = u;

  const int k = chain.num_states();
  const auto lik = scaled_likelihoods(chain, y);
  const bool slicing = options.slicing;
  auto admit = [slicing](double p, double slice) { return slicing ? (p > slice ? 1.0 : 0.0) : p; };

  std::vector<double> msg(static_cast<std::size_t>(len) * k, 0.0);
  auto normalize = [&](int t) {
    double total = 0.0;
    for (int j = 0; j < k; ++j) total += msg[t * k + j];
    if (!(total > 0.0)) {
      throw NumericalError("beam forward pass found no admissible state at t=" + std::to_string(t));
    }
    for (int j = 0; j < k; ++j) msg[t * k + j] /= total;
  };

  for (int j = 0; j < k; ++j) msg[j] = admit(chain.shared.beta[j], u[0]) * lik[j];
  normalize(0);
  for (int t = 1; t < len; ++t) {
    double* cur = &msg[static_cast<std::size_t>(t) * k];
    const double* prev = &msg[static_cast<std::size_t>(t - 1) * k];
    const double slice = u[t];
    for (int i = 0; i < k; ++i) {
      const double a = prev[i];
      if (a == 0.0) continue;
      const double* row = chain.transitions.rows[i].data();
      if (slicing) {
        for (int j = 0; j < k; ++j) cur[j] += row[j] > slice ? a : 0.0;
      } else {
        for (int j = 0; j < k; ++j) cur[j] += a * row[j];
      }
    }
    for (int j = 0; j < k; ++j) cur[j] *= lik[static_cast<std::size_t>(t) * k + j];
    normalize(t);
  }

  std::vector<int> out(len);
  out[len - 1] = static_cast<int>(
      sample_categorical(std::span<const double>(&msg[static_cast<std::size_t>(len - 1) * k], k), rng));
  std::vector<double> w(k);
  for (int t = len - 2; t >= 0; --t) {
    const int next = out[t + 1];
    for (int i = 0; i < k; ++i) {
      w[i] = msg[static_cast<std::size_t>(t) * k + i] * admit(chain.transitions.rows[i][next], u[t + 1]);
    }
    out[t] = static_cast<int>(sample_categorical(w, rng));
  }
  return out;
}

std::vector<int> gibbs_sweep(ChainState& chain, std::span<const double> y, Rng& rng) {
  const int len = static_cast<int>(y.size());
  if (static_cast<int>(chain.trajectory.size()) != len) {
    throw ConsistencyError("observation length differs from the trajectory");
  }
  std::vector<int> s = chain.trajectory;
  std::vector<double> logw;
  const auto& hyper = chain.hyper;
  std::vector<int> visits(chain.num_states(), 0);
  for (int v : s) ++visits.at(static_cast<std::size_t>(v));

  for (int t = 0; t < len; ++t) {
    const int prev = t == 0 ? kInitialSource : s[t - 1];
    const int next = t + 1 < len ? s[t + 1] : -1;
    const int k = chain.num_states();
    if (!chain.finite) --visits[s[t]];
    // A state nothing else visits has its own row and phi integrated out:
    // the row has prior mean alpha beta / (alpha + kappa) off its own column
    // and y_t is scored by the prior predictive.
    const double log_m = chain.finite ? kNegInf : prior_predictive(chain.emissions.base, y[t]);
    const double to_next =
        next >= 0 ? hyper.alpha * chain.shared.beta[next] / (hyper.alpha + hyper.kappa) : 1.0;
    auto empty = [&](int j) { return !chain.finite && visits[j] == 0; };
    logw.assign(k + 1, kNegInf);
    for (int j = 0; j < k; ++j) {
      double p = transition_prob(chain, prev, j);
      if (empty(j)) {
        p *= to_next;
        if (p > 0.0) logw[j] = std::log(p) + log_m;
        continue;
      }
      if (next >= 0) p *= chain.transitions.rows[j][next];
      if (p > 0.0) logw[j] = std::log(p) + log_likelihood(chain.emissions.phi[j], y[t]);
    }
    if (!chain.finite) {
      const double p = transition_prob(chain, prev, k) * to_next;
      if (p > 0.0) logw[k] = std::log(p) + log_m;
    }
    int pick = static_cast<int>(sample_log_categorical(logw, rng));
    if (pick == k) {
      pick = draw_unrepresented(chain, prev, rng);
      visits.resize(chain.num_states(), 0);
    }
    if (empty(pick)) {
      // Draw the integrated row and phi given the one transition and the one
      // observation they now explain.
      const int kk = chain.num_states();
      std::vector<double> conc(kk + 1);
      for (int j = 0; j < kk; ++j) conc[j] = hyper.alpha * chain.shared.beta[j];
      conc[kk] = hyper.alpha * chain.shared.remainder;
      conc[pick] += hyper.kappa;
      if (next >= 0) conc[next] += 1.0;
      for (double& c : conc) c = std::max(c, kRemainderFloor);
      auto row = sample_dirichlet(std::span<const double>(conc), rng);
      guard_remainder(row);
      chain.transitions.rows[pick] = std::move(row);
      SufficientStats stats = empty_stats(chain.emissions.base);
      add_observation(stats, y[t]);
      chain.emissions.phi[pick] = posterior_sample_phi(stats, chain.emissions.base, rng);
    }
    s[t] = pick;
    if (!chain.finite) ++visits[pick];
  }
  return s;
}

}  // namespace ihmm
