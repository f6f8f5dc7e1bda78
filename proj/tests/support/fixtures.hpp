#pragma once

// Small fixed models shared by the sampler tests and the acceptance suite.

#include <cmath>
#include <functional>
#include <vector>

#include "ihmm/model.hpp"
#include "oracles.hpp"

namespace fixture {

// Three-state Gaussian HMM with clamped parameters and no remainder mass.
inline ihmm::ChainState three_state_chain() {
  ihmm::ChainState c;
  c.finite = true;
  c.emissions.base = ihmm::NigParams{0.0, 1.0, 2.0, 2.0};
  c.shared.beta = {0.3, 0.45, 0.25};
  c.shared.remainder = 0.0;
  c.transitions.rows = {{0.8, 0.15, 0.05, 0.0}, {0.1, 0.7, 0.2, 0.0}, {0.2, 0.3, 0.5, 0.0}};
  c.emissions.phi = {ihmm::GaussianParam{-1.0, 0.6}, ihmm::GaussianParam{0.5, 0.8},
                     ihmm::GaussianParam{1.5, 0.5}};
  return c;
}

inline std::vector<double> three_state_data() { return {-0.9, 0.2, 1.1, 1.6, -0.3, 0.7}; }

// Exact smoothing marginals for a finite chain, written out from its
// parameters without touching the library's samplers.
inline oracle::Matrix exact_marginals(const ihmm::ChainState& c, const std::vector<double>& y) {
  const std::size_t k = c.shared.beta.size();
  std::vector<double> init(c.shared.beta.begin(), c.shared.beta.end());
  oracle::Matrix trans(k, std::vector<double>(k));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < k; ++i) trans[j][i] = c.transitions.rows[j][i];
  }
  oracle::Matrix lik(y.size(), std::vector<double>(k));
  for (std::size_t t = 0; t < y.size(); ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      const auto& g = std::get<ihmm::GaussianParam>(c.emissions.phi[i]);
      const double d = y[t] - g.mean;
      lik[t][i] = std::exp(-0.5 * d * d / g.variance) / std::sqrt(2.0 * M_PI * g.variance);
    }
  }
  return oracle::forward_backward(init, trans, lik);
}

// Long-run per-position state frequencies of a trajectory kernel started
// from `start`.
inline oracle::Matrix run_marginals(ihmm::ChainState chain, const std::vector<double>& y,
                                    int sweeps,
                                    const std::function<std::vector<int>(ihmm::ChainState&)>& kernel) {
  const std::size_t k = chain.shared.beta.size();
  oracle::Matrix freq(y.size(), std::vector<double>(k, 0.0));
  for (int i = 0; i < sweeps; ++i) {
    chain.trajectory = kernel(chain);
    for (std::size_t t = 0; t < y.size(); ++t) freq[t][chain.trajectory[t]] += 1.0 / sweeps;
  }
  return freq;
}

inline double max_abs_diff(const oracle::Matrix& a, const oracle::Matrix& b) {
  double m = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (std::size_t k = 0; k < a[t].size(); ++k) m = std::max(m, std::abs(a[t][k] - b[t][k]));
  }
  return m;
}

}  // namespace fixture
