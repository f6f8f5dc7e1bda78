#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "ihmm/random.hpp"

namespace ihmm {

// Dirichlet concentrations; every entry strictly positive and finite.
struct DirichletParams {
  std::vector<double> concentrations;
};

// Normal-inverse-gamma prior on (mu, sigma^2):
//   sigma^2 ~ InvGamma(shape, rate),  mu | sigma^2 ~ N(mean_loc, sigma^2 / precision_scale)
// The inverse-gamma is parameterized by its rate.
struct NigParams {
  double mean_loc = 0.0;
  double precision_scale = 1.0;
  double shape = 1.0;
  double rate = 1.0;
};

// The base measure H of the emission parameters.
using BaseMeasure = std::variant<NigParams, DirichletParams>;

struct GaussianParam {
  double mean = 0.0;
  double variance = 1.0;
};

struct CategoricalParam {
  std::vector<double> probs;
};

// phi_k, one per active state.
using EmissionParam = std::variant<GaussianParam, CategoricalParam>;

struct DiscreteStats {
  std::vector<double> counts;
};

struct GaussianStats {
  double n = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
};

using SufficientStats = std::variant<GaussianStats, DiscreteStats>;

void validate(const DirichletParams& params);
void validate(const NigParams& params);
void validate(const BaseMeasure& base);

std::vector<double> sample_dirichlet(const DirichletParams& params, Rng& rng);

// Dirichlet draw from a concentration vector that may hold tiny entries;
// computed through log-gamma variates so nothing underflows before
// normalization.
std::vector<double> sample_dirichlet(std::span<const double> concentrations, Rng& rng);

// Number of occupied tables after seating n customers in a Chinese
// restaurant with the given concentration. Simulated seat by seat, so the
// Stirling numbers of the first kind never appear explicitly.
int sample_antoniak(int n, double concentration, Rng& rng);

// Number of discrete symbols, or 0 for the Gaussian family.
std::size_t alphabet_size(const BaseMeasure& base);

SufficientStats empty_stats(const BaseMeasure& base);
void add_observation(SufficientStats& stats, double y);
void remove_observation(SufficientStats& stats, double y);

// Validated symbol index for discrete observations.
std::size_t symbol_index(double y, std::size_t alphabet);

// log f(y | phi).
double log_likelihood(const EmissionParam& phi, double y);

// log p(y | stats) with phi integrated against its conjugate posterior.
// Student-t for the NIG family, Dirichlet-categorical for the discrete one.
// Empty stats give the prior predictive.
double posterior_predictive(const SufficientStats& stats, const BaseMeasure& base,
                            double y);

double prior_predictive(const BaseMeasure& base, double y);

// Conjugate update of the base measure.
BaseMeasure posterior_params(const SufficientStats& stats, const BaseMeasure& base);

EmissionParam posterior_sample_phi(const SufficientStats& stats,
                                   const BaseMeasure& base, Rng& rng);

EmissionParam sample_phi(const BaseMeasure& base, Rng& rng);

}  // namespace ihmm
