#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ihmm {

// One stream per chain; every sampler takes it explicitly.
using Rng = std::mt19937_64;

// Uniform on the open interval (0, 1).
double uniform_open(Rng& rng);

// Gamma(shape, rate).
double sample_gamma(double shape, double rate, Rng& rng);

// log of a Gamma(shape, 1) variate. Stays finite for shapes small enough
// that the variate itself underflows to zero.
double sample_log_gamma(double shape, Rng& rng);

double sample_beta(double a, double b, Rng& rng);

int sample_binomial(int trials, double p, Rng& rng);

// Index drawn proportionally to non-negative, not necessarily normalized
// weights. Inverse CDF over stored order.
std::size_t sample_categorical(std::span<const double> weights, Rng& rng);

// Same, for weights given as logs. -inf entries have zero mass.
std::size_t sample_log_categorical(std::span<const double> log_weights,
                                   Rng& rng);

double log_sum_exp(std::span<const double> values);

// exp(values - log_sum_exp(values)), renormalized so the sum is 1 to
// machine precision.
std::vector<double> normalize_log(std::span<const double> log_weights);

}  // namespace ihmm
