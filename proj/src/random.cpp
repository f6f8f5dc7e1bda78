#include "ihmm/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ihmm/error.hpp"

namespace ihmm {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(what) + " must be positive and finite, got " +
                         std::to_string(value));
  }
}

}  // namespace

double uniform_open(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  while (u <= 0.0) u = unif(rng);
  return u;
}

double sample_gamma(double shape, double rate, Rng& rng) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

double sample_log_gamma(double shape, Rng& rng) {
  require_positive(shape, "gamma shape");
  if (shape >= 1.0) {
    std::gamma_distribution<double> dist(shape, 1.0);
    double g = dist(rng);
    while (g <= 0.0) g = dist(rng);
    return std::log(g);
  }
  // G(a) = G(a + 1) * U^(1/a)
  std::gamma_distribution<double> dist(shape + 1.0, 1.0);
  double g = dist(rng);
  while (g <= 0.0) g = dist(rng);
  return std::log(g) + std::log(uniform_open(rng)) / shape;
}

double sample_beta(double a, double b, Rng& rng) {
  const double la = sample_log_gamma(a, rng);
  const double lb = sample_log_gamma(b, rng);
  // a / (a + b) computed as a logistic of the log ratio
  const double d = lb - la;
  if (d > 0) {
    const double e = std::exp(-d);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(d));
}

int sample_binomial(int trials, double p, Rng& rng) {
  if (trials < 0) throw ParameterError("binomial trials must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("binomial p outside [0, 1]");
  if (trials == 0) return 0;
  std::binomial_distribution<int> dist(trials, p);
  return dist(rng);
}

std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ParameterError("categorical weights must be finite and non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw ParameterError("categorical weights are all zero");
  std::uniform_real_distribution<double> unif(0.0, total);
  const double target = unif(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

std::size_t sample_log_categorical(std::span<const double> log_weights,
                                   Rng& rng) {
  if (log_weights.empty()) throw ParameterError("categorical over empty support");
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (!(top > -std::numeric_limits<double>::infinity()) || std::isnan(top)) {
    throw NumericalError("categorical log weights carry no mass");
  }
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - top);
  return sample_categorical(w, rng);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

std::vector<double> normalize_log(std::span<const double> log_weights) {
  const double z = log_sum_exp(log_weights);
  if (!std::isfinite(z)) throw NumericalError("cannot normalize: no finite mass");
  std::vector<double> p(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_weights[i] - z);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace ihmm
