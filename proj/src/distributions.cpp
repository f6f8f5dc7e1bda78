#include "ihmm/distributions.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ihmm/error.hpp"

namespace ihmm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const NigParams& as_nig(const BaseMeasure& base) {
  const auto* nig = std::get_if<NigParams>(&base);
  if (!nig) throw ConsistencyError("expected a normal-inverse-gamma base measure");
  return *nig;
}

const DirichletParams& as_dirichlet(const BaseMeasure& base) {
  const auto* dir = std::get_if<DirichletParams>(&base);
  if (!dir) throw ConsistencyError("expected a Dirichlet base measure");
  return *dir;
}

}  // namespace

void validate(const DirichletParams& params) {
  if (params.concentrations.empty()) {
    throw ParameterError("Dirichlet needs at least one concentration");
  }
  for (double c : params.concentrations) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ParameterError("Dirichlet concentrations must be positive and finite, got " +
                           std::to_string(c));
    }
  }
}

void validate(const NigParams& p) {
  if (!std::isfinite(p.mean_loc)) throw ParameterError("NIG mean_loc must be finite");
  if (!(p.precision_scale > 0.0) || !std::isfinite(p.precision_scale)) {
    throw ParameterError("NIG precision_scale must be positive");
  }
  if (!(p.shape > 0.0) || !std::isfinite(p.shape)) {
    throw ParameterError("NIG shape must be positive");
  }
  if (!(p.rate > 0.0) || !std::isfinite(p.rate)) {
    throw ParameterError("NIG rate must be positive");
  }
}

void validate(const BaseMeasure& base) {
  std::visit([](const auto& p) { validate(p); }, base);
}

std::vector<double> sample_dirichlet(const DirichletParams& params, Rng& rng) {
  validate(params);
  return sample_dirichlet(std::span<const double>(params.concentrations), rng);
}

std::vector<double> sample_dirichlet(std::span<const double> concentrations, Rng& rng) {
  if (concentrations.empty()) throw ParameterError("Dirichlet needs at least one concentration");
  std::vector<double> logs(concentrations.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    logs[i] = sample_log_gamma(concentrations[i], rng);
  }
  return normalize_log(logs);
}

int sample_antoniak(int n, double concentration, Rng& rng) {
  if (n < 0) throw ParameterError("Antoniak customer count must be >= 0");
  if (!(concentration > 0.0) || !std::isfinite(concentration)) {
    throw ParameterError("Antoniak concentration must be positive");
  }
  if (n == 0) return 0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int tables = 1;
  for (int i = 1; i < n; ++i) {
    if (unif(rng) * (concentration + i) < concentration) ++tables;
  }
  return tables;
}

std::size_t alphabet_size(const BaseMeasure& base) {
  if (const auto* dir = std::get_if<DirichletParams>(&base)) {
    return dir->concentrations.size();
  }
  return 0;
}

SufficientStats empty_stats(const BaseMeasure& base) {
  return std::visit(
      Overloaded{
          [](const NigParams&) -> SufficientStats { return GaussianStats{}; },
          [](const DirichletParams& d) -> SufficientStats {
            return DiscreteStats{std::vector<double>(d.concentrations.size(), 0.0)};
          },
      },
      base);
}

std::size_t symbol_index(double y, std::size_t alphabet) {
  if (!(y >= 0.0) || y != std::floor(y) || y >= static_cast<double>(alphabet)) {
    throw DomainError("symbol " + std::to_string(y) + " outside alphabet of size " +
                      std::to_string(alphabet));
  }
  return static_cast<std::size_t>(y);
}

void add_observation(SufficientStats& stats, double y) {
  std::visit(Overloaded{
                 [y](GaussianStats& s) {
                   s.n += 1.0;
                   s.sum += y;
                   s.sum_sq += y * y;
                 },
                 [y](DiscreteStats& s) { s.counts[symbol_index(y, s.counts.size())] += 1.0; },
             },
             stats);
}

void remove_observation(SufficientStats& stats, double y) {
  std::visit(Overloaded{
                 [y](GaussianStats& s) {
                   if (s.n < 1.0) throw ConsistencyError("removing from empty stats");
                   s.n -= 1.0;
                   s.sum -= y;
                   s.sum_sq -= y * y;
                   if (s.n == 0.0) s.sum = s.sum_sq = 0.0;
                 },
                 [y](DiscreteStats& s) {
                   double& c = s.counts[symbol_index(y, s.counts.size())];
                   if (c < 1.0) throw ConsistencyError("removing an unseen symbol");
                   c -= 1.0;
                 },
             },
             stats);
}

double log_likelihood(const EmissionParam& phi, double y) {
  return std::visit(
      Overloaded{
          [y](const GaussianParam& g) {
            const double d = y - g.mean;
            return -0.5 * (std::log(2.0 * std::numbers::pi * g.variance) + d * d / g.variance);
          },
          [y](const CategoricalParam& c) {
            return std::log(c.probs[symbol_index(y, c.probs.size())]);
          },
      },
      phi);
}

BaseMeasure posterior_params(const SufficientStats& stats, const BaseMeasure& base) {
  if (const auto* g = std::get_if<GaussianStats>(&stats)) {
    const NigParams& p = as_nig(base);
    if (g->n == 0.0) return p;
    const double lambda_n = p.precision_scale + g->n;
    const double mean = g->sum / g->n;
    const double scatter = std::max(0.0, g->sum_sq - g->sum * mean);
    const double dev = mean - p.mean_loc;
    NigParams post;
    post.precision_scale = lambda_n;
    post.mean_loc = (p.precision_scale * p.mean_loc + g->sum) / lambda_n;
    post.shape = p.shape + 0.5 * g->n;
    post.rate = p.rate + 0.5 * scatter + 0.5 * p.precision_scale * g->n * dev * dev / lambda_n;
    return post;
  }
  const auto& d = std::get<DiscreteStats>(stats);
  const DirichletParams& prior = as_dirichlet(base);
  if (d.counts.size() != prior.concentrations.size()) {
    throw ConsistencyError("symbol counts do not match the alphabet");
  }
  DirichletParams post = prior;
  for (std::size_t i = 0; i < d.counts.size(); ++i) post.concentrations[i] += d.counts[i];
  return post;
}

double posterior_predictive(const SufficientStats& stats, const BaseMeasure& base,
                            double y) {
  const BaseMeasure post = posterior_params(stats, base);
  if (const auto* p = std::get_if<NigParams>(&post)) {
    // Student-t with 2a degrees of freedom, location m, scale^2 b(l+1)/(a l)
    const double nu = 2.0 * p->shape;
    const double scale_sq = p->rate * (p->precision_scale + 1.0) / (p->shape * p->precision_scale);
    const double d = y - p->mean_loc;
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
           0.5 * std::log(nu * std::numbers::pi * scale_sq) -
           0.5 * (nu + 1.0) * std::log1p(d * d / (nu * scale_sq));
  }
  const auto& dir = std::get<DirichletParams>(post);
  const std::size_t k = symbol_index(y, dir.concentrations.size());
  const double total =
      std::accumulate(dir.concentrations.begin(), dir.concentrations.end(), 0.0);
  return std::log(dir.concentrations[k] / total);
}

double prior_predictive(const BaseMeasure& base, double y) {
  return posterior_predictive(empty_stats(base), base, y);
}

EmissionParam sample_phi(const BaseMeasure& base, Rng& rng) {
  return std::visit(
      Overloaded{
          [&rng](const NigParams& p) -> EmissionParam {
            const double variance = 1.0 / sample_gamma(p.shape, p.rate, rng);
            std::normal_distribution<double> normal(
                p.mean_loc, std::sqrt(variance / p.precision_scale));
            return GaussianParam{normal(rng), variance};
          },
          [&rng](const DirichletParams& p) -> EmissionParam {
            return CategoricalParam{sample_dirichlet(p, rng)};
          },
      },
      base);
}

EmissionParam posterior_sample_phi(const SufficientStats& stats,
                                   const BaseMeasure& base, Rng& rng) {
  return sample_phi(posterior_params(stats, base), rng);
}

}  // namespace ihmm
