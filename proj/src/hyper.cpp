#include "ihmm/hyper.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ihmm/error.hpp"

namespace ihmm {

int TransitionCounts::row_total(int i) const {
  const auto first = n.begin() + static_cast<std::ptrdiff_t>(i) * num_states;
  return std::accumulate(first, first + num_states, 0);
}

int TableCounts::total() const { return std::accumulate(m.begin(), m.end(), 0); }

std::vector<int> TableCounts::top_level_counts() const {
  std::vector<int> out(initial);
  out.resize(num_states, 0);
  for (int j = 0; j < num_states; ++j) {
    for (int k = 0; k < num_states; ++k) out[k] += at(j, k);
  }
  for (int j = 0; j < num_states; ++j) out[j] -= override_tables[j];
  return out;
}

TransitionCounts count_transitions(std::span<const int> trajectory, int num_states) {
  TransitionCounts c;
  c.num_states = num_states;
  c.n.assign(static_cast<std::size_t>(num_states) * num_states, 0);
  c.initial.assign(num_states, 0);
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const int s = trajectory[t];
    if (s < 0 || s >= num_states) throw ConsistencyError("trajectory refers to inactive state");
    if (t == 0) {
      c.initial[s] += 1;
    } else {
      c.n[static_cast<std::size_t>(trajectory[t - 1]) * num_states + s] += 1;
    }
  }
  return c;
}

TransitionModel resample_rows(const TransitionCounts& counts, const SharedBase& base,
                              const Hyperparams& hyper, Rng& rng) {
  const int k = counts.num_states;
  if (base.size() != k) throw ConsistencyError("counts and beta disagree on K");
  TransitionModel out;
  out.rows.reserve(k);
  std::vector<double> conc(k + 1);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) conc[i] = counts.at(j, i) + hyper.alpha * base.beta[i];
    conc[j] += hyper.kappa;
    conc[k] = hyper.alpha * base.remainder;
    for (double& c : conc) c = std::max(c, kRemainderFloor);
    auto row = sample_dirichlet(std::span<const double>(conc), rng);
    guard_remainder(row);
    out.rows.push_back(std::move(row));
  }
  return out;
}

TableCounts resample_tables(const TransitionCounts& counts, const SharedBase& base,
                            const Hyperparams& hyper, Rng& rng) {
  const int k = counts.num_states;
  if (base.size() != k) throw ConsistencyError("counts and beta disagree on K");
  TableCounts out;
  out.num_states = k;
  out.m.assign(static_cast<std::size_t>(k) * k, 0);
  out.override_tables.assign(k, 0);
  out.initial = counts.initial;
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) {
      const int n = counts.at(j, i);
      if (n == 0) continue;
      double conc = hyper.alpha * base.beta[i] + (i == j ? hyper.kappa : 0.0);
      out.m[static_cast<std::size_t>(j) * k + i] =
          sample_antoniak(n, std::max(conc, kRemainderFloor), rng);
    }
  }
  if (hyper.sticky && hyper.kappa > 0.0) {
    const double rho = hyper.kappa / (hyper.alpha + hyper.kappa);
    for (int j = 0; j < k; ++j) {
      const int self_tables = out.at(j, j);
      if (self_tables == 0) continue;
      const double p = rho / (rho + base.beta[j] * (1.0 - rho));
      out.override_tables[j] = sample_binomial(self_tables, p, rng);
    }
  }
  return out;
}

SharedBase resample_beta(const TableCounts& tables, double gamma, Rng& rng) {
  const int k = tables.num_states;
  SharedBase out;
  if (k == 0) return out;
  const auto top = tables.top_level_counts();
  std::vector<double> conc(k + 1);
  for (int i = 0; i < k; ++i) {
    if (top[i] <= 0) {
      throw ConsistencyError("state " + std::to_string(i) +
                             " has no top-level tables; it should have been pruned");
    }
    conc[i] = top[i];
  }
  conc[k] = gamma;
  auto draw = sample_dirichlet(std::span<const double>(conc), rng);
  guard_remainder(draw);
  out.remainder = draw.back();
  draw.pop_back();
  out.beta = std::move(draw);
  return out;
}

EmissionModel resample_emissions(std::span<const int> trajectory, std::span<const double> y,
                                 const EmissionModel& emissions, Rng& rng) {
  if (trajectory.size() != y.size()) {
    throw ConsistencyError("trajectory and observations differ in length");
  }
  const std::size_t k = emissions.phi.size();
  std::vector<SufficientStats> stats(k, empty_stats(emissions.base));
  for (std::size_t t = 0; t < y.size(); ++t) {
    const int s = trajectory[t];
    if (s < 0 || static_cast<std::size_t>(s) >= k) {
      throw ConsistencyError("trajectory refers to inactive state");
    }
    add_observation(stats[s], y[t]);
  }
  EmissionModel out{emissions.base, {}};
  out.phi.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.phi.push_back(posterior_sample_phi(stats[i], emissions.base, rng));
  }
  return out;
}

Hyperparams resample_hypers(const Hyperparams& hyper, const TransitionCounts& counts,
                            const TableCounts& tables, Rng& rng) {
  Hyperparams out = hyper;
  const int k = counts.num_states;

  // Concentration of every row: alpha + kappa (alpha alone when not sticky).
  const double c = hyper.alpha + (hyper.sticky ? hyper.kappa : 0.0);
  double shape = hyper.a_s + tables.total();
  double rate = hyper.b_s;
  for (int j = 0; j < k; ++j) {
    const int nj = counts.row_total(j);
    if (nj == 0) continue;
    rate -= std::log(sample_beta(c + 1.0, nj, rng));
    if (std::bernoulli_distribution(nj / (nj + c))(rng)) shape -= 1.0;
  }
  const double c_new = sample_gamma(shape, rate, rng);
  if (hyper.sticky) {
    const int overrides =
        std::accumulate(tables.override_tables.begin(), tables.override_tables.end(), 0);
    const double rho = sample_beta(hyper.a_kappa + overrides,
                                   hyper.b_kappa + tables.total() - overrides, rng);
    out.alpha = (1.0 - rho) * c_new;
    out.kappa = rho * c_new;
  } else {
    out.alpha = c_new;
    out.kappa = 0.0;
  }

  const auto top = tables.top_level_counts();
  const int customers = std::accumulate(top.begin(), top.end(), 0);
  const int dishes = static_cast<int>(std::count_if(top.begin(), top.end(), [](int v) { return v > 0; }));
  if (customers == 0) {
    out.gamma = sample_gamma(hyper.a_gamma, hyper.b_gamma, rng);
  } else {
    const double eta = sample_beta(hyper.gamma + 1.0, customers, rng);
    const double post_rate = hyper.b_gamma - std::log(eta);
    const double odds = (hyper.a_gamma + dishes - 1.0) / (customers * post_rate);
    const bool upper = std::bernoulli_distribution(odds / (1.0 + odds))(rng);
    out.gamma = sample_gamma(hyper.a_gamma + dishes - (upper ? 0.0 : 1.0), post_rate, rng);
  }
  return out;
}

namespace {

// Keeps the states with keep[i] set, in order, folding the others into the
// remainders. Returns the new index of each old state (-1 when dropped).
std::vector<int> keep_states(ChainState& chain, const std::vector<char>& keep) {
  const int k = chain.num_states();
  std::vector<int> remap(k, -1);
  int kept = 0;
  for (int i = 0; i < k; ++i) {
    if (keep[i]) remap[i] = kept++;
  }
  if (kept == k) return remap;

  SharedBase base;
  base.remainder = chain.shared.remainder;
  for (int i = 0; i < k; ++i) {
    if (keep[i]) {
      base.beta.push_back(chain.shared.beta[i]);
    } else {
      base.remainder += chain.shared.beta[i];
    }
  }

  TransitionModel trans;
  std::vector<EmissionParam> phi;
  for (int j = 0; j < k; ++j) {
    if (!keep[j]) continue;
    const auto& old = chain.transitions.rows[j];
    std::vector<double> row;
    row.reserve(kept + 1);
    double rem = old.back();
    for (int i = 0; i < k; ++i) {
      if (keep[i]) {
        row.push_back(old[i]);
      } else {
        rem += old[i];
      }
    }
    row.push_back(rem);
    trans.rows.push_back(std::move(row));
    phi.push_back(chain.emissions.phi[j]);
  }

  chain.shared = std::move(base);
  chain.transitions = std::move(trans);
  chain.emissions.phi = std::move(phi);
  return remap;
}

}  // namespace

void prune_inactive(ChainState& chain) {
  const int k = chain.num_states();
  std::vector<char> used(k, 0);
  for (int s : chain.trajectory) {
    if (s < 0 || s >= k) throw ConsistencyError("trajectory refers to inactive state");
    used[s] = 1;
  }
  const auto remap = keep_states(chain, used);
  for (int& s : chain.trajectory) s = remap[s];
}

}  // namespace ihmm
