#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "fixtures.hpp"
#include "ihmm/error.hpp"
#include "ihmm/hyper.hpp"
#include "oracles.hpp"

using namespace ihmm;

TEST_CASE("transition counts") {
  const std::vector<int> s{0, 1, 1, 2, 0, 1};
  const auto c = count_transitions(s, 3);
  CHECK(c.at(0, 1) == 2);
  CHECK(c.at(1, 1) == 1);
  CHECK(c.at(1, 2) == 1);
  CHECK(c.at(2, 0) == 1);
  CHECK(c.row_total(1) == 2);
  CHECK(c.initial == std::vector<int>{1, 0, 0});
  CHECK_THROWS_AS(count_transitions(std::vector<int>{0, 3}, 3), ConsistencyError);
}

TEST_CASE("row posterior mean") {
  Rng rng(61);
  const std::vector<int> s{0, 0, 0, 1, 0, 1, 1, 0};
  const auto counts = count_transitions(s, 2);
  const SharedBase base{{0.6, 0.3}, 0.1};
  Hyperparams h;
  h.alpha = 2.0;
  h.kappa = 1.5;
  const int n = 100000;
  std::vector<double> mean(3, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto rows = resample_rows(counts, base, h, rng);
    for (int k = 0; k < 3; ++k) mean[k] += rows.rows[0][k] / n;
  }
  // Row 0 saw 0->0 twice and 0->1 twice.
  const double tot = 4 + h.alpha + h.kappa;
  CHECK(std::abs(mean[0] - (2 + 2.0 * 0.6 + 1.5) / tot) < 0.01);
  CHECK(std::abs(mean[1] - (2 + 2.0 * 0.3) / tot) < 0.01);
  CHECK(std::abs(mean[2] - (2.0 * 0.1) / tot) < 0.01);
}

TEST_CASE("table counts respect their support") {
  Rng rng(62);
  const std::vector<int> s{0, 0, 0, 0, 1, 1, 0, 2, 2, 2, 1};
  const auto counts = count_transitions(s, 3);
  const SharedBase base{{0.4, 0.3, 0.2}, 0.1};
  for (bool sticky : {false, true}) {
    Hyperparams h;
    h.sticky = sticky;
    h.kappa = sticky ? 3.0 : 0.0;
    for (int r = 0; r < 1000; ++r) {
      const auto t = resample_tables(counts, base, h, rng);
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          CHECK(t.at(j, k) <= counts.at(j, k));
          CHECK((t.at(j, k) > 0) == (counts.at(j, k) > 0));
        }
        CHECK(t.override_tables[j] <= t.at(j, j));
        if (!sticky) CHECK(t.override_tables[j] == 0);
      }
    }
  }
}

TEST_CASE("beta posterior") {
  Rng rng(63);
  TableCounts t;
  t.num_states = 2;
  t.m = {2, 1, 0, 3};
  t.override_tables = {0, 1};
  t.initial = {1, 0};
  // Top level: state 0 -> 2 + 0 + 1 = 3, state 1 -> 1 + 3 - 1 = 3.
  CHECK(t.top_level_counts() == std::vector<int>{3, 3});
  const int n = 100000;
  double m0 = 0.0, mr = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto b = resample_beta(t, 2.0, rng);
    CHECK(std::abs(b.beta[0] + b.beta[1] + b.remainder - 1.0) < 1e-12);
    m0 += b.beta[0] / n;
    mr += b.remainder / n;
  }
  CHECK(std::abs(m0 - 3.0 / 8.0) < 0.01);
  CHECK(std::abs(mr - 2.0 / 8.0) < 0.01);

  t.m = {0, 0, 0, 3};
  t.initial = {0, 1};
  t.override_tables = {0, 0};
  CHECK_THROWS_AS(resample_beta(t, 1.0, rng), ConsistencyError);
}

TEST_CASE("concentration update leaves its prior invariant") {
  // c ~ Gamma(a_s, b_s); tables of each row ~ Antoniak(n_j, c) via the CRP
  // oracle; one update of c must reproduce the prior.
  Rng rng(64);
  std::uint64_t crp_state = 7;
  Hyperparams h;
  h.a_s = 2.0;
  h.b_s = 0.5;
  const std::vector<int> n_rows{3, 12, 40, 1};
  const int k = static_cast<int>(n_rows.size());
  std::vector<double> prior, updated;
  for (int r = 0; r < 20000; ++r) {
    const double c = sample_gamma(h.a_s, h.b_s, rng);
    TransitionCounts counts;
    counts.num_states = k;
    counts.n.assign(k * k, 0);
    counts.initial.assign(k, 0);
    TableCounts tables;
    tables.num_states = k;
    tables.m.assign(k * k, 0);
    tables.override_tables.assign(k, 0);
    tables.initial.assign(k, 0);
    for (int j = 0; j < k; ++j) {
      counts.n[j * k + j] = n_rows[j];
      tables.m[j * k + j] = oracle::crp_tables(n_rows[j], c, crp_state);
    }
    h.alpha = c;
    prior.push_back(sample_gamma(h.a_s, h.b_s, rng));
    updated.push_back(resample_hypers(h, counts, tables, rng).alpha);
  }
  CHECK(oracle::ks_pvalue(prior, updated) > 0.01);
}

TEST_CASE("gamma update leaves its prior invariant") {
  Rng rng(65);
  Hyperparams h;
  h.a_gamma = 3.0;
  h.b_gamma = 2.0;
  const int customers = 25;
  std::vector<double> prior, updated;
  for (int r = 0; r < 20000; ++r) {
    const double g = sample_gamma(h.a_gamma, h.b_gamma, rng);
    // Seat the top-level customers; each dish becomes one state.
    std::vector<int> dishes;
    for (int i = 0; i < customers; ++i) {
      double u = uniform_open(rng) * (i + g);
      bool seated = false;
      for (auto& d : dishes) {
        if (u < d) {
          ++d;
          seated = true;
          break;
        }
        u -= d;
      }
      if (!seated) dishes.push_back(1);
    }
    const int k = static_cast<int>(dishes.size());
    TransitionCounts counts;
    counts.num_states = k;
    counts.n.assign(k * k, 0);
    counts.initial.assign(k, 0);
    TableCounts tables;
    tables.num_states = k;
    tables.m.assign(k * k, 0);
    tables.override_tables.assign(k, 0);
    tables.initial.assign(k, 0);
    for (int d = 0; d < k; ++d) {
      counts.n[d] = dishes[d];
      tables.m[d] = dishes[d];
    }
    h.gamma = g;
    prior.push_back(sample_gamma(h.a_gamma, h.b_gamma, rng));
    updated.push_back(resample_hypers(h, counts, tables, rng).gamma);
  }
  CHECK(oracle::ks_pvalue(prior, updated) > 0.01);
}

TEST_CASE("sticky path with rho pinned near zero matches the plain update") {
  Rng rng(66);
  const std::vector<int> s{0, 0, 1, 1, 1, 0, 2, 2, 0, 1, 1, 2};
  const auto counts = count_transitions(s, 3);
  const SharedBase base{{0.4, 0.3, 0.2}, 0.1};
  Hyperparams plain;
  plain.alpha = 2.0;
  Hyperparams sticky = plain;
  sticky.sticky = true;
  sticky.kappa = 0.0;
  sticky.a_kappa = 1e-8;
  sticky.b_kappa = 1.0;
  std::vector<double> a, b;
  for (int i = 0; i < 10000; ++i) {
    a.push_back(resample_hypers(plain, counts, resample_tables(counts, base, plain, rng), rng).alpha);
    const auto h = resample_hypers(sticky, counts, resample_tables(counts, base, sticky, rng), rng);
    CHECK(h.kappa < 1e-6);
    b.push_back(h.alpha + h.kappa);
  }
  CHECK(oracle::ks_pvalue(a, b) > 0.01);
}

TEST_CASE("non-sticky updates keep kappa at zero") {
  Rng rng(67);
  const std::vector<int> s{0, 1, 0, 1};
  const auto counts = count_transitions(s, 2);
  Hyperparams h;
  const auto t = resample_tables(counts, SharedBase{{0.5, 0.4}, 0.1}, h, rng);
  for (int i = 0; i < 100; ++i) {
    const auto next = resample_hypers(h, counts, t, rng);
    CHECK(next.kappa == 0.0);
    CHECK(next.alpha > 0.0);
    CHECK(next.gamma > 0.0);
  }
}

TEST_CASE("emission posterior uses only the assigned observations") {
  Rng rng(68);
  EmissionModel e{DirichletParams{{1.0, 1.0}}, {CategoricalParam{{0.5, 0.5}}, CategoricalParam{{0.5, 0.5}}}};
  const std::vector<int> s{0, 0, 0, 1};
  const std::vector<double> y{1.0, 1.0, 1.0, 0.0};
  double m0 = 0.0, m1 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto out = resample_emissions(s, y, e, rng);
    m0 += std::get<CategoricalParam>(out.phi[0]).probs[1] / n;
    m1 += std::get<CategoricalParam>(out.phi[1]).probs[1] / n;
  }
  CHECK(std::abs(m0 - 4.0 / 5.0) < 0.01);
  CHECK(std::abs(m1 - 1.0 / 3.0) < 0.01);
  CHECK_THROWS_AS(resample_emissions(std::vector<int>{0}, y, e, rng), ConsistencyError);
}

TEST_CASE("pruning drops unvisited states and folds their mass into the remainders") {
  Rng rng(69);
  ChainState c;
  c.emissions.base = NigParams{};
  for (int i = 0; i < 5; ++i) add_state(c, rng);
  c.trajectory = {4, 1, 4, 4, 1};
  const auto old_rows = c.transitions.rows;
  const auto old_beta = c.shared.beta;
  const auto phi4 = std::get<GaussianParam>(c.emissions.phi[4]);
  prune_inactive(c);
  CHECK(c.num_states() == 2);
  CHECK(c.trajectory == std::vector<int>{1, 0, 1, 1, 0});
  CHECK(c.shared.beta == std::vector<double>{old_beta[1], old_beta[4]});
  CHECK(c.transitions.rows[1][0] == old_rows[4][1]);
  CHECK(std::get<GaussianParam>(c.emissions.phi[1]).mean == phi4.mean);
  CHECK_NOTHROW(check_invariants(c));
  const auto again = c.shared.beta;
  prune_inactive(c);
  CHECK(c.shared.beta == again);
}
