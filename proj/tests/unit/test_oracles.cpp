// Cross-checks of the test oracles against each other and closed forms.

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"

TEST_CASE("forward-backward agrees with path enumeration") {
  const std::vector<double> init{0.2, 0.5, 0.3};
  const oracle::Matrix trans{{0.7, 0.2, 0.1}, {0.1, 0.6, 0.3}, {0.3, 0.3, 0.4}};
  const oracle::Matrix lik{{0.9, 0.2, 0.1}, {0.1, 0.5, 0.7}, {0.4, 0.4, 0.2},
                           {0.3, 0.1, 0.9}, {0.05, 0.6, 0.3}};
  const auto fb = oracle::forward_backward(init, trans, lik);
  const auto en = oracle::enumerate_marginals(init, trans, lik);
  for (std::size_t t = 0; t < lik.size(); ++t) {
    for (std::size_t k = 0; k < 3; ++k) CHECK(fb[t][k] == doctest::Approx(en[t][k]).epsilon(1e-12));
  }
}

TEST_CASE("NIG quadrature matches the Student-t closed form") {
  for (auto [m, l, a, b, y] : {std::array{0.0, 1.0, 2.0, 2.0, 0.7}, std::array{1.0, 0.1, 3.0, 0.5, -2.0},
                               std::array{-3.0, 5.0, 1.5, 4.0, 10.0}}) {
    const double nu = 2 * a, s2 = b * (l + 1) / (a * l), d = y - m;
    const double t = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) /
                     std::sqrt(nu * std::numbers::pi * s2) * std::pow(1 + d * d / (nu * s2), -(nu + 1) / 2);
    CHECK(oracle::nig_predictive_quadrature(m, l, a, b, y) == doctest::Approx(t).epsilon(1e-7));
  }
}

TEST_CASE("Antoniak pmf normalizes and has the known small cases") {
  for (int n : {1, 2, 5, 20}) {
    for (double c : {0.1, 1.0, 10.0}) {
      const auto p = oracle::antoniak_pmf(n, c);
      double s = 0.0;
      for (double v : p) s += v;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  const auto p2 = oracle::antoniak_pmf(2, 3.0);
  CHECK(p2[1] == doctest::Approx(1.0 / 4.0));
  CHECK(p2[2] == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("CRP simulation matches the Antoniak pmf") {
  std::uint64_t state = 99;
  std::vector<int> draws;
  for (int i = 0; i < 100000; ++i) draws.push_back(oracle::crp_tables(10, 1.0, state));
  CHECK(oracle::total_variation(oracle::empirical_pmf(draws), oracle::antoniak_pmf(10, 1.0)) < 0.01);
}

TEST_CASE("KS p-value: same distribution large, shifted small") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01(0, 1), n_shift(0.2, 1);
  std::vector<double> a, b, c;
  for (int i = 0; i < 5000; ++i) {
    a.push_back(n01(rng));
    b.push_back(n01(rng));
    c.push_back(n_shift(rng));
  }
  CHECK(oracle::ks_pvalue(a, b) > 0.01);
  CHECK(oracle::ks_pvalue(a, c) < 1e-6);
}

TEST_CASE("chi-squared p-value") {
  CHECK(oracle::chi_square_pvalue({5000, 5000}, {0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(oracle::chi_square_pvalue({6000, 4000}, {0.5, 0.5}) < 1e-10);
}
