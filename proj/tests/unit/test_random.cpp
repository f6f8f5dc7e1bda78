#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ihmm/error.hpp"
#include "ihmm/random.hpp"

using namespace ihmm;

TEST_CASE("beta(1,1) has mean one half") {
  Rng rng(1);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_beta(1.0, 1.0, rng);
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("gamma(4, rate 2) has mean 2") {
  Rng rng(2);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_gamma(4.0, 2.0, rng);
  CHECK(std::abs(sum / n - 2.0) < 0.05);
}

TEST_CASE("log-gamma stays finite for tiny shapes") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = sample_log_gamma(1e-6, rng);
    CHECK(std::isfinite(v));
  }
  // Mean of log G(a) is digamma(a); for a = 0.5 it is -gamma_E - 2 log 2.
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_log_gamma(0.5, rng);
  CHECK(std::abs(sum / n - (-0.5772156649 - 2.0 * std::log(2.0))) < 0.03);
}

TEST_CASE("beta with very unequal tiny parameters lands near the boundary without NaN") {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double b = sample_beta(1e-8, 5.0, rng);
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
  }
}

TEST_CASE("categorical") {
  Rng rng(5);
  SUBCASE("degenerate weights pick the only positive entry") {
    const std::vector<double> w{0.0, 3.0, 0.0};
    for (int i = 0; i < 1000; ++i) CHECK(sample_categorical(w, rng) == 1);
  }
  SUBCASE("all-zero weights are rejected") {
    const std::vector<double> w{0.0, 0.0};
    CHECK_THROWS_AS(sample_categorical(w, rng), ParameterError);
  }
  SUBCASE("negative and NaN weights are rejected") {
    CHECK_THROWS_AS(sample_categorical(std::vector<double>{1.0, -1.0}, rng), ParameterError);
    CHECK_THROWS_AS(sample_categorical(std::vector<double>{std::nan("")}, rng), ParameterError);
  }
  SUBCASE("frequencies follow unnormalized weights") {
    const std::vector<double> w{1.0, 2.0, 7.0};
    std::vector<int> counts(3, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[sample_categorical(w, rng)];
    CHECK(std::abs(counts[0] / double(n) - 0.1) < 0.01);
    CHECK(std::abs(counts[2] / double(n) - 0.7) < 0.01);
  }
  SUBCASE("log weights with -inf entries") {
    const double ninf = -std::numeric_limits<double>::infinity();
    const std::vector<double> lw{ninf, -1000.0, ninf};
    for (int i = 0; i < 100; ++i) CHECK(sample_log_categorical(lw, rng) == 1);
    CHECK_THROWS_AS(sample_log_categorical(std::vector<double>{ninf, ninf}, rng), NumericalError);
  }
}

TEST_CASE("log-sum-exp and normalization") {
  const std::vector<double> v{-1000.0, -1000.0};
  CHECK(log_sum_exp(v) == doctest::Approx(-1000.0 + std::log(2.0)));
  const auto p = normalize_log(std::vector<double>{-2000.0, -2000.0 + std::log(3.0)});
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(std::abs(p[0] + p[1] - 1.0) < 1e-12);
}

TEST_CASE("binomial") {
  Rng rng(6);
  CHECK(sample_binomial(0, 0.5, rng) == 0);
  CHECK(sample_binomial(7, 1.0, rng) == 7);
  CHECK_THROWS_AS(sample_binomial(3, 1.5, rng), ParameterError);
}

TEST_CASE("same seed, same variate sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_gamma(0.7, 1.3, a) == sample_gamma(0.7, 1.3, b));
    CHECK(sample_beta(0.2, 3.0, a) == sample_beta(0.2, 3.0, b));
  }
}

TEST_CASE("invalid shapes and rates are rejected") {
  Rng rng(7);
  CHECK_THROWS_AS(sample_gamma(0.0, 1.0, rng), ParameterError);
  CHECK_THROWS_AS(sample_gamma(1.0, -1.0, rng), ParameterError);
  CHECK_THROWS_AS(sample_beta(1.0, std::nan(""), rng), ParameterError);
}
