#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "macfb/diagnostics.hpp"
#include "macfb/extremes.hpp"

namespace ex = macfb::extremes;

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

double harmonic(int k) {
  double h = 0.0;
  for (int i = 1; i <= k; ++i) h += 1.0 / i;
  return h;
}

// Mean of the s largest of n Gamma(L,1) draws over `populations` samples.
double top_sum_monte_carlo(int L, int n, int s, int populations, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::gamma_distribution<double> g(L, 1.0);
  std::vector<double> x(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int p = 0; p < populations; ++p) {
    for (auto& v : x) v = g(eng);
    std::partial_sort(x.begin(), x.begin() + s, x.end(), std::greater<>());
    total += std::accumulate(x.begin(), x.begin() + s, 0.0);
  }
  return total / populations;
}

}  // namespace

TEST(Survival, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(ex::survival(0.0, 3), 1.0);
  EXPECT_NEAR(ex::survival(std::log(2.0), 1), 0.5, 1e-15);
  EXPECT_THROW(ex::survival(-1.0, 1), std::invalid_argument);
  EXPECT_THROW(ex::survival(1.0, 0), std::invalid_argument);
}

TEST(Survival, MatchesRegularizedIncompleteGamma) {
  for (int L : {1, 2, 5, 8, 16}) {
    for (double x : {0.1, 1.0, 4.0, 12.0, 40.0}) {
      EXPECT_NEAR(ex::survival(x, L), boost::math::gamma_q(static_cast<double>(L), x), 1e-13) << L << " " << x;
    }
  }
}

TEST(Survival, MonotoneInXAndL) {
  for (int L = 1; L <= 10; ++L) {
    double prev = 1.0;
    for (double x = 0.25; x < 30.0; x += 0.25) {
      const double v = ex::survival(x, L);
      EXPECT_LT(v, prev);
      EXPECT_GT(ex::survival(x, L + 1), v);
      prev = v;
    }
  }
}

TEST(Survival, EmpiricalTail) {
  std::mt19937_64 eng(17);
  std::gamma_distribution<double> g(3.0, 1.0);
  const int n = 1000000;
  const double x = 5.0;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += g(eng) > x;
  const double p = ex::survival(x, 3);
  EXPECT_LT(std::abs(hits / double(n) - p), 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Location, ExponentialCase) {
  EXPECT_NEAR(ex::location(1, 256), 5.54518, 1e-5);
  for (int n : {2, 10, 1000, 1 << 20}) EXPECT_NEAR(ex::location(1, n), std::log(double(n)), 1e-12 * std::log(n));
}

TEST(Location, SolvesTailEquation) {
  for (int L : {1, 2, 4, 8, 32}) {
    for (int n : {2, 64, 512, 100000}) {
      const double a = ex::location(L, n);
      EXPECT_NEAR(ex::survival(a, L), 1.0 / n, 1e-10);
      // Independent oracle: inverse of the regularized upper incomplete gamma.
      EXPECT_NEAR(a, boost::math::gamma_q_inv(static_cast<double>(L), 1.0 / n), 1e-9 * a);
      EXPECT_GT(ex::location(L, 2 * n), a);
    }
  }
  EXPECT_THROW(ex::location(1, 1), std::invalid_argument);
}

TEST(Scale, KnownValues) {
  EXPECT_DOUBLE_EQ(ex::scale(1, 3.7), 1.0);
  EXPECT_NEAR(ex::scale(2, 1.0), 1.5, 1e-15);
  EXPECT_NEAR(ex::scale(4, 1e6), 1.0, 1e-5);
}

TEST(Scale, EqualsMeanExcess) {
  using boost::math::quadrature::gauss_kronrod;
  for (int L : {2, 4, 8}) {
    for (double a : {0.5, 3.0, 10.0}) {
      const double tail = gauss_kronrod<double, 61>::integrate(
          [L](double x) { return boost::math::gamma_q(static_cast<double>(L), x); }, a,
          std::numeric_limits<double>::infinity(), 15, 1e-13);
      EXPECT_NEAR(ex::scale(L, a), tail / boost::math::gamma_q(static_cast<double>(L), a), 1e-9);
    }
  }
}

TEST(GumbelMean, EulerMascheroniAndRecursion) {
  EXPECT_NEAR(ex::gumbel_mean(1), kEulerGamma, 1e-8);
  EXPECT_NEAR(ex::gumbel_mean(2), -0.4227843, 1e-7);
  EXPECT_NEAR(ex::gumbel_mean(4), ex::gumbel_mean(1) - 11.0 / 6.0, 1e-14);
  EXPECT_THROW(ex::gumbel_mean(0), std::invalid_argument);
}

TEST(GumbelMean, SumIdentity) {
  const double mu1 = ex::gumbel_mean(1);
  for (int s = 1; s <= 16; ++s) {
    double rhs = s * mu1;
    for (int i = 1; i < s; ++i) rhs -= double(s - i) / i;
    double sum_mu = 0.0;
    for (int k = 1; k <= s; ++k) sum_mu += ex::gumbel_mean(k);
    EXPECT_NEAR(s * (mu1 + 1.0 - harmonic(s)), rhs, 1e-12);
    EXPECT_NEAR(sum_mu, rhs, 1e-12);
  }
}

TEST(ExpectedTopSum, ExponentialSingleMaximum) {
  const int n = static_cast<int>(std::lround(std::exp(10.0)));
  EXPECT_NEAR(ex::expected_top_sum({1, n, 1}), std::log(double(n)) + kEulerGamma, 1e-8);
  const double a = ex::location(5, 100);
  EXPECT_NEAR(ex::expected_top_sum({5, 100, 1}), a + ex::scale(5, a) * ex::gumbel_mean(1), 1e-12);
}

TEST(ExpectedTopSum, MonteCarloSmallPopulation) {
  const double theory = ex::expected_top_sum({4, 256, 2});
  const double mc = top_sum_monte_carlo(4, 256, 2, 20000, 5);
  EXPECT_LT(std::abs(theory - mc) / mc, 0.03);
}

TEST(ExpectedTopSum, WarnsOutsideAsymptoticRegime) {
  std::vector<std::string> seen;
  auto previous = macfb::set_warning_sink([&](std::string_view m) { seen.emplace_back(m); });
  ex::expected_top_sum({2, 8, 2});
  EXPECT_TRUE(seen.empty());
  ex::expected_top_sum({2, 8, 3});
  macfb::set_warning_sink(previous);
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_NE(seen[0].find("s=3"), std::string::npos);
  EXPECT_THROW(ex::expected_top_sum({2, 8, 9}), std::invalid_argument);
}

TEST(GumbelLimit, NormalizedMaximumKolmogorovSmirnov) {
  const int L = 4;
  const int n = 1024;
  const int trials = 20000;
  const double a = ex::location(L, n);
  const double b = ex::scale(L, a);
  std::mt19937_64 eng(99);
  std::gamma_distribution<double> g(L, 1.0);
  std::vector<double> z(trials);
  for (auto& v : z) {
    double best = 0.0;
    for (int i = 0; i < n; ++i) best = std::max(best, g(eng));
    v = (best - a) / b;
  }
  std::sort(z.begin(), z.end());
  double ks = 0.0;
  for (int i = 0; i < trials; ++i) {
    const double cdf = std::exp(-std::exp(-z[i]));
    ks = std::max({ks, std::abs(cdf - double(i) / trials), std::abs(cdf - double(i + 1) / trials)});
  }
  EXPECT_LT(ks, 0.02);
}
