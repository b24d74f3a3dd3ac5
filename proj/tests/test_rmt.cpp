#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "macfb/numerics.hpp"
#include "macfb/rmt.hpp"

namespace rmt = macfb::rmt;
using boost::math::quadrature::gauss_kronrod;

namespace {

// Integral of f against the continuous part of the law on [lo, hi]. The
// density has square-root edges (and a 1/sqrt pole at 0 when m_bar = 1),
// so a double-exponential rule is used.
template <typename F>
double integrate_density(F f, double lo, double hi, double m_bar) {
  boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate([&](double x) { return f(x) * rmt::mp_density(x, m_bar); }, lo, hi, 1e-13);
}

// Eigenvalues of (1/m) H H^H for an n x m CN(0,1) matrix, decreasing.
Eigen::VectorXd wishart_spectrum(macfb::RngStream& rng, int n, int m) {
  const auto h = macfb::sample_gaussian_matrix(rng, n, m).eigen();
  const Eigen::MatrixXcd w = h * h.adjoint() / double(m);
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(w, Eigen::EigenvaluesOnly).eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
  return ev;
}

}  // namespace

TEST(MpSupport, Edges) {
  auto [lo, hi] = rmt::mp_support(1.0);
  EXPECT_DOUBLE_EQ(lo, 0.0);
  EXPECT_DOUBLE_EQ(hi, 4.0);
  std::tie(lo, hi) = rmt::mp_support(4.0);
  EXPECT_NEAR(lo, 0.25, 1e-15);
  EXPECT_NEAR(hi, 2.25, 1e-15);
  std::tie(lo, hi) = rmt::mp_support(0.25);
  EXPECT_NEAR(lo, 1.0, 1e-15);
  EXPECT_NEAR(hi, 9.0, 1e-15);
  EXPECT_THROW(rmt::mp_support(0.0), std::invalid_argument);
}

TEST(MpDensity, TotalMassIsOne) {
  for (double m_bar : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const auto law = rmt::mp_law(m_bar);
    const double bulk = integrate_density([](double) { return 1.0; }, law.lambda_minus, law.lambda_plus, m_bar);
    EXPECT_NEAR(bulk + law.atom(), 1.0, 1e-9) << m_bar;
    EXPECT_NEAR(bulk, law.bulk(), 1e-9);
  }
}

TEST(MpTailMass, MatchesQuadrature) {
  EXPECT_NEAR(rmt::mp_tail_mass(1.0, 1.0), integrate_density([](double) { return 1.0; }, 1.0, 4.0, 1.0), 1e-8);
  for (double m_bar : {0.25, 0.5, 2.0, 4.0}) {
    const auto law = rmt::mp_law(m_bar);
    for (double f : {0.1, 0.3, 0.5, 0.9}) {
      const double a = law.lambda_minus + f * (law.lambda_plus - law.lambda_minus);
      EXPECT_NEAR(rmt::mp_tail_mass(a, m_bar),
                  integrate_density([](double) { return 1.0; }, a, law.lambda_plus, m_bar), 1e-8)
          << m_bar << " " << a;
    }
  }
}

TEST(MpTailMass, EdgesClamp) {
  EXPECT_DOUBLE_EQ(rmt::mp_tail_mass(4.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(rmt::mp_tail_mass(5.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(rmt::mp_tail_mass(0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(rmt::mp_tail_mass(0.1, 0.5), 0.5);
  EXPECT_NEAR(rmt::mp_tail_mass(4.0 - 1e-9, 1.0), 0.0, 1e-12);
}

TEST(SolveThreshold, InverseOfTailMass) {
  for (double m_bar : {0.5, 1.0, 3.0}) {
    const auto law = rmt::mp_law(m_bar);
    const double a0 = 0.5 * (law.lambda_minus + law.lambda_plus);
    EXPECT_NEAR(rmt::solve_threshold(rmt::mp_tail_mass(a0, m_bar), m_bar), a0, 1e-8);
  }
  const double a = rmt::solve_threshold(0.5, 1.0);
  EXPECT_NEAR(integrate_density([](double) { return 1.0; }, a, 4.0, 1.0), 0.5, 1e-9);
  EXPECT_GT(rmt::solve_threshold(1e-6, 1.0), 3.9);
  EXPECT_THROW(rmt::solve_threshold(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(rmt::solve_threshold(0.6, 0.5), std::invalid_argument);
}

TEST(ZetaBar, MatchesQuadratureOfTruncatedMean) {
  for (double m_bar : {0.5, 1.0, 2.0, 4.0}) {
    const auto law = rmt::mp_law(m_bar);
    for (double tau_frac : {0.1, 0.4, 0.8}) {
      const double tau = tau_frac * law.bulk();
      const double a = rmt::solve_threshold(tau, m_bar);
      const double oracle = integrate_density([](double x) { return x; }, a, law.lambda_plus, m_bar);
      EXPECT_NEAR(rmt::zeta_bar(tau, m_bar), oracle, 1e-8) << m_bar << " " << tau;
    }
  }
}

TEST(ZetaBar, MonotoneAndBounded) {
  double prev = 0.0;
  for (double tau = 0.05; tau < 1.0; tau += 0.05) {
    const double z = rmt::zeta_bar(tau, 1.0);
    EXPECT_GT(z, prev);
    EXPECT_LE(z, tau * 4.0 + 1e-12);
    EXPECT_LE(z, 1.0 + 1e-12);
    prev = z;
  }
  EXPECT_NEAR(rmt::zeta_bar(1.0 - 1e-6, 1.0), 1.0, 1e-6);
}

TEST(ZetaBar, MonteCarloTopEighth) {
  macfb::RngStream rng(21, 0);
  const int n = 64;
  const int trials = 1000;
  double total = 0.0;
  for (int t = 0; t < trials; ++t) total += wishart_spectrum(rng, n, n).head(n / 8).sum() / n;
  const double mc = total / trials;
  EXPECT_LT(std::abs(rmt::zeta_bar(1.0 / 8, 1.0) - mc) / mc, 0.03);
}

TEST(Zeta1, ExactTwoByTwoOracle) {
  // E[lambda_1 | tr = 1] for a 2x2 complex Wishart with m = 2: the ordered
  // eigenvalues on the simplex have density proportional to (l1 - l2)^2.
  const auto num = gauss_kronrod<double, 31>::integrate(
      [](double x) { return x * (2 * x - 1) * (2 * x - 1); }, 0.5, 1.0);
  const auto den = gauss_kronrod<double, 31>::integrate([](double x) { return (2 * x - 1) * (2 * x - 1); }, 0.5, 1.0);
  const double exact = num / den;
  EXPECT_NEAR(exact, 7.0 / 8.0, 1e-14);

  macfb::RngStream rng(4, 4);
  double total = 0.0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    const auto ev = wishart_spectrum(rng, 2, 2);
    total += ev(0) / ev.sum();
  }
  EXPECT_NEAR(total / trials, exact, 0.005);
  EXPECT_NEAR(rmt::zeta1_approx(2, 2), exact, 0.1);
  EXPECT_NEAR(rmt::conditioned_eigenvalue(1, 2, 2, 1.0), exact, 0.1);
}

TEST(Zeta1, ConventionsAndMonotonicity) {
  EXPECT_DOUBLE_EQ(rmt::zeta1_approx(1, 5), 1.0);
  EXPECT_DOUBLE_EQ(rmt::zeta1_approx(4, 2), rmt::zeta1_approx(2, 4));
  double prev = 1.0;
  for (int n = 2; n <= 64; n *= 2) {
    const double z = rmt::zeta1_approx(n, n);
    EXPECT_LT(z, prev);
    EXPECT_LE(z * n, 4.0 + 1e-9);
    prev = z;
  }
}

TEST(ConditionedEigenvalue, HomogeneityAndErrors) {
  EXPECT_DOUBLE_EQ(rmt::conditioned_eigenvalue(1, 3, 5, 0.0), 0.0);
  EXPECT_NEAR(rmt::conditioned_eigenvalue(1, 3, 5, 2.4), 2.0 * rmt::conditioned_eigenvalue(1, 3, 5, 1.2), 1e-14);
  EXPECT_THROW(rmt::conditioned_eigenvalue(2, 3, 5, 1.0), rmt::UnsupportedIndex);
}

TEST(ShannonTransform, EqualsIntegralAgainstLaw) {
  for (double m_bar : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const auto law = rmt::mp_law(m_bar);
    for (double c : {0.1, 1.0, 10.0, 100.0}) {
      const double nats = integrate_density([&](double x) { return std::log1p(c * m_bar * x); }, law.lambda_minus,
                                            law.lambda_plus, m_bar);
      EXPECT_NEAR(rmt::shannon_transform(c, m_bar), nats / std::numbers::ln2, 1e-8 * (1 + nats)) << m_bar << " " << c;
    }
  }
}

TEST(ShannonTransform, LimitsMonotonicityConcavity) {
  EXPECT_DOUBLE_EQ(rmt::shannon_transform(0.0, 2.0), 0.0);
  for (double m_bar : {0.5, 1.0, 2.0}) {
    const double h = 1e-7;
    const double slope = rmt::shannon_transform(h, m_bar) / h * std::numbers::ln2;
    EXPECT_NEAR(slope, m_bar, 1e-4);
    double prev = 0.0;
    double prev_step = INFINITY;
    for (double c = 0.5; c <= 20.0; c += 0.5) {
      const double v = rmt::shannon_transform(c, m_bar);
      EXPECT_GT(v, prev);
      EXPECT_LT(v - prev, prev_step + 1e-12);
      prev_step = v - prev;
      prev = v;
    }
  }
  EXPECT_THROW(rmt::shannon_transform(-1.0, 1.0), std::invalid_argument);
}

TEST(MpLaw, EmpiricalSpectrumSmallCheck) {
  macfb::RngStream rng(8, 1);
  const int n = 64;
  const auto ev = wishart_spectrum(rng, n, 2 * n);
  std::vector<double> sorted(ev.data(), ev.data() + n);
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = rmt::mp_cdf(sorted[i], 2.0);
    ks = std::max({ks, std::abs(cdf - double(i) / n), std::abs(cdf - double(i + 1) / n)});
  }
  EXPECT_LT(ks, 0.1);
}
