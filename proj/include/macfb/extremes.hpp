#pragma once

// Extreme order statistics of sums of L squared CN(0,1) magnitudes, i.e.
// Gamma(L, 1) variables: the normalizing sequences of the Gumbel limit and
// the resulting approximation for the expected sum of the s largest draws.

namespace macfb::extremes {

/// Population of n Gamma(L,1) draws of which the s largest are summed.
struct OrderStatModel {
  int L = 1;
  int n = 2;
  int s = 1;

  /// Throws std::invalid_argument unless L >= 1, n >= 2 and 1 <= s <= n.
  void validate() const;
  /// The approximation is asymptotic in n for fixed s; it degrades once s is
  /// no longer small against n.
  bool asymptotic_regime() const { return 4 * s <= n; }
};

/// P(X > x) for X ~ Gamma(L, 1): e^{-x} sum_{i<L} x^i / i!.
double survival(double x, int L);

/// Location normalizer a_n: the point where survival(., L) = 1/n.
double location(int L, int n);

/// Scale normalizer b_n = R(a_n), the mean-excess ratio at a.
double scale(int L, double a);

/// Mean of the k-th largest point of the Gumbel limit process.
/// mu(1) is integrated numerically; mu(k) = mu(1) - H_{k-1}.
double gumbel_mean(int k);

/// Approximation of E[sum of the s largest of n Gamma(L,1) draws].
/// Emits a warning through the diagnostics sink when !asymptotic_regime().
double expected_top_sum(const OrderStatModel& model);

}  // namespace macfb::extremes
