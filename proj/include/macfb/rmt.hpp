#pragma once

#include <stdexcept>
#include <utility>

// Marcenko-Pastur spectrum of (1/m) H H^H for an n x m standard complex
// Gaussian H with m/n -> m_bar, and the spectral functionals built on it.

namespace macfb::rmt {

struct MpLaw {
  double m_bar = 1.0;
  double lambda_minus = 0.0;
  double lambda_plus = 4.0;

  /// Weight of the atom at zero, (1 - m_bar)^+.
  double atom() const { return m_bar < 1.0 ? 1.0 - m_bar : 0.0; }
  /// Mass of the continuous part, min(1, m_bar).
  double bulk() const { return m_bar < 1.0 ? m_bar : 1.0; }
};

MpLaw mp_law(double m_bar);

/// (lambda_minus, lambda_plus) = ((1 -+ sqrt(1/m_bar))^2).
std::pair<double, double> mp_support(double m_bar);

/// Density of the continuous part at lambda (zero outside the support).
double mp_density(double lambda, double m_bar);

/// Integral of the law over [a, lambda_plus] (closed form). Arguments at or
/// outside the support edges clamp to min(1, m_bar) and 0.
double mp_tail_mass(double a, double m_bar);

/// Distribution function of the full law (atom included).
double mp_cdf(double x, double m_bar);

/// Threshold a in (lambda_minus, lambda_plus) with mp_tail_mass(a) = tau.
/// Requires tau in (0, min(1, m_bar)).
double solve_threshold(double tau, double m_bar);

/// Limit of E[(1/n) sum of the n*tau largest eigenvalues].
double zeta_bar(double tau, double m_bar);

/// Surrogate for E[lambda_1 | tr W = 1] of an n x m complex Wishart matrix:
/// zeta_bar(1/n, m/n) with n <= m (arguments are swapped otherwise).
/// n == 1 returns 1 exactly.
double zeta1_approx(int n, int m);

/// Shannon transform in rate units: limit of (1/n) E log|I + c P P^H| for an
/// n x m matrix P of isotropic unit columns, m/n -> m_bar. Equals
/// integral of log(1 + c m_bar lambda) against the law for every m_bar.
double shannon_transform(double c, double m_bar);

class UnsupportedIndex : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// E[lambda_index | tr(H H^H) = c] for an n x m complex Gaussian H. Only the
/// largest eigenvalue (index 1) is supported; it is homogeneous in c.
double conditioned_eigenvalue(int index, int n, int m, double c);

}  // namespace macfb::rmt
