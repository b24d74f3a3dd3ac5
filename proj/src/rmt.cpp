#include "macfb/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "macfb/numerics.hpp"

namespace macfb::rmt {

namespace {

constexpr double kEdgeSnap = 1e-12;
constexpr double kPi = std::numbers::pi;

void require_ratio(double m_bar) {
  if (!(m_bar > 0.0) || !std::isfinite(m_bar)) {
    throw std::invalid_argument("rmt: aspect ratio m_bar must be positive and finite");
  }
}

double safe_asin(double x) { return std::asin(std::clamp(x, -1.0, 1.0)); }

double edge_root(double a, const MpLaw& law) {
  return std::sqrt(std::max(0.0, (law.lambda_plus - a) * (a - law.lambda_minus)));
}

void require_tau(double tau, const MpLaw& law) {
  if (!(tau > 0.0) || !(tau < law.bulk())) {
    throw std::invalid_argument("rmt: tau must lie in (0, min(1, m_bar))");
  }
}

}  // namespace

MpLaw mp_law(double m_bar) {
  require_ratio(m_bar);
  const double r = std::sqrt(1.0 / m_bar);
  return MpLaw{m_bar, (1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

std::pair<double, double> mp_support(double m_bar) {
  const MpLaw law = mp_law(m_bar);
  return {law.lambda_minus, law.lambda_plus};
}

double mp_density(double lambda, double m_bar) {
  const MpLaw law = mp_law(m_bar);
  if (lambda <= law.lambda_minus || lambda >= law.lambda_plus || lambda <= 0.0) return 0.0;
  return m_bar * edge_root(lambda, law) / (2.0 * kPi * lambda);
}

double mp_tail_mass(double a, double m_bar) {
  const MpLaw law = mp_law(m_bar);
  if (a >= law.lambda_plus - kEdgeSnap) return 0.0;
  if (a <= law.lambda_minus + kEdgeSnap) return law.bulk();
  const double mb = m_bar;
  const double centre_gap = 1.0 + 1.0 / mb - a;
  double bracket = -edge_root(a, law) + (1.0 + mb) / mb * (kPi / 2.0 + safe_asin(std::sqrt(mb) * centre_gap / 2.0));
  if (mb != 1.0) {
    const double inner = std::sqrt(mb) / 2.0 * ((1.0 + 1.0 / mb) * a - (1.0 - 1.0 / mb) * (1.0 - 1.0 / mb)) / a;
    bracket -= std::abs(mb - 1.0) / mb * (kPi / 2.0 - safe_asin(inner));
  }
  return std::clamp(mb / (2.0 * kPi) * bracket, 0.0, law.bulk());
}

double mp_cdf(double x, double m_bar) {
  const MpLaw law = mp_law(m_bar);
  if (x < 0.0) return 0.0;
  return std::clamp(law.atom() + law.bulk() - mp_tail_mass(x, m_bar), 0.0, 1.0);
}

double solve_threshold(double tau, double m_bar) {
  const MpLaw law = mp_law(m_bar);
  require_tau(tau, law);
  double lo = law.lambda_minus;  // tail mass = bulk > tau
  double hi = law.lambda_plus;   // tail mass = 0 < tau
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mp_tail_mass(mid, m_bar) > tau) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double a = 0.5 * (lo + hi);
  if (std::abs(mp_tail_mass(a, m_bar) - tau) > 1e-10) {
    throw NumericalError("solve_threshold: bisection did not reach tolerance");
  }
  return a;
}

double zeta_bar(double tau, double m_bar) {
  const MpLaw law = mp_law(m_bar);
  require_tau(tau, law);
  const double a = solve_threshold(tau, m_bar);
  const double mb = m_bar;
  const double centre_gap = 1.0 + 1.0 / mb - a;
  return mb / (2.0 * kPi) *
         (centre_gap / 2.0 * edge_root(a, law) + 2.0 / mb * (kPi / 2.0 + safe_asin(std::sqrt(mb) * centre_gap / 2.0)));
}

double zeta1_approx(int n, int m) {
  if (n < 1 || m < 1) throw std::invalid_argument("zeta1_approx: dimensions must be >= 1");
  if (n > m) std::swap(n, m);
  if (n == 1) return 1.0;
  return zeta_bar(1.0 / n, static_cast<double>(m) / n);
}

double shannon_transform(double c, double m_bar) {
  require_ratio(m_bar);
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("shannon_transform: c must be >= 0");
  if (c == 0.0) return 0.0;
  const double r = std::sqrt(m_bar);
  const double root_sum = std::sqrt(1.0 + c * (1.0 + r) * (1.0 + r)) + std::sqrt(1.0 + c * (1.0 - r) * (1.0 - r));
  // F = (sqrt(1 + c(1+r)^2) - sqrt(1 + c(1-r)^2))^2, rewritten without cancellation.
  const double f = 16.0 * c * c * m_bar / (root_sum * root_sum);
  const double f_over_4c = 4.0 * c * m_bar / (root_sum * root_sum);
  const double nats = m_bar * std::log1p(c - f / 4.0) + std::log1p(c * m_bar - f / 4.0) - f_over_4c;
  return nats_to_rate(nats);
}

double conditioned_eigenvalue(int index, int n, int m, double c) {
  if (index != 1) throw UnsupportedIndex("conditioned_eigenvalue: only the largest eigenvalue is supported");
  if (c < 0.0) throw std::invalid_argument("conditioned_eigenvalue: trace must be >= 0");
  return zeta1_approx(std::min(n, m), std::max(n, m)) * c;
}

}  // namespace macfb::rmt
