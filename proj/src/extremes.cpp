#include "macfb/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "macfb/diagnostics.hpp"
#include "macfb/numerics.hpp"

namespace macfb::extremes {

namespace {

double harmonic(int k) {
  double h = 0.0;
  for (int i = 1; i <= k; ++i) {
    h += 1.0 / i;
  }
  return h;
}

// log(a^i / i!) for i = 0..L-1.
std::vector<double> log_poisson_terms(double a, int L) {
  std::vector<double> out(static_cast<std::size_t>(L));
  const double log_a = std::log(a);
  for (int i = 0; i < L; ++i) {
    out[static_cast<std::size_t>(i)] = i * log_a - std::lgamma(i + 1.0);
  }
  return out;
}

double integrate_gumbel_mean() {
  using boost::math::quadrature::gauss_kronrod;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // x dG(x) with G(x) = exp(-e^{-x}); written so that e^{-x} overflow maps to 0.
  auto integrand = [](double x) { return x * std::exp(-x - std::exp(-x)); };
  // Split at the mode; the doubly infinite mapping gives unreliable error estimates.
  double left_error = 0.0;
  double right_error = 0.0;
  const double value = gauss_kronrod<double, 61>::integrate(integrand, -inf, 0.0, 20, 1e-14, &left_error) +
                       gauss_kronrod<double, 61>::integrate(integrand, 0.0, inf, 20, 1e-14, &right_error);
  if (!std::isfinite(value) || left_error + right_error > 1e-11) {
    throw NumericalError("gumbel_mean: quadrature did not reach tolerance");
  }
  return value;
}

}  // namespace

void OrderStatModel::validate() const {
  if (L < 1) throw std::invalid_argument("OrderStatModel: L must be >= 1");
  if (n < 2) throw std::invalid_argument("OrderStatModel: n must be >= 2");
  if (s < 1 || s > n) throw std::invalid_argument("OrderStatModel: need 1 <= s <= n");
}

double survival(double x, int L) {
  if (L < 1) throw std::invalid_argument("survival: L must be >= 1");
  if (x < 0.0) throw std::invalid_argument("survival: x must be >= 0");
  if (x == 0.0) return 1.0;
  double total = 0.0;
  for (double lt : log_poisson_terms(x, L)) {
    total += std::exp(lt - x);
  }
  return std::min(total, 1.0);
}

double location(int L, int n) {
  if (L < 1) throw std::invalid_argument("location: L must be >= 1");
  if (n < 2) throw std::invalid_argument("location: n must be >= 2");
  const double target = 1.0 / n;
  double lo = 0.0;
  double hi = L + 50.0 + 2.0 * std::log(static_cast<double>(n));
  if (survival(hi, L) > target) {
    throw std::logic_error("location: bisection bracket does not contain the root");
  }
  // Bisect to machine resolution; survival is strictly decreasing.
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (survival(mid, L) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double scale(int L, double a) {
  if (L < 1) throw std::invalid_argument("scale: L must be >= 1");
  if (a < 0.0) throw std::invalid_argument("scale: a must be >= 0");
  if (a == 0.0) return static_cast<double>(L);
  const auto logs = log_poisson_terms(a, L);
  double top = logs.front();
  for (double v : logs) top = std::max(top, v);
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < L; ++i) {
    const double w = std::exp(logs[static_cast<std::size_t>(i)] - top);
    num += (L - i) * w;
    den += w;
  }
  return num / den;
}

double gumbel_mean(int k) {
  if (k < 1) throw std::invalid_argument("gumbel_mean: k must be >= 1");
  static const double mu1 = integrate_gumbel_mean();
  return mu1 - harmonic(k - 1);
}

double expected_top_sum(const OrderStatModel& model) {
  model.validate();
  if (!model.asymptotic_regime()) {
    warn("expected_top_sum: s=" + std::to_string(model.s) + " is not small against n=" +
         std::to_string(model.n) + "; the order-statistics approximation is coarse");
  }
  const double a = location(model.L, model.n);
  const double b = scale(model.L, a);
  const double s = model.s;
  return s * a + s * b * (gumbel_mean(1) + 1.0 - harmonic(model.s));
}

}  // namespace macfb::extremes
