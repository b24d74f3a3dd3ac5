#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace macfb {

using Complex = std::complex<double>;

/// Natural-log units per reported rate unit. Rates are reported in bits.
inline constexpr double kNatsPerRateUnit = std::numbers::ln2;

inline double nats_to_rate(double nats) { return nats / kNatsPerRateUnit; }

/// Raised when a factorization or iterative routine fails to produce a
/// trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense complex matrix. Entries are always finite.
class ComplexMatrix {
 public:
  using Index = Eigen::Index;

  ComplexMatrix() = default;
  ComplexMatrix(Index rows, Index cols);
  explicit ComplexMatrix(Eigen::MatrixXcd m);

  static ComplexMatrix identity(Index n);
  static ComplexMatrix diagonal(const std::vector<double>& d);

  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }

  Complex operator()(Index i, Index j) const { return m_(i, j); }
  void set(Index i, Index j, Complex value);

  const Eigen::MatrixXcd& eigen() const { return m_; }

  double frobenius_norm() const { return m_.norm(); }
  double squared_norm() const { return m_.squaredNorm(); }
  Eigen::VectorXcd col(Index j) const { return m_.col(j); }

  ComplexMatrix adjoint() const { return ComplexMatrix(Eigen::MatrixXcd(m_.adjoint()), Trusted{}); }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator*(double s, const ComplexMatrix& a);

 private:
  struct Trusted {};
  ComplexMatrix(Eigen::MatrixXcd m, Trusted) : m_(std::move(m)) {}

  Eigen::MatrixXcd m_;
};

/// Reproducible stream of random scalars identified by (master_seed, stream_id).
///
/// The engine state is a pure function of the two identifiers, so a stream
/// can be rebuilt anywhere (any thread, any run) and yields the same
/// sequence. Child streams are derived by mixing the parent id with a
/// sub-index; siblings never share an engine seed.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  RngStream substream(std::uint64_t index) const;

  double uniform();
  double normal();
  /// Circularly symmetric CN(0,1): real and imaginary parts N(0, 1/2).
  Complex complex_normal();
  double gamma(double shape);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to derive stream identifiers.
std::uint64_t mix64(std::uint64_t x);

ComplexMatrix sample_gaussian_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols);

struct SvdResult {
  ComplexMatrix u;            // rows x k, orthonormal columns
  std::vector<double> sigma;  // k = min(rows, cols), decreasing
  ComplexMatrix v;            // cols x k, orthonormal columns
};

/// Thin SVD with A = U diag(sigma) V^H.
SvdResult svd(const ComplexMatrix& a);

/// log det(M) in rate units for Hermitian positive semidefinite M.
///
/// Throws std::invalid_argument if M is not square or is non-Hermitian beyond
/// 1e-9 (relative to its largest entry), std::domain_error if a pivot is
/// negative beyond round-off. Returns -inf for singular M.
double logdet_hermitian_psd(const ComplexMatrix& m);

/// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace macfb
