#include "macfb/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace macfb {

namespace {

constexpr double kHermitianTolerance = 1e-9;

void require_finite(const Eigen::MatrixXcd& m) {
  if (!m.allFinite()) {
    throw std::invalid_argument("ComplexMatrix: non-finite entry");
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(Index rows, Index cols) : m_(Eigen::MatrixXcd::Zero(rows, cols)) {
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("ComplexMatrix: negative dimension");
  }
}

ComplexMatrix::ComplexMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) { require_finite(m_); }

ComplexMatrix ComplexMatrix::identity(Index n) {
  return ComplexMatrix(Eigen::MatrixXcd::Identity(n, n), Trusted{});
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& d) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
  }
  return ComplexMatrix(std::move(m));
}

void ComplexMatrix::set(Index i, Index j, Complex value) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw std::invalid_argument("ComplexMatrix::set: non-finite entry");
  }
  m_(i, j) = value;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("ComplexMatrix: product dimension mismatch");
  }
  return ComplexMatrix(Eigen::MatrixXcd(a.m_ * b.m_));
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("ComplexMatrix: sum dimension mismatch");
  }
  return ComplexMatrix(Eigen::MatrixXcd(a.m_ + b.m_));
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("ComplexMatrix: difference dimension mismatch");
  }
  return ComplexMatrix(Eigen::MatrixXcd(a.m_ - b.m_));
}

ComplexMatrix operator*(double s, const ComplexMatrix& a) {
  return ComplexMatrix(Eigen::MatrixXcd(s * a.m_));
}

// ---------------------------------------------------------------------------

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t master, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id), engine_(seeded_engine(master_seed, stream_id)) {}

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(master_seed_, mix64(stream_id_ ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

double RngStream::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double RngStream::normal() { return normal_(engine_); }

Complex RngStream::complex_normal() {
  constexpr double kScale = 0.70710678118654752440;  // 1/sqrt(2)
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {kScale * re, kScale * im};
}

double RngStream::gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(engine_); }

ComplexMatrix sample_gaussian_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("sample_gaussian_matrix: dimensions must be >= 1");
  }
  Eigen::MatrixXcd m(rows, cols);
  // Column-major fill keeps the sequence independent of Eigen's storage order.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = rng.complex_normal();
    }
  }
  return ComplexMatrix(std::move(m));
}

// ---------------------------------------------------------------------------

SvdResult svd(const ComplexMatrix& a) {
  const auto& m = a.eigen();
  if (m.size() == 0) {
    throw std::invalid_argument("svd: empty matrix");
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("svd: decomposition did not converge");
  }
  const Eigen::VectorXd& s = solver.singularValues();
  if (!s.allFinite() || !solver.matrixU().allFinite() || !solver.matrixV().allFinite()) {
    throw NumericalError("svd: non-finite factor");
  }
  SvdResult out{ComplexMatrix(solver.matrixU()), std::vector<double>(s.data(), s.data() + s.size()),
                ComplexMatrix(solver.matrixV())};
  // Eigen already returns decreasing order; enforce it as a contract.
  if (!std::is_sorted(out.sigma.begin(), out.sigma.end(), std::greater<>())) {
    throw NumericalError("svd: singular values not ordered");
  }
  return out;
}

double logdet_hermitian_psd(const ComplexMatrix& a) {
  const auto& m = a.eigen();
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("logdet_hermitian_psd: matrix is not square");
  }
  if (m.size() == 0) {
    return 0.0;
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance * scale) {
    throw std::invalid_argument("logdet_hermitian_psd: matrix is not Hermitian");
  }
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(m);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError("logdet_hermitian_psd: factorization failed");
  }
  const Eigen::VectorXcd d = ldlt.vectorD();
  double nats = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double pivot = d(i).real();
    if (pivot < -kHermitianTolerance * scale) {
      throw std::domain_error("logdet_hermitian_psd: matrix is not positive semidefinite");
    }
    if (pivot <= 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    nats += std::log(pivot);
  }
  return nats_to_rate(nats);
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace macfb
