#include "macfb/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace macfb::grassmann {

namespace {

constexpr double kUnitTolerance = 1e-10;

void require_unit_columns(const Eigen::MatrixXcd& g) {
  if (g.rows() < 1 || g.cols() < 1) {
    throw std::invalid_argument("CompositePoint: need n >= 1 and m >= 1");
  }
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    if (std::abs(g.col(j).norm() - 1.0) > kUnitTolerance) {
      throw std::invalid_argument("CompositePoint: component " + std::to_string(j) + " is not unit norm");
    }
  }
}

void require_same_shape(int n1, int m1, int n2, int m2, const char* what) {
  if (n1 != n2 || m1 != m2) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

// Sum over components of |v_j^H B_j|^2 for every codeword of the book.
Eigen::RowVectorXd alignment_scores(const CompositePoint& v, const Codebook& book) {
  Eigen::RowVectorXd scores = Eigen::RowVectorXd::Zero(book.size());
  for (int j = 0; j < v.components(); ++j) {
    scores += (v.component(j).adjoint() * book.component_block(j)).cwiseAbs2();
  }
  return scores;
}

}  // namespace

CompositePoint::CompositePoint(Eigen::MatrixXcd generators) : g_(std::move(generators)) {
  require_unit_columns(g_);
}

CompositePoint CompositePoint::normalized(Eigen::MatrixXcd columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    const double norm = columns.col(j).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw std::invalid_argument("CompositePoint::normalized: zero or non-finite column");
    }
    columns.col(j) /= norm;
  }
  return CompositePoint(std::move(columns));
}

double chordal_distance_sq(const CompositePoint& p, const CompositePoint& q) {
  require_same_shape(p.ambient_dim(), p.components(), q.ambient_dim(), q.components(), "chordal_distance_sq");
  double total = 0.0;
  for (int j = 0; j < p.components(); ++j) {
    const double overlap = std::norm(p.component(j).dot(q.component(j)));
    total += std::max(0.0, 1.0 - overlap);
  }
  return total;
}

CompositePoint random_point(int n, int m, RngStream& rng) {
  if (n < 1 || m < 1) throw std::invalid_argument("random_point: need n >= 1 and m >= 1");
  return CompositePoint::normalized(sample_gaussian_matrix(rng, n, m).eigen());
}

// ---------------------------------------------------------------------------

Codebook::Codebook(std::vector<CompositePoint> points, std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {
  if (points.empty()) throw std::invalid_argument("Codebook: need at least one codeword");
  if (static_cast<std::int64_t>(points.size()) > kMaxCodebookSize) {
    throw std::invalid_argument("Codebook: size exceeds 2^16");
  }
  n_ = points.front().ambient_dim();
  m_ = points.front().components();
  size_ = static_cast<std::int64_t>(points.size());
  blocks_.assign(static_cast<std::size_t>(m_), Eigen::MatrixXcd(n_, size_));
  for (std::int64_t k = 0; k < size_; ++k) {
    const auto& p = points[static_cast<std::size_t>(k)];
    require_same_shape(n_, m_, p.ambient_dim(), p.components(), "Codebook");
    for (int j = 0; j < m_; ++j) {
      blocks_[static_cast<std::size_t>(j)].col(k) = p.component(j);
    }
  }
}

Codebook::Codebook(int n, int m, std::int64_t size, std::vector<Eigen::MatrixXcd> blocks, std::uint64_t master_seed,
                   std::uint64_t stream_id)
    : n_(n), m_(m), size_(size), blocks_(std::move(blocks)), master_seed_(master_seed), stream_id_(stream_id) {
  if (n < 1 || m < 1 || size < 1 || size > kMaxCodebookSize) {
    throw std::invalid_argument("Codebook: invalid dimensions");
  }
  if (blocks_.size() != static_cast<std::size_t>(m)) throw std::invalid_argument("Codebook: block count mismatch");
  for (const auto& b : blocks_) {
    if (b.rows() != n || b.cols() != size) throw std::invalid_argument("Codebook: block shape mismatch");
    for (Eigen::Index k = 0; k < size; ++k) {
      if (std::abs(b.col(k).norm() - 1.0) > kUnitTolerance) {
        throw std::invalid_argument("Codebook: codeword component is not unit norm");
      }
    }
  }
}

CompositePoint Codebook::point(std::int64_t index) const {
  if (index < 0 || index >= size_) throw std::out_of_range("Codebook::point: index out of range");
  Eigen::MatrixXcd g(n_, m_);
  for (int j = 0; j < m_; ++j) {
    g.col(j) = blocks_[static_cast<std::size_t>(j)].col(index);
  }
  return CompositePoint(std::move(g));
}

Codebook random_codebook(int n, int m, std::int64_t size, RngStream rng) {
  if (size < 1) throw std::invalid_argument("random_codebook: size must be >= 1");
  if (size > kMaxCodebookSize) throw std::invalid_argument("random_codebook: size exceeds 2^16");
  const auto seed = rng.master_seed();
  const auto id = rng.stream_id();
  std::vector<CompositePoint> points;
  points.reserve(static_cast<std::size_t>(size));
  for (std::int64_t k = 0; k < size; ++k) {
    points.push_back(random_point(n, m, rng));
  }
  return Codebook(std::move(points), seed, id);
}

Codebook cartesian_product(std::span<const Codebook> books) {
  if (books.empty()) throw std::invalid_argument("cartesian_product: no books");
  const int n = books.front().ambient_dim();
  std::int64_t total = 1;
  for (const auto& b : books) {
    if (b.components() != 1 || b.ambient_dim() != n) {
      throw std::invalid_argument("cartesian_product: books must be single-component with matching n");
    }
    total *= b.size();
    if (total > kMaxCodebookSize) throw std::invalid_argument("cartesian_product: size exceeds 2^16");
  }
  const int m = static_cast<int>(books.size());
  std::vector<CompositePoint> points;
  points.reserve(static_cast<std::size_t>(total));
  for (std::int64_t k = 0; k < total; ++k) {
    Eigen::MatrixXcd g(n, m);
    std::int64_t rest = k;
    for (int j = 0; j < m; ++j) {
      const auto& b = books[static_cast<std::size_t>(j)];
      g.col(j) = b.component_block(0).col(rest % b.size());
      rest /= b.size();
    }
    points.emplace_back(std::move(g));
  }
  return Codebook(std::move(points), books.front().master_seed(), books.front().stream_id());
}

// ---------------------------------------------------------------------------

Quantization quantize(const CompositePoint& v, const Codebook& book) {
  require_same_shape(v.ambient_dim(), v.components(), book.ambient_dim(), book.components(), "quantize");
  const Eigen::RowVectorXd scores = alignment_scores(v, book);
  std::int64_t best = 0;
  for (std::int64_t k = 1; k < book.size(); ++k) {
    if (scores(k) > scores(best)) best = k;
  }
  return {best, std::max(0.0, v.components() - scores(best))};
}

IndividualQuantization quantize_individual(const CompositePoint& v, std::span<const Codebook> books) {
  if (static_cast<int>(books.size()) != v.components()) {
    throw std::invalid_argument("quantize_individual: need one book per component");
  }
  IndividualQuantization out{{}, 0.0};
  out.indices.reserve(books.size());
  for (int j = 0; j < v.components(); ++j) {
    const auto& book = books[static_cast<std::size_t>(j)];
    const CompositePoint single(Eigen::MatrixXcd(v.component(j)));
    const Quantization q = quantize(single, book);
    out.indices.push_back(q.index);
    out.distortion += q.distortion;
  }
  return out;
}

Estimate measure_distortion(const Codebook& book, int samples, RngStream rng) {
  if (samples < 1) throw std::invalid_argument("measure_distortion: samples must be >= 1");
  CompensatedSum sum;
  CompensatedSum sum_sq;
  for (int i = 0; i < samples; ++i) {
    const double d = quantize(random_point(book.ambient_dim(), book.components(), rng), book).distortion;
    sum.add(d);
    sum_sq.add(d * d);
  }
  const double mean = sum.value() / samples;
  if (samples == 1) return {mean, 0.0};
  const double var = std::max(0.0, (sum_sq.value() - samples * mean * mean) / (samples - 1));
  return {mean, std::sqrt(var / samples)};
}

// ---------------------------------------------------------------------------

double log_c_constant(int n, int p, int beta) {
  if (p < 1 || p > n) throw std::invalid_argument("c_constant: need 1 <= p <= n");
  if (beta != 1 && beta != 2) throw std::invalid_argument("c_constant: beta must be 1 or 2");
  const double half_beta = 0.5 * beta;
  const double t = beta * p * (n - p);
  double out = -std::lgamma(t / 2.0 + 1.0);
  if (2 * p <= n) {
    for (int i = 1; i <= p; ++i) {
      out += std::lgamma(half_beta * (n - i + 1)) - std::lgamma(half_beta * (p - i + 1));
    }
  } else {
    for (int i = 1; i <= n - p; ++i) {
      out += std::lgamma(half_beta * (n - i + 1)) - std::lgamma(half_beta * (n - p - i + 1));
    }
  }
  return out;
}

double c_constant(int n, int p, int beta) { return std::exp(log_c_constant(n, p, beta)); }

VolumeEstimate ball_volume(int n, int p, int m, int beta, double delta) {
  if (m < 1) throw std::invalid_argument("ball_volume: m must be >= 1");
  if (!(delta >= 0.0)) throw std::invalid_argument("ball_volume: delta must be >= 0");
  const double t = beta * p * (n - p);
  const double log_c = log_c_constant(n, p, beta);
  if (t == 0.0) return {1.0, delta <= 1.0};
  if (delta == 0.0) return {0.0, true};
  const double log_v =
      m * std::lgamma(t / 2.0 + 1.0) - std::lgamma(m * t / 2.0 + 1.0) + m * log_c + m * t * std::log(delta);
  return {std::clamp(std::exp(log_v), 0.0, 1.0), delta <= 1.0};
}

void DrfQuery::validate() const {
  if (n < 1 || p < 1 || p > n) throw std::invalid_argument("DrfQuery: need 1 <= p <= n");
  if (m < 1) throw std::invalid_argument("DrfQuery: m must be >= 1");
  if (beta != 1 && beta != 2) throw std::invalid_argument("DrfQuery: beta must be 1 or 2");
  if (!(log2_size >= 0.0) || !std::isfinite(log2_size)) {
    throw std::invalid_argument("DrfQuery: log2 K must be finite and >= 0");
  }
}

DrfBounds drf_bounds(const DrfQuery& q) {
  q.validate();
  if (q.log2_size < 1.0) throw std::invalid_argument("drf_bounds: need K >= 2");
  const double t = q.t();
  if (t == 0.0) return {0.0, 0.0, true};
  const double mt = q.m * t;
  // log2 of X; the premise X <= 1 uses the same constants as the bound body.
  const double log_x = (2.0 / mt) * std::lgamma(mt / 2.0 + 1.0) - (2.0 / t) * std::lgamma(t / 2.0 + 1.0) -
                       (2.0 / t) * log_c_constant(q.n, q.p, q.beta) - (2.0 * q.log2_size / mt) * std::numbers::ln2;
  const double x = std::exp(log_x);
  const double lower = mt / (mt + 2.0) * x;
  const double upper = (2.0 / mt) * std::tgamma(2.0 / mt) * x;
  return {lower, upper, x <= 1.0};
}

DrfEstimate drf_approx(const DrfQuery& q) {
  const DrfBounds b = drf_bounds(q);
  return {b.upper, b.premise};
}

DrfEstimate drf_asymptotic(int p, int m, int beta, double r) {
  if (p < 1 || m < 1) throw std::invalid_argument("drf_asymptotic: need p, m >= 1");
  if (beta != 1 && beta != 2) throw std::invalid_argument("drf_asymptotic: beta must be 1 or 2");
  const double mp = static_cast<double>(m) * p;
  const double value = mp * std::exp2(-2.0 * r / (beta * mp));
  return {value, value <= 1.0};
}

}  // namespace macfb::grassmann
