#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "macfb/numerics.hpp"

// Composite Grassmann manifold G^{(m)}_{n,1}(C): m-tuples of lines in C^n.
// Runtime points carry one unit vector per component; the distortion-rate
// and ball-volume formulas are closed-form and accept general p and beta.

namespace macfb::grassmann {

/// Largest codebook accepted by the exhaustive quantizer (2^16).
inline constexpr std::int64_t kMaxCodebookSize = std::int64_t{1} << 16;

/// m unit vectors in C^n, stored as the columns of an n x m matrix.
class CompositePoint {
 public:
  /// Throws std::invalid_argument unless every column has unit norm (1e-10).
  explicit CompositePoint(Eigen::MatrixXcd generators);
  /// Normalizes every column first; zero columns are rejected.
  static CompositePoint normalized(Eigen::MatrixXcd columns);

  int ambient_dim() const { return static_cast<int>(g_.rows()); }
  int components() const { return static_cast<int>(g_.cols()); }
  const Eigen::MatrixXcd& generators() const { return g_; }
  auto component(int j) const { return g_.col(j); }

 private:
  Eigen::MatrixXcd g_;
};

/// Squared chordal distance: sum over components of 1 - |p_j^H q_j|^2.
double chordal_distance_sq(const CompositePoint& p, const CompositePoint& q);

/// Isotropically distributed point (normalized CN(0, I) columns).
CompositePoint random_point(int n, int m, RngStream& rng);

/// Immutable finite set of composite points sharing (n, m).
class Codebook {
 public:
  Codebook(std::vector<CompositePoint> points, std::uint64_t master_seed = 0, std::uint64_t stream_id = 0);

  int ambient_dim() const { return n_; }
  int components() const { return m_; }
  std::int64_t size() const { return size_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  CompositePoint point(std::int64_t index) const;
  /// n x K matrix holding component j of every codeword.
  const Eigen::MatrixXcd& component_block(int j) const { return blocks_[static_cast<std::size_t>(j)]; }

 private:
  friend Codebook decode_codebook(std::span<const std::uint8_t>);
  Codebook(int n, int m, std::int64_t size, std::vector<Eigen::MatrixXcd> blocks, std::uint64_t master_seed,
           std::uint64_t stream_id);

  int n_;
  int m_;
  std::int64_t size_;
  std::vector<Eigen::MatrixXcd> blocks_;
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
};

/// K isotropic points drawn from rng; records rng's identifiers.
Codebook random_codebook(int n, int m, std::int64_t size, RngStream rng);

/// Codebook whose codewords are all tuples of the given single-component
/// books; component 0 varies fastest in the index.
Codebook cartesian_product(std::span<const Codebook> books);

struct Quantization {
  std::int64_t index;
  double distortion;
};

/// Nearest codeword in squared chordal distance (exhaustive scan, lowest
/// index on ties). Equivalent to maximizing sum_k |v_k^H b_k|^2.
Quantization quantize(const CompositePoint& v, const Codebook& book);

struct IndividualQuantization {
  std::vector<std::int64_t> indices;
  double distortion;
};

/// Quantizes component k of v with books[k] (each a one-component book).
IndividualQuantization quantize_individual(const CompositePoint& v, std::span<const Codebook> books);

struct Estimate {
  double mean;
  double standard_error;
};

/// Monte Carlo estimate of E[min_P d_c^2(P, Q)] over isotropic Q.
Estimate measure_distortion(const Codebook& book, int samples, RngStream rng);

// ---------------------------------------------------------------------------
// Closed forms. beta = 1 (real) or 2 (complex); t = beta p (n - p).

double c_constant(int n, int p, int beta);
double log_c_constant(int n, int p, int beta);

struct VolumeEstimate {
  double value;
  bool in_regime;  // delta <= 1, where the formula is exact to leading order
};

/// Isotropic measure of a chordal ball of radius delta in G^{(m)}_{n,p}.
VolumeEstimate ball_volume(int n, int p, int m, int beta, double delta);

struct DrfQuery {
  int n = 2;
  int p = 1;
  int m = 1;
  int beta = 2;
  double log2_size = 0.0;  // log2 K

  static DrfQuery with_bits(int n, int p, int m, int beta, double bits) { return {n, p, m, beta, bits}; }
  int t() const { return beta * p * (n - p); }
  void validate() const;
};

struct DrfBounds {
  double lower;
  double upper;
  bool premise;  // the "K sufficiently large" condition holds
};

struct DrfEstimate {
  double value;
  bool premise;
};

/// Leading-order lower/upper bounds on the distortion-rate function.
/// Requires K >= 2. Degenerate t = 0 gives zero bounds.
DrfBounds drf_bounds(const DrfQuery& q);

/// Working estimate of D*(K): the upper bound with higher-order terms dropped.
DrfEstimate drf_approx(const DrfQuery& q);

/// Large-dimension limit m p 2^{-2 r / (beta m p)} for log2 K / n -> r.
DrfEstimate drf_asymptotic(int p, int m, int beta, double r);

// ---------------------------------------------------------------------------
// Serialization. Little-endian binary: "MACFBCB1", u32 version, u32 n,
// u32 m, u32 reserved, u64 K, u64 master_seed, u64 stream_id, then K*m*n
// (re, im) float64 pairs ordered codeword, component, entry.

std::vector<std::uint8_t> encode_codebook(const Codebook& book);
Codebook decode_codebook(std::span<const std::uint8_t> bytes);
void write_codebook(const std::filesystem::path& path, const Codebook& book);
Codebook read_codebook(const std::filesystem::path& path);

}  // namespace macfb::grassmann
