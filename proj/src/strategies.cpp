#include "macfb/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "macfb/extremes.hpp"
#include "macfb/rmt.hpp"

namespace macfb::strategies {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

double log2_binomial(int n, int k) {
  return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::numbers::ln2;
}

// log2|I + scale G G^H|, evaluated on the smaller Gram matrix.
double log2det_gram(const Eigen::MatrixXcd& g, double scale) {
  if (scale == 0.0 || g.size() == 0) return 0.0;
  Eigen::MatrixXcd gram = g.rows() <= g.cols() ? Eigen::MatrixXcd(g * g.adjoint()) : Eigen::MatrixXcd(g.adjoint() * g);
  gram *= scale;
  gram.diagonal().array() += 1.0;
  // Symmetrize away the rounding of the product before the Hermitian check.
  gram = (0.5 * (gram + gram.adjoint())).eval();
  return std::max(0.0, logdet_hermitian_psd(ComplexMatrix(std::move(gram))));
}

std::vector<int> top_indices(const std::vector<double>& scores, int s) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(s));
  return order;
}

double eta_of(const Eigen::MatrixXcd& effective, const SystemConfig& cfg) {
  return effective.squaredNorm() / (static_cast<double>(cfg.s) * cfg.L_R);
}

void require_channels(std::span<const ComplexMatrix> channels, const SystemConfig& cfg) {
  require(static_cast<int>(channels.size()) == cfg.N, "channels: expected N matrices");
  for (const auto& h : channels) {
    require(h.rows() == cfg.L_R && h.cols() == cfg.L_T, "channels: each matrix must be L_R x L_T");
  }
}

struct Eigenbeams {
  std::vector<int> users;
  Eigen::MatrixXcd directions;  // L_T x s, column k is the top right-singular vector of user k
};

Eigenbeams top_eigenbeams(std::span<const ComplexMatrix> channels, const SystemConfig& cfg) {
  cfg.validate_beamforming();
  require_channels(channels, cfg);
  Eigenbeams out{user_select(channels, cfg.s), Eigen::MatrixXcd(cfg.L_T, cfg.s)};
  for (int k = 0; k < cfg.s; ++k) {
    const SvdResult d = svd(channels[static_cast<std::size_t>(out.users[static_cast<std::size_t>(k)])]);
    out.directions.col(k) = d.v.eigen().col(0);
  }
  return out;
}

TrialRecord finish_beamforming(Strategy tag, std::span<const ComplexMatrix> channels, const Eigenbeams& beams,
                               const Eigen::MatrixXcd& fed_back, const SystemConfig& cfg) {
  TrialRecord rec;
  rec.strategy = tag;
  rec.selected = beams.users;
  rec.effective.resize(cfg.L_R, cfg.s);
  for (int k = 0; k < cfg.s; ++k) {
    const auto& h = channels[static_cast<std::size_t>(beams.users[static_cast<std::size_t>(k)])].eigen();
    rec.effective.col(k) = h * fed_back.col(k);
  }
  rec.sum_rate = log2det_gram(rec.effective, cfg.p_on());
  rec.eta_sample = eta_of(rec.effective, cfg);
  return rec;
}

// Expected squared chordal distortion of a K = 2^bits random book for one
// line in C^{L_T}; bits = 0 is a single random codeword.
double single_line_distortion(int L_T, int bits) {
  if (L_T == 1) return 0.0;
  if (bits == 0) return 1.0 - 1.0 / L_T;
  return grassmann::drf_approx(grassmann::DrfQuery::with_bits(L_T, 1, 1, 2, bits)).value;
}

TheoryReport beamforming_report(const SystemConfig& cfg, double gamma) {
  cfg.validate_beamforming();
  const double s = cfg.s;
  const int L = cfg.L_T * cfg.L_R;
  TheoryReport r;
  if (cfg.N >= 2) {
    r.a_n = extremes::location(L, cfg.N);
    r.b_n = extremes::scale(L, r.a_n);
    r.n_bar_sq = extremes::expected_top_sum({L, cfg.N, cfg.s}) / s;
  } else {
    // A single user is always selected: E||H||_F^2 = L_T L_R.
    r.n_bar_sq = L;
  }
  r.zeta1 = rmt::zeta1_approx(std::min(cfg.L_R, cfg.L_T), std::max(cfg.L_R, cfg.L_T));
  r.gamma = cfg.L_T == 1 ? s : std::clamp(gamma, 0.0, s);
  const double spill = cfg.L_T == 1 ? 0.0 : (s - r.gamma) / s * (1.0 - r.zeta1) / (cfg.L_T - 1);
  r.eta_theory = (r.gamma / s * r.zeta1 + spill) * r.n_bar_sq / cfg.L_R;
  r.rate_upper_bound = rate_upper_bound_theory(cfg, r.eta_theory);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

void SystemConfig::validate() const {
  require(N >= 1, "N must be >= 1");
  require(L_T >= 1, "L_T must be >= 1");
  require(L_R >= 1, "L_R must be >= 1");
  require(rho >= 0.0 && std::isfinite(rho), "rho must be finite and >= 0");
  require(s >= 1, "s must be >= 1");
  require(R_q >= 0 && R_q <= kMaxQuantizationBits, "R_q must lie in [0, 16]");
}

void SystemConfig::validate_antenna() const {
  validate();
  require(s <= N * L_T, "s must be <= N * L_T for antenna selection");
}

void SystemConfig::validate_beamforming() const {
  validate();
  require(s <= N, "s must be <= N for beamforming");
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::antenna:
      return "antenna";
    case Strategy::antenna_bound:
      return "antenna_bound";
    case Strategy::no_csit:
      return "no_csit";
    case Strategy::joint:
      return "joint";
    case Strategy::individual:
      return "individual";
    case Strategy::perfect:
      return "perfect";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::antenna, Strategy::antenna_bound, Strategy::no_csit, Strategy::joint,
                     Strategy::individual, Strategy::perfect}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

std::vector<ComplexMatrix> sample_channels(const SystemConfig& cfg, RngStream& rng) {
  cfg.validate();
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(cfg.N));
  for (int k = 0; k < cfg.N; ++k) {
    out.push_back(sample_gaussian_matrix(rng, cfg.L_R, cfg.L_T));
  }
  return out;
}

ComplexMatrix stack_channels(std::span<const ComplexMatrix> channels) {
  require(!channels.empty(), "stack_channels: no channels");
  const auto rows = channels.front().rows();
  Eigen::Index cols = 0;
  for (const auto& h : channels) {
    require(h.rows() == rows, "stack_channels: row mismatch");
    cols += h.cols();
  }
  Eigen::MatrixXcd out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& h : channels) {
    out.middleCols(at, h.cols()) = h.eigen();
    at += h.cols();
  }
  return ComplexMatrix(std::move(out));
}

std::vector<int> antenna_select(const ComplexMatrix& h_all, int s) {
  require(s >= 1 && s <= h_all.cols(), "antenna_select: need 1 <= s <= number of columns");
  std::vector<double> norms(static_cast<std::size_t>(h_all.cols()));
  for (Eigen::Index j = 0; j < h_all.cols(); ++j) {
    norms[static_cast<std::size_t>(j)] = h_all.eigen().col(j).squaredNorm();
  }
  return top_indices(norms, s);
}

TrialRecord antenna_selection_rate(const ComplexMatrix& h_all, const SystemConfig& cfg, bool exact) {
  cfg.validate_antenna();
  require(h_all.rows() == cfg.L_R && h_all.cols() == cfg.total_antennas(),
          "antenna_selection_rate: channel must be L_R x N L_T");
  TrialRecord rec;
  rec.strategy = exact ? Strategy::antenna : Strategy::antenna_bound;
  rec.selected = antenna_select(h_all, cfg.s);
  rec.effective.resize(cfg.L_R, cfg.s);
  for (int k = 0; k < cfg.s; ++k) {
    rec.effective.col(k) = h_all.eigen().col(rec.selected[static_cast<std::size_t>(k)]);
  }
  rec.eta_sample = eta_of(rec.effective, cfg);
  if (exact) {
    rec.sum_rate = log2det_gram(rec.effective, cfg.p_on());
  } else {
    Eigen::MatrixXcd xi = rec.effective;
    for (int k = 0; k < cfg.s; ++k) {
      const double norm = xi.col(k).norm();
      if (norm > 0.0) xi.col(k) /= norm;
    }
    rec.sum_rate = log2det_gram(xi, cfg.p_on() * rec.eta_sample * cfg.L_R);
  }
  return rec;
}

std::vector<int> user_select(std::span<const ComplexMatrix> channels, int s) {
  require(s >= 1 && s <= static_cast<int>(channels.size()), "user_select: need 1 <= s <= N");
  std::vector<double> norms;
  norms.reserve(channels.size());
  for (const auto& h : channels) norms.push_back(h.squared_norm());
  return top_indices(norms, s);
}

std::vector<int> individual_bit_split(int R_q, int s) {
  require(R_q >= 0 && s >= 1, "individual_bit_split: need R_q >= 0 and s >= 1");
  std::vector<int> bits(static_cast<std::size_t>(s), R_q / s);
  for (int k = 0; k < R_q % s; ++k) ++bits[static_cast<std::size_t>(k)];
  return bits;
}

TrialRecord beamforming_rate_joint(std::span<const ComplexMatrix> channels, const grassmann::Codebook& book,
                                   const SystemConfig& cfg) {
  const Eigenbeams beams = top_eigenbeams(channels, cfg);
  if (cfg.L_T == 1) {
    TrialRecord rec = finish_beamforming(Strategy::joint, channels, beams, beams.directions, cfg);
    rec.codewords = {0};
    return rec;
  }
  require(book.ambient_dim() == cfg.L_T && book.components() == cfg.s,
          "beamforming_rate_joint: codebook must have n = L_T and m = s");
  const grassmann::Quantization q = grassmann::quantize(grassmann::CompositePoint(beams.directions), book);
  const grassmann::CompositePoint chosen = book.point(q.index);
  TrialRecord rec = finish_beamforming(Strategy::joint, channels, beams, chosen.generators(), cfg);
  rec.codewords = {q.index};
  rec.distortion = q.distortion;
  return rec;
}

TrialRecord beamforming_rate_individual(std::span<const ComplexMatrix> channels,
                                        std::span<const grassmann::Codebook> books, const SystemConfig& cfg) {
  const Eigenbeams beams = top_eigenbeams(channels, cfg);
  if (cfg.L_T == 1) {
    TrialRecord rec = finish_beamforming(Strategy::individual, channels, beams, beams.directions, cfg);
    rec.codewords.assign(static_cast<std::size_t>(cfg.s), 0);
    return rec;
  }
  require(static_cast<int>(books.size()) == cfg.s, "beamforming_rate_individual: need s books");
  for (const auto& b : books) {
    require(b.ambient_dim() == cfg.L_T && b.components() == 1,
            "beamforming_rate_individual: books must have n = L_T and m = 1");
  }
  const grassmann::IndividualQuantization q =
      grassmann::quantize_individual(grassmann::CompositePoint(beams.directions), books);
  Eigen::MatrixXcd fed_back(cfg.L_T, cfg.s);
  for (int k = 0; k < cfg.s; ++k) {
    fed_back.col(k) = books[static_cast<std::size_t>(k)].component_block(0).col(q.indices[static_cast<std::size_t>(k)]);
  }
  TrialRecord rec = finish_beamforming(Strategy::individual, channels, beams, fed_back, cfg);
  rec.codewords = q.indices;
  rec.distortion = q.distortion;
  return rec;
}

TrialRecord beamforming_rate_perfect(std::span<const ComplexMatrix> channels, const SystemConfig& cfg) {
  const Eigenbeams beams = top_eigenbeams(channels, cfg);
  return finish_beamforming(Strategy::perfect, channels, beams, beams.directions, cfg);
}

double no_csit_rate(std::span<const ComplexMatrix> channels, const SystemConfig& cfg) {
  cfg.validate();
  require_channels(channels, cfg);
  const ComplexMatrix h = stack_channels(channels);
  return log2det_gram(h.eigen(), cfg.rho / cfg.total_antennas());
}

// ---------------------------------------------------------------------------

double eta_theory_antenna(const SystemConfig& cfg) {
  cfg.validate_antenna();
  const int n = cfg.total_antennas();
  if (n < 2) return 1.0;
  return extremes::expected_top_sum({cfg.L_R, n, cfg.s}) / (static_cast<double>(cfg.s) * cfg.L_R);
}

TheoryReport antenna_theory(const SystemConfig& cfg) {
  cfg.validate_antenna();
  TheoryReport r;
  const int n = cfg.total_antennas();
  if (n >= 2) {
    r.a_n = extremes::location(cfg.L_R, n);
    r.b_n = extremes::scale(cfg.L_R, r.a_n);
  }
  r.eta_theory = eta_theory_antenna(cfg);
  r.n_bar_sq = r.eta_theory * cfg.L_R;
  r.zeta1 = 1.0;
  r.gamma = cfg.s;
  r.rate_upper_bound = rate_upper_bound_theory(cfg, r.eta_theory);
  r.feedback_bits_total = feedback_bits(cfg, Strategy::antenna);
  return r;
}

TheoryReport eta_theory_beamforming(const SystemConfig& cfg) {
  cfg.validate_beamforming();
  double gamma = cfg.s;
  if (cfg.L_T > 1) {
    const double d = cfg.R_q == 0 ? cfg.s * (1.0 - 1.0 / cfg.L_T)
                                  : grassmann::drf_approx(grassmann::DrfQuery::with_bits(cfg.L_T, 1, cfg.s, 2, cfg.R_q))
                                        .value;
    gamma = cfg.s - d;
  }
  TheoryReport r = beamforming_report(cfg, gamma);
  r.feedback_bits_total = feedback_bits(cfg, Strategy::joint);
  return r;
}

TheoryReport individual_theory(const SystemConfig& cfg) {
  cfg.validate_beamforming();
  double d = 0.0;
  for (int bits : individual_bit_split(cfg.R_q, cfg.s)) d += single_line_distortion(cfg.L_T, bits);
  TheoryReport r = beamforming_report(cfg, cfg.s - d);
  r.feedback_bits_total = feedback_bits(cfg, Strategy::individual);
  return r;
}

TheoryReport perfect_theory(const SystemConfig& cfg) {
  TheoryReport r = beamforming_report(cfg, cfg.s);
  r.feedback_bits_total = feedback_bits(cfg, Strategy::perfect);
  return r;
}

TheoryReport no_csit_theory(const SystemConfig& cfg) {
  cfg.validate();
  TheoryReport r;
  const double m_bar = static_cast<double>(cfg.total_antennas()) / cfg.L_R;
  r.n_bar_sq = cfg.L_R;
  r.zeta1 = 1.0;
  r.gamma = cfg.total_antennas();
  r.eta_theory = 1.0;
  r.rate_upper_bound = cfg.rho == 0.0 ? 0.0 : cfg.L_R * rmt::shannon_transform(cfg.rho / m_bar, m_bar);
  r.feedback_bits_total = 0.0;
  return r;
}

double rate_upper_bound_theory(const SystemConfig& cfg, double eta) {
  require(eta > 0.0 && std::isfinite(eta), "rate_upper_bound_theory: eta must be positive");
  const double c = cfg.rho * eta * cfg.L_R / cfg.s;
  return cfg.L_R * rmt::shannon_transform(c, static_cast<double>(cfg.s) / cfg.L_R);
}

double feedback_bits(const SystemConfig& cfg, Strategy strategy) {
  cfg.validate();
  switch (strategy) {
    case Strategy::antenna:
    case Strategy::antenna_bound:
      cfg.validate_antenna();
      return log2_binomial(cfg.total_antennas(), cfg.s);
    case Strategy::joint:
    case Strategy::individual:
      cfg.validate_beamforming();
      return log2_binomial(cfg.N, cfg.s) + cfg.R_q;
    case Strategy::perfect:
      return std::numeric_limits<double>::infinity();
    case Strategy::no_csit:
      return 0.0;
  }
  return 0.0;
}

TheoryReport theory_for(const SystemConfig& cfg, Strategy strategy) {
  switch (strategy) {
    case Strategy::antenna:
    case Strategy::antenna_bound:
      return antenna_theory(cfg);
    case Strategy::no_csit:
      return no_csit_theory(cfg);
    case Strategy::joint:
      return eta_theory_beamforming(cfg);
    case Strategy::individual:
      return individual_theory(cfg);
    case Strategy::perfect:
      return perfect_theory(cfg);
  }
  throw std::invalid_argument("theory_for: unknown strategy");
}

std::vector<int> default_s_candidates(const SystemConfig& cfg, Strategy strategy) {
  const bool antenna = strategy == Strategy::antenna || strategy == Strategy::antenna_bound;
  const int limit = std::min(cfg.L_R, antenna ? cfg.total_antennas() : cfg.N);
  std::vector<int> out(static_cast<std::size_t>(std::max(limit, 1)));
  std::iota(out.begin(), out.end(), 1);
  return out;
}

SSearch optimal_s_search(const SystemConfig& cfg, Strategy strategy, std::span<const int> candidates) {
  require(!candidates.empty(), "optimal_s_search: no candidates");
  require(strategy != Strategy::no_csit, "optimal_s_search: no_csit has no s");
  SSearch out;
  double best = -std::numeric_limits<double>::infinity();
  for (int s : candidates) {
    SystemConfig c = cfg;
    c.s = s;
    SCandidate row{s, 0.0, theory_for(c, strategy)};
    row.rate_bound = row.report.rate_upper_bound;
    if (row.rate_bound > best) {
      best = row.rate_bound;
      out.s_star = s;
    }
    out.table.push_back(row);
  }
  return out;
}

}  // namespace macfb::strategies
