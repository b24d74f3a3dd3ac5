#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "macfb/grassmann.hpp"
#include "macfb/numerics.hpp"

// Uplink multiaccess channel with N users (L_T antennas each) and an L_R
// antenna receiver. Two limited-feedback schemes: antenna selection, and
// user selection followed by quantized eigen-beamforming. Power on/off with
// s active beams, each at power rho / s.

namespace macfb::strategies {

/// Largest supported R_q: the joint codebook has 2^R_q codewords.
inline constexpr int kMaxQuantizationBits = 16;

struct SystemConfig {
  int N = 32;
  int L_T = 2;
  int L_R = 4;
  double rho = 10.0;  // total average SNR, linear
  int s = 4;
  int R_q = 12;

  double p_on() const { return rho / s; }
  int total_antennas() const { return N * L_T; }

  /// Field ranges shared by every strategy. Throws std::invalid_argument
  /// naming the offending field.
  void validate() const;
  void validate_antenna() const;      // also s <= N * L_T
  void validate_beamforming() const;  // also s <= N
};

enum class Strategy { antenna, antenna_bound, no_csit, joint, individual, perfect };

std::string_view to_string(Strategy s);
/// Throws std::invalid_argument for unknown names.
Strategy parse_strategy(std::string_view name);

struct TrialRecord {
  Strategy strategy = Strategy::antenna;
  double sum_rate = 0.0;    // bits per channel use
  double eta_sample = 0.0;  // sum of selected gains / (s L_R)
  std::vector<int> selected;
  std::vector<std::int64_t> codewords;  // joint: one index; individual: one per beam
  double distortion = 0.0;              // squared chordal distance of the fed-back beams
  Eigen::MatrixXcd effective;           // L_R x s, column k is the k-th received beam
};

struct TheoryReport {
  double a_n = 0.0;
  double b_n = 0.0;
  double n_bar_sq = 0.0;
  double zeta1 = 1.0;
  double gamma = 0.0;
  double eta_theory = 0.0;
  double rate_upper_bound = 0.0;
  double feedback_bits_total = 0.0;
};

/// N independent L_R x L_T matrices with CN(0,1) entries, drawn in user order.
std::vector<ComplexMatrix> sample_channels(const SystemConfig& cfg, RngStream& rng);

/// [H_1 ... H_N], an L_R x N L_T matrix.
ComplexMatrix stack_channels(std::span<const ComplexMatrix> channels);

/// Indices of the s strongest columns, strongest first; ties keep the lower index.
std::vector<int> antenna_select(const ComplexMatrix& h_all, int s);

/// exact: log2|I + (rho/s) sum h_k h_k^H| over the selected columns.
/// Otherwise the Jensen form log2|I + (rho/s) eta L_R Xi Xi^H| with the
/// realization's eta and unit directions Xi.
TrialRecord antenna_selection_rate(const ComplexMatrix& h_all, const SystemConfig& cfg, bool exact);

/// Indices of the s users with the largest Frobenius norm, strongest first.
std::vector<int> user_select(std::span<const ComplexMatrix> channels, int s);

/// Per-beam bit budget of individual quantization: R_q split evenly, the
/// first R_q mod s beams receive one extra bit.
std::vector<int> individual_bit_split(int R_q, int s);

/// Joint quantization of the s eigen-channel vectors with one composite
/// codebook (n = L_T, m = s). With L_T = 1 the quantization step is skipped.
TrialRecord beamforming_rate_joint(std::span<const ComplexMatrix> channels, const grassmann::Codebook& book,
                                   const SystemConfig& cfg);

/// Each eigen-channel vector quantized with its own single-component book.
TrialRecord beamforming_rate_individual(std::span<const ComplexMatrix> channels,
                                        std::span<const grassmann::Codebook> books, const SystemConfig& cfg);

/// Unquantized eigen-beamforming (R_q = infinity).
TrialRecord beamforming_rate_perfect(std::span<const ComplexMatrix> channels, const SystemConfig& cfg);

/// Equal-power isotropic input over all N L_T antennas:
/// log2|I + rho / (N L_T) H H^H|.
double no_csit_rate(std::span<const ComplexMatrix> channels, const SystemConfig& cfg);

/// Order-statistics estimate of E[eta] for antenna selection.
double eta_theory_antenna(const SystemConfig& cfg);

/// Full report for antenna selection (zeta1 = 1, gamma = s).
TheoryReport antenna_theory(const SystemConfig& cfg);

/// Report for joint quantization at cfg.R_q.
///
/// E[eta] = (1/L_R) (gamma/s zeta1 + (s-gamma)/s (1-zeta1)/(L_T-1)) n_bar^2.
/// The prefactor is 1/L_R: the normalization of eta (division by s L_R)
/// requires it, and simulation agrees; the L_R written in the closed-form
/// statement of this result is a misprint.
TheoryReport eta_theory_beamforming(const SystemConfig& cfg);

/// Same pipeline with gamma from per-beam single-line distortions.
TheoryReport individual_theory(const SystemConfig& cfg);

/// Same pipeline with gamma = s.
TheoryReport perfect_theory(const SystemConfig& cfg);

/// Jensen form evaluated with eta = 1 over all N L_T antennas.
TheoryReport no_csit_theory(const SystemConfig& cfg);

/// L_R * shannon_transform(rho eta L_R / s, s / L_R), in bits.
double rate_upper_bound_theory(const SystemConfig& cfg, double eta);

/// Index bits fed back per realization. perfect returns +infinity and
/// no_csit returns 0.
double feedback_bits(const SystemConfig& cfg, Strategy strategy);

/// Theory report for strategy at cfg (antenna_bound shares antenna's).
TheoryReport theory_for(const SystemConfig& cfg, Strategy strategy);

struct SCandidate {
  int s = 1;
  double rate_bound = 0.0;
  TheoryReport report;
};

struct SSearch {
  int s_star = 1;
  std::vector<SCandidate> table;
};

/// 1..min(L_R, strategy limit): beyond L_R extra beams add no spatial
/// degrees of freedom at the receiver.
std::vector<int> default_s_candidates(const SystemConfig& cfg, Strategy strategy);

/// Maximizes the theoretical rate bound over the candidates (first maximum
/// wins). strategy must be antenna or one of the beamforming modes.
SSearch optimal_s_search(const SystemConfig& cfg, Strategy strategy, std::span<const int> candidates);

}  // namespace macfb::strategies
