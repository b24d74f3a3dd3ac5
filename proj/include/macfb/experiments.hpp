#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "macfb/strategies.hpp"

// Monte Carlo sweeps over SNR, R_q, s or N. Every trial draws its channels
// from a substream keyed by the trial index alone, so all sweep points share
// realizations (common random numbers) and results do not depend on the
// number of workers.

namespace macfb::experiments {

using strategies::Strategy;
using strategies::SystemConfig;

/// Swept parameter names as they appear in the CSV "param" column. SNR
/// values are in dB.
inline constexpr const char* kParamSnrDb = "snr_db";
inline constexpr const char* kParamRq = "R_q";
inline constexpr const char* kParamS = "s";
inline constexpr const char* kParamN = "N";

inline constexpr const char* kCsvHeader =
    "param,value,strategy,mean_rate_bits,stderr,theory_bound_bits,feedback_bits,trials,seed";

double db_to_linear(double db);
double linear_to_db(double linear);

struct SweepSpec {
  SystemConfig base;
  std::string param = kParamSnrDb;
  std::vector<double> values;
  std::vector<Strategy> strategies;
  int trials = 10000;
  int codebooks_per_point = 10;
  std::uint64_t seed = 1;
  /// Choose s per point by maximizing the antenna-selection theory bound
  /// over strategies::default_s_candidates (SNR sweeps only).
  bool auto_s = false;
  /// Parallelism cap; never changes results.
  int workers = 1;

  /// Throws std::invalid_argument on empty or non-increasing values,
  /// trials < 1, unknown param, or no strategies.
  void validate() const;
  /// Base config with the swept parameter set to value.
  SystemConfig config_at(double value) const;
};

struct SweepRow {
  std::string param;
  double value = 0.0;
  Strategy strategy = Strategy::antenna;
  double mean_rate_bits = 0.0;
  double stderr_bits = 0.0;
  double theory_bound_bits = 0.0;
  double feedback_bits = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

struct Aggregate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

/// Sample mean and sd/sqrt(n). Values are sorted before compensated
/// summation, so any permutation of the input gives the same bits.
Aggregate aggregate(std::span<const double> values);

/// Runs body(i) for i in [0, count) on up to `workers` threads.
/// The first exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

/// Strategies drawn from {antenna, antenna_bound, no_csit}; param snr_db or N.
std::vector<SweepRow> run_snr_sweep(const SweepSpec& spec);

/// Strategies drawn from {joint, individual, perfect, antenna}; param R_q.
std::vector<SweepRow> run_rq_sweep(const SweepSpec& spec);

/// Any strategy set, any param. Rows are ordered by value, then by the
/// order of spec.strategies.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Per-trial sum rates of each strategy at one configuration, indexed
/// [strategy][trial]. Codebooks are redrawn per batch of trials.
std::vector<std::vector<double>> simulate_point(const SystemConfig& cfg, std::span<const Strategy> strategies,
                                                int trials, int codebooks, std::uint64_t seed, int workers);

void write_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_jsonl(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace macfb::experiments
