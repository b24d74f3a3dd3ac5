#include "macfb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "macfb/grassmann.hpp"

namespace macfb::experiments {

namespace {

// Top-level stream identifiers under the master seed.
constexpr std::uint64_t kChannelStream = 1;
constexpr std::uint64_t kJointBookStream = 2;
constexpr std::uint64_t kIndividualBookStream = 3;

bool is_antenna(Strategy s) { return s == Strategy::antenna || s == Strategy::antenna_bound; }

bool contains(std::span<const Strategy> set, Strategy s) { return std::find(set.begin(), set.end(), s) != set.end(); }

std::uint64_t book_key(const SystemConfig& cfg) {
  return (static_cast<std::uint64_t>(cfg.R_q) << 40) | (static_cast<std::uint64_t>(cfg.s) << 20) |
         static_cast<std::uint64_t>(cfg.L_T);
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::vector<SweepRow> run_checked(const SweepSpec& spec, std::initializer_list<Strategy> allowed,
                                  std::initializer_list<const char*> params, const char* who) {
  spec.validate();
  for (Strategy s : spec.strategies) {
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      throw std::invalid_argument(std::string(who) + ": strategy '" + std::string(strategies::to_string(s)) +
                                  "' is not part of this sweep");
    }
  }
  if (std::none_of(params.begin(), params.end(), [&](const char* p) { return spec.param == p; })) {
    throw std::invalid_argument(std::string(who) + ": cannot sweep '" + spec.param + "'");
  }
  return run_sweep(spec);
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

void SweepSpec::validate() const {
  if (param != kParamSnrDb && param != kParamRq && param != kParamS && param != kParamN) {
    throw std::invalid_argument("sweep: unknown param '" + param + "'");
  }
  if (values.empty()) throw std::invalid_argument("sweep: values must be nonempty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw std::invalid_argument("sweep: values must be strictly increasing");
  }
  if (param != kParamSnrDb) {
    for (double v : values) {
      if (v != std::floor(v)) throw std::invalid_argument("sweep: values of '" + param + "' must be integers");
    }
  }
  if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (codebooks_per_point < 1) throw std::invalid_argument("sweep: codebooks_per_point must be >= 1");
  if (workers < 1) throw std::invalid_argument("sweep: workers must be >= 1");
  if (strategies.empty()) throw std::invalid_argument("sweep: no strategies requested");
  if (auto_s && param == kParamS) throw std::invalid_argument("sweep: auto_s conflicts with sweeping s");
  base.validate();
}

SystemConfig SweepSpec::config_at(double value) const {
  SystemConfig cfg = base;
  if (param == kParamSnrDb) {
    cfg.rho = db_to_linear(value);
  } else if (param == kParamRq) {
    cfg.R_q = static_cast<int>(value);
  } else if (param == kParamS) {
    cfg.s = static_cast<int>(value);
  } else if (param == kParamN) {
    cfg.N = static_cast<int>(value);
  }
  if (auto_s) {
    const auto candidates = strategies::default_s_candidates(cfg, Strategy::antenna);
    cfg.s = strategies::optimal_s_search(cfg, Strategy::antenna, candidates).s_star;
  }
  cfg.validate();
  return cfg;
}

Aggregate aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate: need at least one value");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  CompensatedSum sum;
  for (double v : sorted) sum.add(v);
  const double n = static_cast<double>(sorted.size());
  const double mean = sum.value() / n;
  if (sorted.size() == 1) return {mean, 0.0, 1};
  CompensatedSum sq;
  for (double v : sorted) sq.add((v - mean) * (v - mean));
  return {mean, std::sqrt(sq.value() / (n - 1.0) / n), sorted.size()};
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::vector<double>> simulate_point(const SystemConfig& cfg, std::span<const Strategy> strategies,
                                                int trials, int codebooks, std::uint64_t seed, int workers) {
  if (trials < 1) throw std::invalid_argument("simulate_point: trials must be >= 1");
  cfg.validate();
  for (Strategy s : strategies) {
    if (is_antenna(s)) {
      cfg.validate_antenna();
    } else if (s != Strategy::no_csit) {
      cfg.validate_beamforming();
    }
  }
  const int batches = std::clamp(codebooks, 1, trials);
  const bool quantized = cfg.L_T > 1;
  const bool need_joint = quantized && contains(strategies, Strategy::joint);
  const bool need_individual = quantized && contains(strategies, Strategy::individual);

  std::vector<std::optional<grassmann::Codebook>> joint_books(static_cast<std::size_t>(batches));
  std::vector<std::vector<grassmann::Codebook>> individual_books(static_cast<std::size_t>(batches));
  const auto bits = strategies::individual_bit_split(cfg.R_q, cfg.s);
  parallel_for(static_cast<std::size_t>(batches), workers, [&](std::size_t b) {
    if (need_joint) {
      const RngStream rng = RngStream(seed, kJointBookStream).substream(book_key(cfg)).substream(b);
      joint_books[b] = grassmann::random_codebook(cfg.L_T, cfg.s, std::int64_t{1} << cfg.R_q, rng);
    }
    if (need_individual) {
      const RngStream base = RngStream(seed, kIndividualBookStream).substream(book_key(cfg)).substream(b);
      for (int k = 0; k < cfg.s; ++k) {
        individual_books[b].push_back(grassmann::random_codebook(
            cfg.L_T, 1, std::int64_t{1} << bits[static_cast<std::size_t>(k)], base.substream(static_cast<std::uint64_t>(k))));
      }
    }
  });

  const std::size_t n = static_cast<std::size_t>(trials);
  std::vector<std::vector<double>> rates(strategies.size(), std::vector<double>(n));
  const RngStream channel_root(seed, kChannelStream);
  parallel_for(n, workers, [&](std::size_t t) {
    RngStream rng = channel_root.substream(t);
    const auto channels = strategies::sample_channels(cfg, rng);
    const std::size_t b = t * static_cast<std::size_t>(batches) / n;
    std::optional<ComplexMatrix> h_all;
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      double rate = 0.0;
      switch (strategies[i]) {
        case Strategy::antenna:
        case Strategy::antenna_bound:
          if (!h_all) h_all = strategies::stack_channels(channels);
          rate = strategies::antenna_selection_rate(*h_all, cfg, strategies[i] == Strategy::antenna).sum_rate;
          break;
        case Strategy::no_csit:
          rate = strategies::no_csit_rate(channels, cfg);
          break;
        case Strategy::perfect:
          rate = strategies::beamforming_rate_perfect(channels, cfg).sum_rate;
          break;
        case Strategy::joint:
          rate = quantized ? strategies::beamforming_rate_joint(channels, *joint_books[b], cfg).sum_rate
                           : strategies::beamforming_rate_perfect(channels, cfg).sum_rate;
          break;
        case Strategy::individual:
          rate = quantized ? strategies::beamforming_rate_individual(channels, individual_books[b], cfg).sum_rate
                           : strategies::beamforming_rate_perfect(channels, cfg).sum_rate;
          break;
      }
      rates[i][t] = rate;
    }
  });
  return rates;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (double value : spec.values) {
    const SystemConfig cfg = spec.config_at(value);
    const auto rates =
        simulate_point(cfg, spec.strategies, spec.trials, spec.codebooks_per_point, spec.seed, spec.workers);
    for (std::size_t i = 0; i < spec.strategies.size(); ++i) {
      const Strategy s = spec.strategies[i];
      const Aggregate agg = aggregate(rates[i]);
      SweepRow row;
      row.param = spec.param;
      row.value = value;
      row.strategy = s;
      row.mean_rate_bits = agg.mean;
      row.stderr_bits = agg.standard_error;
      row.theory_bound_bits = strategies::theory_for(cfg, s).rate_upper_bound;
      row.feedback_bits = strategies::feedback_bits(cfg, s);
      row.trials = spec.trials;
      row.seed = spec.seed;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepRow> run_snr_sweep(const SweepSpec& spec) {
  return run_checked(spec, {Strategy::antenna, Strategy::antenna_bound, Strategy::no_csit}, {kParamSnrDb, kParamN},
                     "run_snr_sweep");
}

std::vector<SweepRow> run_rq_sweep(const SweepSpec& spec) {
  if (spec.auto_s) throw std::invalid_argument("run_rq_sweep: s is fixed in R_q sweeps");
  return run_checked(spec, {Strategy::joint, Strategy::individual, Strategy::perfect, Strategy::antenna}, {kParamRq},
                     "run_rq_sweep");
}

void write_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.param << ',' << format_number(r.value) << ',' << strategies::to_string(r.strategy) << ','
        << format_number(r.mean_rate_bits) << ',' << format_number(r.stderr_bits) << ','
        << format_number(r.theory_bound_bits) << ',' << format_number(r.feedback_bits) << ',' << r.trials << ','
        << r.seed << '\n';
  }
}

void write_jsonl(std::ostream& out, std::span<const SweepRow> rows) {
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["param"] = r.param;
    j["value"] = r.value;
    j["strategy"] = std::string(strategies::to_string(r.strategy));
    j["mean_rate_bits"] = r.mean_rate_bits;
    j["stderr"] = r.stderr_bits;
    j["theory_bound_bits"] = r.theory_bound_bits;
    // JSON has no infinity; unbounded feedback is written as null.
    j["feedback_bits"] = std::isfinite(r.feedback_bits) ? nlohmann::ordered_json(r.feedback_bits) : nullptr;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    out << j.dump() << '\n';
  }
}

}  // namespace macfb::experiments
