#include "macfb/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "macfb/config.hpp"
#include "macfb/experiments.hpp"
#include "macfb/grassmann.hpp"
#include "macfb/strategies.hpp"

namespace macfb::cli {

namespace {

using strategies::Strategy;
using Json = nlohmann::ordered_json;

enum class Format { csv, jsonl };

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> workers;
  std::optional<int> codebooks;
  std::optional<int> N, L_T, L_R, s, R_q;
  std::optional<double> snr_db;
  std::vector<std::string> strategies;
  std::string out_path;
  std::string format = "csv";
};

struct SweepOptions {
  std::string mode;
  std::string param;
  std::vector<double> values;
  bool auto_s = false;
};

struct DrfOptions {
  int n = 2;
  int p = 1;
  int m = 4;
  int beta = 2;
  double bits = 12.0;
  int samples = 0;
};

struct CodebookOptions {
  int n = 2;
  int m = 1;
  int bits = 4;
  std::uint64_t stream = 0;
  std::string read_path;
  int samples = 0;
};

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::uint64_t parse_env_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 10);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config::ConfigError("MACFB_SEED", "expected an unsigned 64-bit integer");
  }
}

// Precedence: flags > MACFB_SEED (seed only) > config file > defaults.
config::RunConfig resolve(const Overrides& o) {
  config::RunConfig c;
  if (!o.config_path.empty()) c = config::load(o.config_path, c);
  if (o.seed) {
    c.seed = *o.seed;
  } else if (const char* env = std::getenv("MACFB_SEED"); env != nullptr && *env != '\0') {
    c.seed = parse_env_seed(env);
  }
  if (o.trials) c.trials = *o.trials;
  if (o.workers) c.workers = *o.workers;
  if (o.codebooks) c.codebooks_per_point = *o.codebooks;
  if (o.N) c.N = *o.N;
  if (o.L_T) c.L_T = *o.L_T;
  if (o.L_R) c.L_R = *o.L_R;
  if (o.s) c.s = *o.s;
  if (o.R_q) c.R_q = *o.R_q;
  if (o.snr_db) c.snr_db = *o.snr_db;
  if (!o.strategies.empty()) {
    c.strategies.clear();
    for (const auto& name : o.strategies) {
      try {
        c.strategies.push_back(strategies::parse_strategy(name));
      } catch (const std::invalid_argument& e) {
        throw config::ConfigError("--strategies", e.what());
      }
    }
  }
  c.validate();
  return c;
}

Format parse_format(const std::string& f) {
  if (f == "csv") return Format::csv;
  if (f == "jsonl") return Format::jsonl;
  throw config::ConfigError("--format", "must be csv or jsonl");
}

// Generic table writer for the non-sweep commands.
void write_table(std::ostream& out, Format format, const std::vector<std::string>& columns,
                 const std::vector<std::vector<Json>>& rows) {
  if (format == Format::csv) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << (i ? "," : "");
        const Json& v = row[i];
        if (v.is_number_float()) {
          out << num(v.get<double>());
        } else if (v.is_string()) {
          out << v.get<std::string>();
        } else {
          out << v.dump();
        }
      }
      out << '\n';
    }
    return;
  }
  for (const auto& row : rows) {
    Json j;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const Json& v = row[i];
      j[columns[i]] = v.is_number_float() && !std::isfinite(v.get<double>()) ? Json(nullptr) : v;
    }
    out << j.dump() << '\n';
  }
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err, std::string command_line)
      : out_(out), err_(err), command_line_(std::move(command_line)) {}

  int theory(const Overrides& o) {
    const config::RunConfig c = resolve(o);
    const Format format = parse_format(o.format);
    std::vector<Strategy> list = c.strategies;
    if (list.empty()) list = {Strategy::antenna, Strategy::no_csit, Strategy::joint, Strategy::individual, Strategy::perfect};
    const strategies::SystemConfig sys = c.system();
    std::vector<std::vector<Json>> rows;
    for (Strategy s : list) {
      const strategies::TheoryReport r = strategies::theory_for(sys, s);
      rows.push_back({std::string(strategies::to_string(s)), r.a_n, r.b_n, r.n_bar_sq, r.zeta1, r.gamma, r.eta_theory,
                      r.rate_upper_bound, r.feedback_bits_total});
    }
    std::ostringstream body;
    write_table(body, format,
                {"strategy", "a_n", "b_n", "n_bar_sq", "zeta1", "gamma", "eta_theory", "rate_upper_bound_bits",
                 "feedback_bits_total"},
                rows);
    return emit(body.str(), o, c, "theory");
  }

  int simulate(const Overrides& o) {
    const config::RunConfig c = resolve(o);
    const Format format = parse_format(o.format);
    experiments::SweepSpec spec = base_spec(c);
    spec.param = experiments::kParamSnrDb;
    spec.values = {c.snr_db};
    spec.auto_s = false;
    if (spec.strategies.empty()) {
      spec.strategies = {Strategy::antenna, Strategy::antenna_bound, Strategy::no_csit,
                         Strategy::joint,   Strategy::individual,    Strategy::perfect};
    }
    const auto rows = experiments::run_sweep(spec);
    return emit_rows(rows, spec, format, o, c, "simulate");
  }

  int sweep(const Overrides& o, const SweepOptions& so) {
    config::RunConfig c = resolve(o);
    const Format format = parse_format(o.format);
    if (!so.param.empty()) c.sweep_param = so.param;
    if (!so.values.empty()) c.sweep_values = so.values;
    if (so.auto_s) c.auto_s = true;
    std::string mode = so.mode;
    if (mode.empty()) mode = c.sweep_param == experiments::kParamRq ? "rq" : "snr";
    if (mode == "rq") {
      if (so.param.empty() && c.sweep_param != experiments::kParamRq) {
        // Values in the file belong to the file's swept parameter.
        c.sweep_param = experiments::kParamRq;
        if (so.values.empty()) c.sweep_values.clear();
      }
      if (c.sweep_param != experiments::kParamRq) throw config::ConfigError("sweep.param", "rq mode sweeps R_q");
    } else if (mode == "snr") {
      if (c.sweep_param == experiments::kParamRq) {
        throw config::ConfigError("sweep.param", "snr mode sweeps snr_db or N");
      }
    } else {
      throw config::ConfigError("--mode", "must be snr or rq");
    }
    c.validate();

    experiments::SweepSpec spec = base_spec(c);
    spec.param = c.sweep_param;
    spec.auto_s = c.auto_s;
    spec.values = c.sweep_values;
    if (spec.values.empty()) {
      if (spec.param == experiments::kParamRq) {
        spec.values = {2, 4, 6, 8, 10, 12};
      } else if (spec.param == experiments::kParamSnrDb) {
        spec.values = {-5, 0, 5, 10, 15, 20, 25};
      } else {
        throw config::ConfigError("sweep.values", "required when sweeping " + spec.param);
      }
    }
    if (spec.strategies.empty()) {
      spec.strategies = mode == "rq" ? std::vector<Strategy>{Strategy::joint, Strategy::individual, Strategy::perfect,
                                                             Strategy::antenna}
                                     : std::vector<Strategy>{Strategy::antenna, Strategy::antenna_bound,
                                                             Strategy::no_csit};
    }
    c.sweep_values = spec.values;
    c.strategies = spec.strategies;
    std::vector<experiments::SweepRow> rows;
    if (spec.param == experiments::kParamRq) {
      rows = experiments::run_rq_sweep(spec);
    } else if (spec.param == experiments::kParamS) {
      rows = experiments::run_sweep(spec);
    } else {
      rows = experiments::run_snr_sweep(spec);
    }
    return emit_rows(rows, spec, format, o, c, "sweep");
  }

  int drf(const Overrides& o, const DrfOptions& d) {
    const config::RunConfig c = resolve(o);
    const Format format = parse_format(o.format);
    const auto q = grassmann::DrfQuery::with_bits(d.n, d.p, d.m, d.beta, d.bits);
    try {
      q.validate();
    } catch (const std::invalid_argument& e) {
      throw config::ConfigError("drf", e.what());
    }
    if (d.bits < 1.0) throw config::ConfigError("--bits", "must be >= 1 (K >= 2)");
    const grassmann::DrfBounds b = grassmann::drf_bounds(q);
    const grassmann::DrfEstimate asym = grassmann::drf_asymptotic(d.p, d.m, d.beta, d.bits / d.n);
    std::vector<std::string> cols = {"n",     "p",     "m",       "beta",       "log2_K",        "t",
                                     "lower", "upper", "approx", "premise", "asymptotic", "asymptotic_premise"};
    std::vector<Json> row = {d.n, d.p, d.m, d.beta, d.bits, q.t(), b.lower, b.upper, b.upper, b.premise,
                             asym.value, asym.premise};
    if (d.samples > 0) {
      if (d.p != 1 || d.beta != 2) throw config::ConfigError("--samples", "Monte Carlo needs p = 1 and beta = 2");
      if (d.bits != std::floor(d.bits) || d.bits > 16) {
        throw config::ConfigError("--bits", "Monte Carlo needs an integer log2 K <= 16");
      }
      const RngStream root(c.seed, 0xd1f);
      const auto book = grassmann::random_codebook(d.n, d.m, std::int64_t{1} << static_cast<int>(d.bits),
                                                   root.substream(0));
      const grassmann::Estimate est = grassmann::measure_distortion(book, d.samples, root.substream(1));
      cols.insert(cols.end(), {"measured_mean", "measured_stderr", "samples", "seed"});
      row.insert(row.end(), {est.mean, est.standard_error, d.samples, c.seed});
    }
    std::ostringstream body;
    write_table(body, format, cols, {row});
    return emit(body.str(), o, c, "drf");
  }

  int codebook(const Overrides& o, const CodebookOptions& cb) {
    const config::RunConfig c = resolve(o);
    const Format format = parse_format(o.format);
    std::optional<grassmann::Codebook> book;
    if (!cb.read_path.empty()) {
      book = grassmann::read_codebook(cb.read_path);
    } else {
      if (cb.n < 1) throw config::ConfigError("--n", "must be >= 1");
      if (cb.m < 1) throw config::ConfigError("--m", "must be >= 1");
      if (cb.bits < 0 || cb.bits > 16) throw config::ConfigError("--bits", "must lie in [0, 16]");
      book = grassmann::random_codebook(cb.n, cb.m, std::int64_t{1} << cb.bits, RngStream(c.seed, cb.stream));
      if (!o.out_path.empty()) {
        grassmann::write_codebook(o.out_path, *book);
        write_manifest(o.out_path, c, "codebook");
      }
    }
    std::vector<std::string> cols = {"n", "m", "K", "master_seed", "stream_id"};
    std::vector<Json> row = {book->ambient_dim(), book->components(), book->size(), book->master_seed(),
                             book->stream_id()};
    if (cb.samples > 0) {
      const grassmann::Estimate est =
          grassmann::measure_distortion(*book, cb.samples, RngStream(c.seed, 0xc0deb00c).substream(cb.stream));
      cols.insert(cols.end(), {"distortion_mean", "distortion_stderr"});
      row.insert(row.end(), {est.mean, est.standard_error});
    }
    write_table(out_, format, cols, {row});
    return 0;
  }

 private:
  static experiments::SweepSpec base_spec(const config::RunConfig& c) {
    experiments::SweepSpec spec;
    spec.base = c.system();
    spec.strategies = c.strategies;
    spec.trials = c.trials;
    spec.codebooks_per_point = c.codebooks_per_point;
    spec.seed = c.seed;
    spec.workers = c.workers;
    return spec;
  }

  int emit_rows(const std::vector<experiments::SweepRow>& rows, const experiments::SweepSpec& spec, Format format,
                const Overrides& o, const config::RunConfig& c, const char* command) {
    const std::size_t expected = spec.values.size() * spec.strategies.size();
    if (rows.size() != expected) {
      err_ << "macfb: error: produced " << rows.size() << " of " << expected << " rows\n";
      return kExitFailure;
    }
    std::ostringstream body;
    if (format == Format::csv) {
      experiments::write_csv(body, rows);
    } else {
      experiments::write_jsonl(body, rows);
    }
    return emit(body.str(), o, c, command);
  }

  int emit(const std::string& body, const Overrides& o, const config::RunConfig& c, const char* command) {
    if (o.out_path.empty()) {
      out_ << body;
      return 0;
    }
    {
      std::ofstream f(o.out_path, std::ios::binary | std::ios::trunc);
      if (!f) throw std::runtime_error("cannot open " + o.out_path);
      f << body;
      if (!f) throw std::runtime_error("write failed for " + o.out_path);
    }
    write_manifest(o.out_path, c, command);
    return 0;
  }

  void write_manifest(const std::string& out_path, const config::RunConfig& c, const char* command) {
    Json m;
    m["command"] = command;
    m["command_line"] = command_line_;
    m["config"] = config::to_json(c);
    m["seed"] = c.seed;
    m["version"] = MACFB_VERSION;
    m["timestamp"] = timestamp_utc();
    const std::string path = out_path + ".manifest.json";
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << m.dump(2) << '\n';
    if (!f) throw std::runtime_error("write failed for " + path);
  }

  std::ostream& out_;
  std::ostream& err_;
  std::string command_line_;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "JSON configuration file");
  app->add_option("--seed", o.seed, "Master seed (falls back to MACFB_SEED, then the config file)");
  app->add_option("--trials", o.trials, "Monte Carlo trials per point");
  app->add_option("--workers", o.workers, "Worker threads (results do not depend on it)");
  app->add_option("--codebooks", o.codebooks, "Random codebooks per point");
  app->add_option("--out", o.out_path, "Output file; a manifest is written next to it");
  app->add_option("--format", o.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  app->add_option("--N", o.N, "Number of users");
  app->add_option("--L_T", o.L_T, "Transmit antennas per user");
  app->add_option("--L_R", o.L_R, "Receive antennas");
  app->add_option("--snr-db", o.snr_db, "Total SNR in dB");
  app->add_option("--s", o.s, "Number of active beams");
  app->add_option("--R_q", o.R_q, "Quantization bits");
  app->add_option("--strategies", o.strategies, "Strategy names")->delimiter(',');
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiaccess MIMO limited-feedback simulator", "macfb"};
  app.set_version_flag("--version", MACFB_VERSION);
  app.require_subcommand(1);

  Overrides o;
  SweepOptions so;
  DrfOptions d;
  CodebookOptions cb;

  auto* theory = app.add_subcommand("theory", "Closed-form report for one configuration");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rates for one configuration");
  auto* sweep = app.add_subcommand("sweep", "SNR or R_q sweep");
  auto* drf = app.add_subcommand("drf", "Distortion-rate bounds on the composite Grassmann manifold");
  auto* codebook = app.add_subcommand("codebook", "Generate, write or inspect a random codebook");
  for (auto* sub : {theory, simulate, sweep, drf, codebook}) add_common(sub, o);

  sweep->add_option("--mode", so.mode, "snr or rq")->check(CLI::IsMember({"snr", "rq"}));
  sweep->add_option("--param", so.param, "Swept parameter: snr_db, R_q, s or N");
  sweep->add_option("--values", so.values, "Swept values")->delimiter(',');
  sweep->add_flag("--auto-s", so.auto_s, "Choose s per point from the theory bound");

  drf->add_option("--n", d.n, "Ambient dimension");
  drf->add_option("--p", d.p, "Subspace dimension");
  drf->add_option("--m", d.m, "Number of components");
  drf->add_option("--beta", d.beta, "1 (real) or 2 (complex)");
  drf->add_option("--bits", d.bits, "log2 of the codebook size");
  drf->add_option("--samples", d.samples, "Monte Carlo samples against a random codebook (0: none)");

  codebook->add_option("--n", cb.n, "Ambient dimension");
  codebook->add_option("--m", cb.m, "Number of components");
  codebook->add_option("--bits", cb.bits, "log2 of the codebook size");
  codebook->add_option("--stream", cb.stream, "Stream id under the master seed");
  codebook->add_option("--read", cb.read_path, "Inspect an existing codebook file");
  codebook->add_option("--samples", cb.samples, "Monte Carlo distortion samples (0: none)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);
  Runner runner(out, err, command_line);
  try {
    if (theory->parsed()) return runner.theory(o);
    if (simulate->parsed()) return runner.simulate(o);
    if (sweep->parsed()) return runner.sweep(o, so);
    if (drf->parsed()) return runner.drf(o, d);
    if (codebook->parsed()) return runner.codebook(o, cb);
  } catch (const config::ConfigError& e) {
    err << "macfb: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "macfb: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "macfb: error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace macfb::cli
