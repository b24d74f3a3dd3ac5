#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>
#include <json.hpp>

#include "macfb/diagnostics.hpp"
#include "macfb/experiments.hpp"

namespace ex = macfb::experiments;
using macfb::strategies::Strategy;

namespace {

class Quiet : public ::testing::Test {
 protected:
  void SetUp() override { previous_ = macfb::set_warning_sink({}); }
  void TearDown() override { macfb::set_warning_sink(previous_); }
  macfb::WarningSink previous_;
};

ex::SweepSpec snr_spec(int trials) {
  ex::SweepSpec spec;
  spec.values = {-5, 0, 5, 10, 15, 20, 25};
  spec.strategies = {Strategy::antenna, Strategy::antenna_bound, Strategy::no_csit};
  spec.trials = trials;
  return spec;
}

const ex::SweepRow& find(const std::vector<ex::SweepRow>& rows, double value, Strategy s) {
  for (const auto& r : rows)
    if (r.value == value && r.strategy == s) return r;
  throw std::logic_error("row missing");
}

std::string csv(const std::vector<ex::SweepRow>& rows) {
  std::ostringstream os;
  ex::write_csv(os, rows);
  return os.str();
}

}  // namespace

TEST(Aggregate, SmallSamples) {
  const std::vector<double> v = {1, 2, 3};
  const auto a = ex::aggregate(v);
  EXPECT_DOUBLE_EQ(a.mean, 2.0);
  EXPECT_DOUBLE_EQ(a.standard_error, 1.0 / std::sqrt(3.0));
  EXPECT_EQ(a.count, 3u);
  const std::vector<double> one = {4.5};
  EXPECT_EQ(ex::aggregate(one).standard_error, 0.0);
  EXPECT_THROW(ex::aggregate(std::vector<double>{}), std::invalid_argument);
}

TEST(Aggregate, PermutationInvariantBits) {
  std::mt19937_64 gen(5);
  std::lognormal_distribution<double> dist(0.0, 3.0);
  std::vector<double> v(5000);
  for (auto& x : v) x = dist(gen);
  const auto a = ex::aggregate(v);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(v.begin(), v.end(), gen);
    const auto b = ex::aggregate(v);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.standard_error, b.standard_error);
  }
}

TEST(ParallelFor, CoversAllAndRethrows) {
  std::vector<int> hits(1000, 0);
  ex::parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  EXPECT_THROW(ex::parallel_for(100, 3,
                                [](std::size_t i) {
                                  if (i == 37) throw std::runtime_error("boom");
                                }),
               std::runtime_error);
}

TEST(Db, RoundTrip) {
  EXPECT_DOUBLE_EQ(ex::db_to_linear(10.0), 10.0);
  EXPECT_NEAR(ex::linear_to_db(ex::db_to_linear(-3.7)), -3.7, 1e-12);
}

TEST_F(Quiet, SingleTrialHasZeroStderr) {
  auto spec = snr_spec(1);
  spec.values = {10};
  const auto rows = ex::run_snr_sweep(spec);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.stderr_bits, 0.0);
    EXPECT_EQ(r.trials, 1);
    EXPECT_TRUE(std::isfinite(r.mean_rate_bits));
  }
}

TEST_F(Quiet, DeterministicAcrossWorkers) {
  auto spec = snr_spec(400);
  const std::string one = csv(ex::run_snr_sweep(spec));
  spec.workers = 4;
  EXPECT_EQ(csv(ex::run_snr_sweep(spec)), one);
  spec.workers = 8;
  EXPECT_EQ(csv(ex::run_snr_sweep(spec)), one);

  ex::SweepSpec rq;
  rq.param = ex::kParamRq;
  rq.values = {2, 6};
  rq.strategies = {Strategy::joint, Strategy::individual, Strategy::perfect, Strategy::antenna};
  rq.trials = 200;
  const std::string a = csv(ex::run_rq_sweep(rq));
  rq.workers = 3;
  EXPECT_EQ(csv(ex::run_rq_sweep(rq)), a);
}

TEST_F(Quiet, SeedChangesResults) {
  auto spec = snr_spec(200);
  spec.values = {10};
  const auto a = ex::run_snr_sweep(spec);
  spec.seed = 2;
  const auto b = ex::run_snr_sweep(spec);
  EXPECT_NE(a[0].mean_rate_bits, b[0].mean_rate_bits);
  const double se = std::hypot(a[0].stderr_bits, b[0].stderr_bits);
  EXPECT_LT(std::abs(a[0].mean_rate_bits - b[0].mean_rate_bits), 6 * se);
}

TEST_F(Quiet, SnrSweepShape) {
  const auto spec = snr_spec(2000);
  const auto rows = ex::run_snr_sweep(spec);
  ASSERT_EQ(rows.size(), spec.values.size() * 3);
  double prev = -1.0;
  for (double v : spec.values) {
    const auto& a = find(rows, v, Strategy::antenna);
    const auto& b = find(rows, v, Strategy::antenna_bound);
    const auto& n = find(rows, v, Strategy::no_csit);
    // Common random numbers make the curve strictly increasing in SNR.
    EXPECT_GT(a.mean_rate_bits, prev);
    prev = a.mean_rate_bits;
    EXPECT_GE(b.mean_rate_bits, a.mean_rate_bits);
    EXPECT_LT(n.mean_rate_bits, a.mean_rate_bits);
    EXPECT_EQ(n.feedback_bits, 0.0);
    EXPECT_NEAR(a.feedback_bits, std::log2(635376.0), 1e-9);
    EXPECT_EQ(a.param, ex::kParamSnrDb);
  }
}

TEST_F(Quiet, MoreUsersHelp) {
  ex::SweepSpec spec;
  spec.param = ex::kParamN;
  spec.values = {32, 256};
  spec.strategies = {Strategy::antenna};
  spec.trials = 1000;
  const auto rows = ex::run_snr_sweep(spec);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[1].mean_rate_bits - 3 * rows[1].stderr_bits, rows[0].mean_rate_bits + 3 * rows[0].stderr_bits);
}

TEST_F(Quiet, QuantizationGapShrinks) {
  ex::SweepSpec spec;
  spec.param = ex::kParamRq;
  spec.values = {2, 4, 6, 8, 10, 12};
  spec.strategies = {Strategy::joint, Strategy::individual, Strategy::perfect, Strategy::antenna};
  spec.trials = 1000;
  const auto rows = ex::run_rq_sweep(spec);
  ASSERT_EQ(rows.size(), 24u);
  double prev_gap = INFINITY;
  for (double v : spec.values) {
    const double perfect = find(rows, v, Strategy::perfect).mean_rate_bits;
    const double joint = find(rows, v, Strategy::joint).mean_rate_bits;
    EXPECT_GE(perfect, joint);
    EXPECT_LT(perfect - joint, prev_gap);
    prev_gap = perfect - joint;
    EXPECT_TRUE(std::isinf(find(rows, v, Strategy::perfect).feedback_bits));
  }
  // Perfect and antenna rows do not depend on R_q.
  EXPECT_EQ(find(rows, 2, Strategy::perfect).mean_rate_bits, find(rows, 12, Strategy::perfect).mean_rate_bits);
  EXPECT_EQ(find(rows, 2, Strategy::antenna).mean_rate_bits, find(rows, 12, Strategy::antenna).mean_rate_bits);
}

TEST_F(Quiet, AutoSPicksFullRankAtHighSnr) {
  auto spec = snr_spec(50);
  spec.values = {20};
  spec.base.s = 1;
  spec.auto_s = true;
  EXPECT_EQ(spec.config_at(20).s, 4);
  EXPECT_NO_THROW(ex::run_snr_sweep(spec));
}

TEST(Validation, RejectsBadSpecs) {
  auto spec = snr_spec(10);
  spec.values = {5, 0};
  EXPECT_THROW(ex::run_snr_sweep(spec), std::invalid_argument);
  spec = snr_spec(10);
  spec.values = {};
  EXPECT_THROW(ex::run_snr_sweep(spec), std::invalid_argument);
  spec = snr_spec(0);
  EXPECT_THROW(ex::run_snr_sweep(spec), std::invalid_argument);
  spec = snr_spec(10);
  spec.strategies = {Strategy::joint};
  EXPECT_THROW(ex::run_snr_sweep(spec), std::invalid_argument);
  spec = snr_spec(10);
  spec.param = "rho";
  EXPECT_THROW(ex::run_snr_sweep(spec), std::invalid_argument);
  spec = snr_spec(10);
  spec.param = ex::kParamRq;
  spec.values = {2.5};
  EXPECT_THROW(ex::run_sweep(spec), std::invalid_argument);
  spec = snr_spec(10);
  spec.param = ex::kParamRq;
  spec.values = {2};
  spec.strategies = {Strategy::joint};
  spec.auto_s = true;
  EXPECT_THROW(ex::run_rq_sweep(spec), std::invalid_argument);
}

TEST_F(Quiet, CsvAndJsonl) {
  auto spec = snr_spec(20);
  spec.values = {0, 10};
  ex::SweepSpec rq;
  rq.param = ex::kParamRq;
  rq.values = {4};
  rq.strategies = {Strategy::perfect, Strategy::joint};
  rq.trials = 20;
  auto rows = ex::run_snr_sweep(spec);
  const auto more = ex::run_rq_sweep(rq);
  rows.insert(rows.end(), more.begin(), more.end());

  const std::string text = csv(rows);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, ex::kCsvHeader);
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8) << line;
  }
  EXPECT_EQ(count, 8);
  EXPECT_NE(text.find("R_q,4,perfect,"), std::string::npos);
  EXPECT_NE(text.find(",inf,20,1"), std::string::npos);

  std::ostringstream js;
  ex::write_jsonl(js, rows);
  std::istringstream jl(js.str());
  count = 0;
  while (std::getline(jl, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.size(), 9u);
    if (j["strategy"] == "perfect") {
      EXPECT_TRUE(j["feedback_bits"].is_null());
    } else {
      EXPECT_TRUE(j["feedback_bits"].is_number());
    }
    EXPECT_DOUBLE_EQ(j["mean_rate_bits"].get<double>(), rows[static_cast<std::size_t>(count)].mean_rate_bits);
    ++count;
  }
  EXPECT_EQ(count, 8);
}
