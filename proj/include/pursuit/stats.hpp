#pragma once

// Paired-design inference for per-subject metric means: dependent t-test,
// Cohen's d, and sample size for a target power via the noncentral t.
//
// Differences are always impaired - baseline.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pursuit/features.hpp"
#include "pursuit/trace.hpp"

namespace pursuit::stats {

enum class Sided { One, Two };

Sided parse_sided(std::string_view text);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Student t CDF; df may be any positive real.
double t_cdf(double t, double df);
// Inverse of t_cdf in t.
double t_quantile(double p, double df);

double normal_cdf(double z);
double normal_quantile(double p);

// P(T <= t) for T noncentral t with df degrees of freedom and noncentrality delta.
double noncentral_t_cdf(double t, double df, double delta);

struct PairedT {
  double t = 0.0;
  int df = 0;
  double p_two_tailed = 1.0;
};

PairedT paired_t(std::span<const double> baseline, std::span<const double> impaired);

// Two-tailed p for a given t and df.
double two_tailed_p(double t, double df);

struct CohensD {
  double dz = 0.0;
  double d_pooled = 0.0;
};

CohensD cohens_d(std::span<const double> baseline, std::span<const double> impaired);

// Power of a paired t-test with n observations (real-valued, df = n - 1).
double paired_power(double d, double n, double alpha, Sided sided);

// Smallest n >= 2 reaching the target power.
double required_n(double d, double alpha, double power, Sided sided);

// Monte Carlo power: fraction of simulated paired experiments with
// differences ~ N(d, 1) whose t-test rejects at alpha.
double mc_power(double d, int n, double alpha, Sided sided, int n_sims, std::uint64_t seed);

struct StatsRow {
  std::string metric;
  int n_subjects = 0;
  double t_stat = 0.0;
  int df = 0;
  double p_value = 1.0;
  double cohen_dz = 0.0;
  double cohen_d_pooled = 0.0;
  double n_req_one_sided = 0.0;
  double n_req_two_sided = 0.0;
  std::string error;  // empty when every column was computed

  bool ok() const { return error.empty(); }
};

// One features-table entry: the run key plus its metrics when extraction worked.
struct RunFeatures {
  std::string subject_id;
  Session session = Session::Baseline;
  int run_index = 0;
  std::optional<features::MetricVector> metrics;
  std::string error;
};

// Metrics for every run in order; a run whose extraction fails keeps its key
// and carries the error message instead of metrics.
std::vector<RunFeatures> extract_features(std::span<const GazeRun> runs,
                                          int pad_samples = kDefaultBlinkPad);

// Per-subject session means, in subject order of first appearance.
struct SessionMeans {
  std::vector<std::string> subjects;
  std::vector<double> baseline;
  std::vector<double> impaired;
};

SessionMeans session_means(std::span<const RunFeatures> rows, std::size_t metric_index);

// One row per metric in table order. Throws MissingSession naming the
// subject when a subject lacks usable runs in either session.
std::vector<StatsRow> stats_table(std::span<const RunFeatures> rows);

std::string stats_tsv(std::span<const StatsRow> rows);
std::string stats_markdown(std::span<const StatsRow> rows);

}  // namespace pursuit::stats
