#include "pursuit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "pursuit/rng.hpp"

namespace pursuit::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator
};

MeanSd mean_sd(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

std::vector<double> paired_differences(std::span<const double> baseline,
                                       std::span<const double> impaired) {
  if (baseline.size() != impaired.size())
    throw Error(ErrorKind::LengthMismatch, std::to_string(baseline.size()) + " baseline vs " +
                                               std::to_string(impaired.size()) + " impaired");
  if (baseline.size() < 2) throw Error(ErrorKind::TooFewSubjects, "need >= 2 subjects");
  std::vector<double> diff(baseline.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = impaired[i] - baseline[i];
  return diff;
}

MeanSd nondegenerate_mean_sd(std::span<const double> diff) {
  const auto m = mean_sd(diff);
  double scale = 0.0;
  for (double d : diff) scale = std::max(scale, std::abs(d));
  if (!(m.sd > 1e-12 * scale)) throw Error(ErrorKind::ZeroVariance, "all differences equal");
  return m;
}

std::string fmt(double v, const char* spec = "%.10g") {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

Sided parse_sided(std::string_view text) {
  if (text == "one") return Sided::One;
  if (text == "two") return Sided::Two;
  throw Error(ErrorKind::Parse, "sided must be 'one' or 'two'");
}

double two_tailed_p(double t, double df) {
  const double tail = t_cdf(-std::abs(t), df);
  return std::min(1.0, 2.0 * tail);
}

PairedT paired_t(std::span<const double> baseline, std::span<const double> impaired) {
  const auto diff = paired_differences(baseline, impaired);
  const auto m = nondegenerate_mean_sd(diff);
  const double n = static_cast<double>(diff.size());
  PairedT r;
  r.t = m.mean / (m.sd / std::sqrt(n));
  r.df = static_cast<int>(diff.size()) - 1;
  r.p_two_tailed = two_tailed_p(r.t, r.df);
  return r;
}

CohensD cohens_d(std::span<const double> baseline, std::span<const double> impaired) {
  const auto diff = paired_differences(baseline, impaired);
  const auto m = nondegenerate_mean_sd(diff);
  const auto b = mean_sd(baseline);
  const auto i = mean_sd(impaired);
  const double pooled = std::sqrt(0.5 * (b.sd * b.sd + i.sd * i.sd));
  CohensD d;
  d.dz = m.mean / m.sd;
  d.d_pooled = pooled > 0.0 ? (i.mean - b.mean) / pooled : kNaN;
  return d;
}

double paired_power(double d, double n, double alpha, Sided sided) {
  const double df = n - 1.0;
  const double delta = std::abs(d) * std::sqrt(n);
  if (sided == Sided::One) {
    const double crit = t_quantile(1.0 - alpha, df);
    return 1.0 - noncentral_t_cdf(crit, df, delta);
  }
  const double crit = t_quantile(1.0 - 0.5 * alpha, df);
  return 1.0 - noncentral_t_cdf(crit, df, delta) + noncentral_t_cdf(-crit, df, delta);
}

double required_n(double d, double alpha, double power, Sided sided) {
  if (!std::isfinite(d) || d == 0.0) throw Error(ErrorKind::ZeroEffect, "effect size is zero");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidParams, "alpha in (0, 1)");
  if (!(power > 0.0 && power < 1.0)) throw Error(ErrorKind::InvalidParams, "power in (0, 1)");
  if (power <= alpha) throw Error(ErrorKind::Unattainable, "power must exceed alpha");

  constexpr double kMinN = 2.0;
  if (paired_power(d, kMinN, alpha, sided) >= power) return kMinN;

  // Normal-approximation starting point, then bracket and bisect on the
  // exact noncentral-t power.
  const double s = sided == Sided::One ? 1.0 : 2.0;
  const double z = normal_quantile(1.0 - alpha / s) + normal_quantile(power);
  double lo = kMinN;
  double hi = std::max(kMinN + 1.0, (z / std::abs(d)) * (z / std::abs(d)));
  while (paired_power(d, hi, alpha, sided) < power) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) throw Error(ErrorKind::Unattainable, "required n exceeds 1e9");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double p = paired_power(d, mid, alpha, sided);
    (p < power ? lo : hi) = mid;
    if (hi - lo < 1e-9 * hi) break;
  }
  return hi;
}

double mc_power(double d, int n, double alpha, Sided sided, int n_sims, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::InvalidParams, "n must be >= 2");
  if (n_sims < 1000) throw Error(ErrorKind::InvalidParams, "n_sims must be >= 1000");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidParams, "alpha in (0, 1)");
  const double df = n - 1.0;
  const double crit = t_quantile(sided == Sided::One ? 1.0 - alpha : 1.0 - 0.5 * alpha, df);
  const double direction = d < 0.0 ? -1.0 : 1.0;

  Rng rng(seed);
  std::normal_distribution<double> noise(d, 1.0);
  std::vector<double> diff(static_cast<std::size_t>(n));
  long rejections = 0;
  for (int s = 0; s < n_sims; ++s) {
    for (auto& x : diff) x = noise(rng);
    const auto m = mean_sd(diff);
    const double t = m.mean / (m.sd / std::sqrt(static_cast<double>(n)));
    const bool reject = sided == Sided::One ? direction * t > crit : std::abs(t) > crit;
    if (reject) ++rejections;
  }
  return static_cast<double>(rejections) / n_sims;
}

std::vector<RunFeatures> extract_features(std::span<const GazeRun> runs, int pad_samples) {
  std::vector<RunFeatures> out;
  out.reserve(runs.size());
  for (const auto& run : runs) {
    RunFeatures r{run.subject_id, run.session, run.run_index, std::nullopt, {}};
    try {
      r.metrics = features::metric_vector(run, pad_samples);
    } catch (const Error& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

SessionMeans session_means(std::span<const RunFeatures> rows, std::size_t metric_index) {
  struct Acc {
    double sum[2] = {0.0, 0.0};
    int count[2] = {0, 0};
    bool seen[2] = {false, false};
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  for (const auto& r : rows) {
    auto [it, inserted] = acc.try_emplace(r.subject_id);
    if (inserted) order.push_back(r.subject_id);
    const int s = r.session == Session::Baseline ? 0 : 1;
    it->second.seen[s] = true;
    if (r.metrics) {
      it->second.sum[s] += features::metric_value(*r.metrics, metric_index);
      it->second.count[s]++;
    }
  }
  SessionMeans out;
  for (const auto& id : order) {
    const auto& a = acc.at(id);
    if (!a.seen[0] || !a.seen[1])
      throw Error(ErrorKind::MissingSession,
                  "subject " + id + " has no " + (a.seen[0] ? "impaired" : "baseline") + " runs");
    // Subjects whose runs in a session are all degenerate drop out.
    if (a.count[0] == 0 || a.count[1] == 0) continue;
    out.subjects.push_back(id);
    out.baseline.push_back(a.sum[0] / a.count[0]);
    out.impaired.push_back(a.sum[1] / a.count[1]);
  }
  return out;
}

std::vector<StatsRow> stats_table(std::span<const RunFeatures> rows) {
  std::vector<StatsRow> table;
  for (std::size_t m = 0; m < features::kMetricNames.size(); ++m) {
    StatsRow row;
    row.metric = std::string(features::kMetricNames[m]);
    const auto means = session_means(rows, m);
    row.n_subjects = static_cast<int>(means.subjects.size());
    row.df = row.n_subjects - 1;
    row.t_stat = row.p_value = row.cohen_dz = row.cohen_d_pooled = kNaN;
    row.n_req_one_sided = row.n_req_two_sided = kNaN;
    try {
      const auto t = paired_t(means.baseline, means.impaired);
      row.t_stat = t.t;
      row.df = t.df;
      row.p_value = t.p_two_tailed;
      const auto d = cohens_d(means.baseline, means.impaired);
      row.cohen_dz = d.dz;
      row.cohen_d_pooled = d.d_pooled;
      row.n_req_one_sided = required_n(d.dz, 0.05, 0.8, Sided::One);
      row.n_req_two_sided = required_n(d.dz, 0.05, 0.8, Sided::Two);
    } catch (const Error& e) {
      row.error = e.what();
    }
    table.push_back(std::move(row));
  }
  return table;
}

std::string stats_tsv(std::span<const StatsRow> rows) {
  std::ostringstream os;
  os << "metric\tn\tt_stat\tdf\tp_value\tcohen_dz\tcohen_d_pooled\tn_req_one_sided\tn_req_two_sided\n";
  for (const auto& r : rows) {
    os << r.metric << '\t' << r.n_subjects << '\t' << fmt(r.t_stat) << '\t' << r.df << '\t'
       << fmt(r.p_value) << '\t' << fmt(r.cohen_dz) << '\t' << fmt(r.cohen_d_pooled) << '\t'
       << fmt(r.n_req_one_sided) << '\t' << fmt(r.n_req_two_sided) << '\n';
  }
  return os.str();
}

std::string stats_markdown(std::span<const StatsRow> rows) {
  std::ostringstream os;
  os << "| Metric | n | T-Stat | df | p value | Cohen's dz | Cohen's d (pooled) "
        "| n req. (one-sided) | n req. (two-sided) | Note |\n";
  os << "|---|---:|---:|---:|---:|---:|---:|---:|---:|---|\n";
  for (const auto& r : rows) {
    os << "| " << r.metric << " | " << r.n_subjects << " | " << fmt(r.t_stat, "%.3f") << " | "
       << r.df << " | " << fmt(r.p_value, "%.6f") << " | " << fmt(r.cohen_dz, "%.3f") << " | "
       << fmt(r.cohen_d_pooled, "%.3f") << " | " << fmt(r.n_req_one_sided, "%.3f") << " | "
       << fmt(r.n_req_two_sided, "%.3f") << " | " << r.error << " |\n";
  }
  return os.str();
}

}  // namespace pursuit::stats
