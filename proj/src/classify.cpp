#include "pursuit/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>

#include "pursuit/rng.hpp"

namespace pursuit::classify {

namespace {

constexpr int kMaxSplitAttempts = 100;

double dot(const FeatureRow& a, const FeatureRow& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < kFeatureCount; ++k) s += a[k] * b[k];
  return s;
}

double sign_of(Label l) { return l == Label::Impaired ? 1.0 : -1.0; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool has_both_labels(std::span<const Observation> data) {
  bool pos = false, neg = false;
  for (const auto& o : data) (o.label == Label::Impaired ? pos : neg) = true;
  return pos && neg;
}

struct SplitOutcome {
  SplitResult result;
  ScoredSplit scored;
  std::vector<std::string> log;
};

SplitOutcome run_split(std::span<const Observation> dataset, int k, double c_param,
                       std::uint64_t seed) {
  SplitOutcome out;
  for (int attempt = 0; attempt < kMaxSplitAttempts; ++attempt) {
    const std::uint64_t s = split_seed(seed, k, attempt);
    try {
      const Split sp = split(dataset, 0.5, s);
      const SvmModel model = train_linear_svm(sp.train, c_param, s);
      out.scored.scores = decision_values(model, sp.test);
      const auto predicted = predict(model, sp.test);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < sp.test.size(); ++i) {
        out.scored.labels.push_back(sp.test[i].label);
        if (predicted[i] == sp.test[i].label) ++correct;
      }
      out.result.accuracy = static_cast<double>(correct) / static_cast<double>(sp.test.size());
      out.result.auc = roc_auc(out.scored.scores, out.scored.labels);
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateSplit && e.kind() != ErrorKind::ZeroVarianceFeature &&
          e.kind() != ErrorKind::SingleClass)
        throw;
      out.log.push_back("split " + std::to_string(k) + " attempt " + std::to_string(attempt) +
                        " redrawn: " + e.what());
    }
  }
  throw Error(ErrorKind::DegenerateSplit,
              "split " + std::to_string(k) + " failed after " +
                  std::to_string(kMaxSplitAttempts) + " attempts");
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::Raw ? "raw" : "normalized"; }

FeatureRow feature_row(const features::MetricVector& m) {
  return {m.mean_radius_deg, m.skew_radial, m.skew_phase, m.kurt_phase, m.blink_loss_pct};
}

std::vector<Observation> build_dataset(std::span<const stats::RunFeatures> rows, Mode mode) {
  std::vector<Observation> out;
  for (const auto& r : rows) {
    if (!r.metrics) continue;
    out.push_back({r.subject_id,
                   r.session == Session::Impaired ? Label::Impaired : Label::Baseline,
                   feature_row(*r.metrics)});
  }
  if (mode == Mode::Raw) return out;

  std::map<std::string, std::pair<FeatureRow, int>> baseline_sum;
  for (const auto& o : out) {
    auto& [sum, count] = baseline_sum[o.subject_id];
    if (o.label != Label::Baseline) continue;
    for (std::size_t k = 0; k < kFeatureCount; ++k) sum[k] += o.features[k];
    ++count;
  }
  for (auto& o : out) {
    const auto& [sum, count] = baseline_sum.at(o.subject_id);
    if (count == 0) throw Error(ErrorKind::MissingBaseline, "subject " + o.subject_id);
    for (std::size_t k = 0; k < kFeatureCount; ++k) o.features[k] -= sum[k] / count;
  }
  return out;
}

Split split(std::span<const Observation> data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw Error(ErrorKind::InvalidParams, "split fraction must be in (0, 1)");
  Rng rng(seed);
  std::array<std::vector<std::size_t>, 2> by_label;
  for (std::size_t i = 0; i < data.size(); ++i)
    by_label[static_cast<int>(data[i].label)].push_back(i);

  // Largest-remainder allocation of round(fraction * N) training slots.
  const auto total_train = static_cast<std::size_t>(std::llround(fraction * data.size()));
  std::array<std::size_t, 2> take{};
  std::array<double, 2> remainder{};
  std::size_t allotted = 0;
  for (int l = 0; l < 2; ++l) {
    const double exact = fraction * static_cast<double>(by_label[l].size());
    take[l] = static_cast<std::size_t>(std::floor(exact));
    remainder[l] = exact - std::floor(exact);
    allotted += take[l];
  }
  std::bernoulli_distribution coin(0.5);
  const bool tie_to_first = coin(rng);
  while (allotted < total_train) {
    int l = remainder[0] > remainder[1] ? 0 : remainder[1] > remainder[0] ? 1 : (tie_to_first ? 0 : 1);
    if (take[l] >= by_label[l].size()) l = 1 - l;
    ++take[l];
    remainder[l] = -1.0;
    ++allotted;
  }

  std::vector<bool> in_train(data.size(), false);
  for (int l = 0; l < 2; ++l) {
    auto idx = by_label[l];
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < take[l]; ++k) in_train[idx[k]] = true;
  }
  Split out;
  for (std::size_t i = 0; i < data.size(); ++i) (in_train[i] ? out.train : out.test).push_back(data[i]);
  if (!has_both_labels(out.train) || !has_both_labels(out.test))
    throw Error(ErrorKind::DegenerateSplit, "a side of the split is missing a label");
  return out;
}

FeatureRow Standardization::apply(const FeatureRow& x) const {
  FeatureRow z;
  for (std::size_t k = 0; k < kFeatureCount; ++k) z[k] = (x[k] - means[k]) / sds[k];
  return z;
}

Standardized standardize_fit_apply(std::span<const Observation> train,
                                   std::span<const Observation> test) {
  if (train.size() < 2) throw Error(ErrorKind::TooFewSamples, "standardization needs >= 2 rows");
  Standardized out;
  const double n = static_cast<double>(train.size());
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    double sum = 0.0, scale = 0.0;
    for (const auto& o : train) {
      sum += o.features[k];
      scale = std::max(scale, std::abs(o.features[k]));
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& o : train) ss += (o.features[k] - mean) * (o.features[k] - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 1e-12 * scale))
      throw Error(ErrorKind::ZeroVarianceFeature, "feature " + std::to_string(k) + " (" +
                                                      std::string(kFeatureNames[k]) + ")");
    out.scaling.means[k] = mean;
    out.scaling.sds[k] = sd;
  }
  for (const auto& o : train) out.train.push_back({o.subject_id, o.label, out.scaling.apply(o.features)});
  for (const auto& o : test) out.test.push_back({o.subject_id, o.label, out.scaling.apply(o.features)});
  return out;
}

double svm_primal_objective(std::span<const Observation> rows, const FeatureRow& w, double b,
                            double c_param) {
  double hinge = 0.0;
  for (const auto& o : rows) hinge += std::max(0.0, 1.0 - sign_of(o.label) * (dot(w, o.features) + b));
  return 0.5 * dot(w, w) + c_param * hinge;
}

SvmModel train_linear_svm(std::span<const Observation> train, double c_param, std::uint64_t seed,
                          const SvmOptions& options) {
  if (!(c_param > 0.0)) throw Error(ErrorKind::InvalidParams, "C must be > 0");
  if (!has_both_labels(train)) throw Error(ErrorKind::SingleClass, "training set has one label");

  SvmModel model;
  model.c_param = c_param;
  model.seed = seed;
  std::vector<Observation> rows;
  if (options.standardize) {
    auto s = standardize_fit_apply(train, {});
    rows = std::move(s.train);
    model.feature_means = s.scaling.means;
    model.feature_sds = s.scaling.sds;
  } else {
    rows.assign(train.begin(), train.end());
  }

  const std::size_t n = rows.size();
  const double C = c_param;
  std::vector<double> y(n), alpha(n, 0.0), grad(n, -1.0), sq_norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = sign_of(rows[i].label);
    sq_norm[i] = dot(rows[i].features, rows[i].features);
  }
  FeatureRow w{};

  // Membership of the two index sets of the equality-constrained dual.
  auto in_up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < C : alpha[t] > 0.0; };
  auto in_low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < C; };
  auto score = [&](std::size_t t) { return -y[t] * grad[t]; };

  auto max_violation = [&]() {
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t)) up = std::max(up, score(t));
      if (in_low(t)) low = std::min(low, score(t));
    }
    return (std::isinf(up) || std::isinf(low)) ? 0.0 : up - low;
  };

  // Moves along alpha_i += y_i * lambda, alpha_j -= y_j * lambda, which keeps
  // sum(alpha * y) fixed; i must be in I_up and j in I_low.
  auto update_pair = [&](std::size_t i, std::size_t j) {
    const double slope = y[i] * grad[i] - y[j] * grad[j];
    if (slope >= 0.0) return;
    double curvature = sq_norm[i] + sq_norm[j] - 2.0 * dot(rows[i].features, rows[j].features);
    if (curvature <= 1e-12) curvature = 1e-12;
    double lambda = -slope / curvature;
    lambda = std::min(lambda, y[i] > 0 ? C - alpha[i] : alpha[i]);
    lambda = std::min(lambda, y[j] > 0 ? alpha[j] : C - alpha[j]);
    if (lambda <= 0.0) return;
    alpha[i] = std::clamp(alpha[i] + y[i] * lambda, 0.0, C);
    alpha[j] = std::clamp(alpha[j] - y[j] * lambda, 0.0, C);
    FeatureRow dw;
    for (std::size_t k = 0; k < kFeatureCount; ++k)
      dw[k] = lambda * (rows[i].features[k] - rows[j].features[k]);
    for (std::size_t k = 0; k < kFeatureCount; ++k) w[k] += dw[k];
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * dot(dw, rows[t].features);
  };

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double violation = max_violation();
  int epoch = 0;
  while (violation >= options.tolerance && epoch < options.max_epochs) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      if (in_up(i)) {
        std::optional<std::size_t> partner;
        for (std::size_t t = 0; t < n; ++t)
          if (t != i && in_low(t) && (!partner || score(t) < score(*partner))) partner = t;
        if (partner && score(i) - score(*partner) > 0.0) update_pair(i, *partner);
      }
      if (in_low(i)) {
        std::optional<std::size_t> partner;
        for (std::size_t t = 0; t < n; ++t)
          if (t != i && in_up(t) && (!partner || score(t) > score(*partner))) partner = t;
        if (partner && score(*partner) - score(i) > 0.0) update_pair(*partner, i);
      }
    }
    ++epoch;
    violation = max_violation();
  }

  // Bias from free support vectors, else the midpoint of the feasible interval.
  double free_sum = 0.0;
  int free_count = 0;
  double up = -std::numeric_limits<double>::infinity();
  double low = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0 && alpha[t] < C) {
      free_sum += score(t);
      ++free_count;
    }
    if (in_up(t)) up = std::max(up, score(t));
    if (in_low(t)) low = std::min(low, score(t));
  }
  double bias = 0.0;
  if (free_count > 0) {
    bias = free_sum / free_count;
  } else if (std::isfinite(up) && std::isfinite(low)) {
    bias = 0.5 * (up + low);
  }

  model.weights = w;
  model.bias = bias;
  model.dual_coef = alpha;
  model.dual_objective = std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * dot(w, w);
  model.primal_objective = svm_primal_objective(rows, w, bias, C);
  model.final_violation = violation;
  model.epochs = epoch;
  model.converged = violation < options.tolerance;
  return model;
}

std::vector<double> decision_values(const SvmModel& model, std::span<const Observation> data) {
  const Standardization scaling{model.feature_means, model.feature_sds};
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& o : data) out.push_back(dot(model.weights, scaling.apply(o.features)) + model.bias);
  return out;
}

std::vector<Label> predict(const SvmModel& model, std::span<const Observation> data) {
  std::vector<Label> out;
  for (double v : decision_values(model, data)) out.push_back(v > 0.0 ? Label::Impaired : Label::Baseline);
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::LengthMismatch, "scores vs labels");
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]] == Label::Impaired) {
        rank_sum += midrank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw Error(ErrorKind::SingleClass, "AUC needs both labels");
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::LengthMismatch, "scores vs labels");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double pos = 0.0, neg = 0.0;
  for (auto l : labels) (l == Label::Impaired ? pos : neg) += 1.0;
  if (pos == 0.0 || neg == 0.0) throw Error(ErrorKind::SingleClass, "ROC needs both labels");
  std::vector<RocPoint> curve{{0.0, 0.0}};
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      (labels[idx[j]] == Label::Impaired ? tp : fp) += 1.0;
      ++j;
    }
    curve.push_back({fp / neg, tp / pos});
    i = j;
  }
  return curve;
}

std::uint64_t split_seed(std::uint64_t seed, int split_index, int attempt) {
  return derive_seed(seed, {static_cast<std::uint64_t>(split_index), static_cast<std::uint64_t>(attempt)});
}

EvalReport evaluate_mode(std::span<const stats::RunFeatures> rows, Mode mode, int n_splits,
                         double c_param, std::uint64_t seed) {
  if (n_splits < 1) throw Error(ErrorKind::InvalidParams, "n_splits must be >= 1");
  const auto dataset = build_dataset(rows, mode);
  EvalReport report;
  report.mode = mode;
  report.n_splits = n_splits;
  for (int k = 0; k < n_splits; ++k) {
    auto outcome = run_split(dataset, k, c_param, seed);
    report.per_split.push_back(outcome.result);
    for (auto& line : outcome.log) report.log.push_back(std::move(line));
  }
  std::vector<double> aucs, accs;
  for (const auto& r : report.per_split) {
    aucs.push_back(r.auc);
    accs.push_back(r.accuracy);
  }
  report.median_auc = median(aucs);
  report.best_auc = *std::max_element(aucs.begin(), aucs.end());
  report.median_accuracy = median(accs);
  return report;
}

std::array<EvalReport, 2> evaluate_modes(std::span<const stats::RunFeatures> rows, int n_splits,
                                         double c_param, std::uint64_t seed) {
  return {evaluate_mode(rows, Mode::Raw, n_splits, c_param, seed),
          evaluate_mode(rows, Mode::Normalized, n_splits, c_param, seed)};
}

ScoredSplit score_split(std::span<const stats::RunFeatures> rows, Mode mode, int split_index,
                        double c_param, std::uint64_t seed) {
  const auto dataset = build_dataset(rows, mode);
  return run_split(dataset, split_index, c_param, seed).scored;
}

}  // namespace pursuit::classify
