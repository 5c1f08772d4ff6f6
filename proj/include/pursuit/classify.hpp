#pragma once

// Baseline-vs-impaired classification from per-run metrics with a linear
// SVM, evaluated over repeated stratified 50/50 splits.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pursuit/stats.hpp"

namespace pursuit::classify {

inline constexpr std::size_t kFeatureCount = 5;
using FeatureRow = std::array<double, kFeatureCount>;

// Order of the feature columns; V gain is not a classifier input.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "mean_radius_deg", "skew_radial", "skew_phase", "kurt_phase", "blink_loss_pct"};

enum class Label { Baseline = 0, Impaired = 1 };
enum class Mode { Raw, Normalized };

std::string_view to_string(Mode m);

struct Observation {
  std::string subject_id;
  Label label = Label::Baseline;
  FeatureRow features{};
};

FeatureRow feature_row(const features::MetricVector& m);

// One observation per usable run. Normalized mode subtracts each subject's
// mean baseline row from all of that subject's rows.
std::vector<Observation> build_dataset(std::span<const stats::RunFeatures> rows, Mode mode);

struct Split {
  std::vector<Observation> train;
  std::vector<Observation> test;
};

// Stratified by label; subjects may appear on both sides.
Split split(std::span<const Observation> data, double fraction, std::uint64_t seed);

struct Standardization {
  FeatureRow means{};
  FeatureRow sds{1.0, 1.0, 1.0, 1.0, 1.0};

  FeatureRow apply(const FeatureRow& x) const;
};

struct Standardized {
  std::vector<Observation> train;
  std::vector<Observation> test;
  Standardization scaling;
};

// Fits means and sample SDs (n - 1) on train only and applies them to both.
Standardized standardize_fit_apply(std::span<const Observation> train,
                                   std::span<const Observation> test);

struct SvmOptions {
  bool standardize = true;
  double tolerance = 1e-6;
  int max_epochs = 1000;
};

struct SvmModel {
  FeatureRow weights{};  // in standardized space
  double bias = 0.0;
  double c_param = 1.0;
  FeatureRow feature_means{};
  FeatureRow feature_sds{1.0, 1.0, 1.0, 1.0, 1.0};
  std::uint64_t seed = 0;

  std::vector<double> dual_coef;  // alpha_i in [0, C], training order
  double dual_objective = 0.0;    // sum(alpha) - 0.5 |w|^2
  double primal_objective = 0.0;  // 0.5 |w|^2 + C sum(hinge)
  double final_violation = 0.0;
  int epochs = 0;
  bool converged = false;
};

// min_{w,b} 0.5 |w|^2 + C sum_i max(0, 1 - y_i (w.x_i + b)), y in {-1, +1},
// solved in the dual by pairwise coordinate updates that keep
// sum_i alpha_i y_i = 0. Every epoch visits the samples in a freshly
// shuffled order; each visited sample is paired with the partner that most
// violates optimality. Stops when the maximal violation falls below the
// tolerance or after max_epochs (converged = false, model still returned).
SvmModel train_linear_svm(std::span<const Observation> train, double c_param, std::uint64_t seed,
                          const SvmOptions& options = {});

// Primal objective of (w, b) on already-scaled rows.
double svm_primal_objective(std::span<const Observation> rows, const FeatureRow& w, double b,
                            double c_param);

// w . standardize(x) + b for each observation (raw feature space).
std::vector<double> decision_values(const SvmModel& model, std::span<const Observation> data);
// Label 1 iff decision value > 0.
std::vector<Label> predict(const SvmModel& model, std::span<const Observation> data);

// Mann-Whitney AUC with midranks; label true = impaired.
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const Label> labels);

struct SplitResult {
  double accuracy = 0.0;
  double auc = 0.0;
};

struct EvalReport {
  Mode mode = Mode::Raw;
  int n_splits = 0;
  std::vector<SplitResult> per_split;
  double median_auc = 0.0;
  double best_auc = 0.0;
  double median_accuracy = 0.0;
  std::vector<std::string> log;  // redrawn splits
};

// Split k uses the same seed in both modes, so the modes are compared on
// identical train/test memberships.
std::uint64_t split_seed(std::uint64_t seed, int split_index, int attempt);

EvalReport evaluate_mode(std::span<const stats::RunFeatures> rows, Mode mode, int n_splits,
                         double c_param, std::uint64_t seed);

std::array<EvalReport, 2> evaluate_modes(std::span<const stats::RunFeatures> rows, int n_splits,
                                         double c_param, std::uint64_t seed);

// Scores and labels of one split's test set, for plotting.
struct ScoredSplit {
  std::vector<double> scores;
  std::vector<Label> labels;
};
ScoredSplit score_split(std::span<const stats::RunFeatures> rows, Mode mode, int split_index,
                        double c_param, std::uint64_t seed);

}  // namespace pursuit::classify
