#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pursuit/preprocess.hpp"
#include "pursuit/trace.hpp"

namespace pursuit::features {

// Samples closer to the center than this fraction of the stimulus radius
// have an ill-defined polar angle and are dropped.
inline constexpr double kMinRadiusFraction = 0.1;
// Per-sample gains beyond this magnitude are treated as saccade-like.
inline constexpr double kSaccadeGainLimit = 3.0;
inline constexpr std::size_t kMinUsableSamples = 10;

struct ErrorSeries {
  std::vector<double> phase_err_rad;  // wrapped to (-pi, pi]
  std::vector<double> radial_err_deg;
  std::vector<double> gaze_radius_deg;
  std::vector<bool> usable;

  std::size_t usable_count() const;
  // Values at usable samples only.
  std::vector<double> usable_phase() const;
  std::vector<double> usable_radial() const;
};

struct MetricVector {
  double mean_radius_deg = 0.0;
  double v_gain = 0.0;
  double skew_radial = 0.0;
  double skew_phase = 0.0;
  double kurt_phase = 0.0;
  double blink_loss_pct = 0.0;
};

inline constexpr std::array<std::string_view, 6> kMetricNames{
    "mean_radius_deg", "v_gain", "skew_radial", "skew_phase", "kurt_phase", "blink_loss_pct"};

double metric_value(const MetricVector& m, std::size_t index);

// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

ErrorSeries decompose_errors(const GazeRun& run, const ValidityMask& mask);

// Uncorrected moment estimators g1 = m3 / m2^1.5 and g2 = m4 / m2^2 - 3.
double sample_skewness(std::span<const double> xs);
double excess_kurtosis(std::span<const double> xs);

double v_gain(const GazeRun& run, const ValidityMask& mask);

// Raised when a metric cannot be computed; names the metric.
class MetricError : public Error {
 public:
  MetricError(std::string metric, const Error& cause)
      : Error(cause.kind(), metric + ": " + cause.what()), metric_(std::move(metric)) {}
  const std::string& metric() const noexcept { return metric_; }

 private:
  std::string metric_;
};

MetricVector metric_vector(const GazeRun& run, int pad_samples = kDefaultBlinkPad);

struct Histogram {
  std::vector<double> edges;  // n_bins + 1
  std::vector<std::size_t> counts;
};

// Equal-width bins over [min, max] of the usable values. A zero-width range
// is widened to [v - 0.5, v + 0.5].
Histogram error_histogram(std::span<const double> values, const std::vector<bool>& usable,
                          int n_bins);

}  // namespace pursuit::features
