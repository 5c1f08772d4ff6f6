#include "pursuit/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pursuit::features {

namespace {

// Spread below this (relative to the data's magnitude, floored at one unit)
// is numerical noise, e.g. round-off on a noiseless trace.
constexpr double kVarianceResolution = 1e-10;

struct CentralMoments {
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

CentralMoments central_moments(std::span<const double> xs, std::size_t min_n) {
  if (xs.size() < min_n)
    throw Error(ErrorKind::TooFewSamples,
                "need >= " + std::to_string(min_n) + " values, got " + std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  CentralMoments m;
  double scale = 1.0;
  for (double x : xs) {
    const double d = x - mean;
    const double d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
    scale = std::max(scale, std::abs(x));
  }
  m.m2 /= n;
  m.m3 /= n;
  m.m4 /= n;
  if (!(std::sqrt(m.m2) > kVarianceResolution * scale)) throw Error(ErrorKind::ZeroVariance);
  return m;
}

double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

void check_lengths(const GazeRun& run, const ValidityMask& mask) {
  if (run.samples.empty()) throw Error(ErrorKind::EmptyRun);
  if (mask.flags.size() != run.samples.size())
    throw Error(ErrorKind::LengthMismatch, "mask has " + std::to_string(mask.flags.size()) +
                                               " flags for " +
                                               std::to_string(run.samples.size()) + " samples");
}

bool usable_sample(const GazeRun& run, const ValidityMask& mask, std::size_t i) {
  if (!mask.flags[i] || !run.samples[i].valid) return false;
  const auto& c = run.stimulus.center_deg;
  const double r = std::hypot(run.samples[i].x_deg - c.x, run.samples[i].y_deg - c.y);
  return r >= kMinRadiusFraction * run.stimulus.radius_deg;
}

}  // namespace

double wrap_angle(double radians) {
  double e = std::remainder(radians, kTwoPi);
  if (e <= -kPi) e += kTwoPi;
  return e;
}

std::size_t ErrorSeries::usable_count() const {
  return static_cast<std::size_t>(std::count(usable.begin(), usable.end(), true));
}

std::vector<double> ErrorSeries::usable_phase() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < usable.size(); ++i)
    if (usable[i]) out.push_back(phase_err_rad[i]);
  return out;
}

std::vector<double> ErrorSeries::usable_radial() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < usable.size(); ++i)
    if (usable[i]) out.push_back(radial_err_deg[i]);
  return out;
}

double metric_value(const MetricVector& m, std::size_t index) {
  switch (index) {
    case 0: return m.mean_radius_deg;
    case 1: return m.v_gain;
    case 2: return m.skew_radial;
    case 3: return m.skew_phase;
    case 4: return m.kurt_phase;
    case 5: return m.blink_loss_pct;
    default: throw std::out_of_range("metric index");
  }
}

ErrorSeries decompose_errors(const GazeRun& run, const ValidityMask& mask) {
  check_lengths(run, mask);
  const auto& spec = run.stimulus;
  const std::size_t n = run.samples.size();
  ErrorSeries es;
  es.phase_err_rad.assign(n, 0.0);
  es.radial_err_deg.assign(n, 0.0);
  es.gaze_radius_deg.assign(n, 0.0);
  es.usable.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = run.samples[i];
    if (!mask.flags[i] || !s.valid) continue;
    const double dx = s.x_deg - spec.center_deg.x;
    const double dy = s.y_deg - spec.center_deg.y;
    const double r = std::hypot(dx, dy);
    es.gaze_radius_deg[i] = r;
    if (r < kMinRadiusFraction * spec.radius_deg) continue;
    es.usable[i] = true;
    es.radial_err_deg[i] = r - spec.radius_deg;
    es.phase_err_rad[i] = wrap_angle(std::atan2(dy, dx) - target_angle(spec, s.t_s));
  }
  if (es.usable_count() < kMinUsableSamples)
    throw Error(ErrorKind::DegenerateRun, std::to_string(es.usable_count()) + " usable samples");
  return es;
}

double sample_skewness(std::span<const double> xs) {
  const auto m = central_moments(xs, 3);
  return m.m3 / std::pow(m.m2, 1.5);
}

double excess_kurtosis(std::span<const double> xs) {
  const auto m = central_moments(xs, 4);
  return m.m4 / (m.m2 * m.m2) - 3.0;
}

double v_gain(const GazeRun& run, const ValidityMask& mask) {
  check_lengths(run, mask);
  const auto& spec = run.stimulus;
  const double target_velocity = spec.sign() * spec.angular_speed();
  const std::size_t n = run.samples.size();

  std::vector<double> gains;
  std::vector<double> angle;
  std::size_t i = 0;
  bool any_span = false;
  while (i < n) {
    if (!usable_sample(run, mask, i)) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < n && usable_sample(run, mask, end)) ++end;
    if (end - i >= 3) {
      any_span = true;
      angle.clear();
      for (std::size_t k = i; k < end; ++k) {
        const double a = std::atan2(run.samples[k].y_deg - spec.center_deg.y,
                                    run.samples[k].x_deg - spec.center_deg.x);
        angle.push_back(angle.empty() ? a : angle.back() + wrap_angle(a - angle.back()));
      }
      for (std::size_t k = 1; k + 1 < angle.size(); ++k) {
        const double dt = run.samples[i + k + 1].t_s - run.samples[i + k - 1].t_s;
        const double gain = (angle[k + 1] - angle[k - 1]) / dt / target_velocity;
        if (std::abs(gain) <= kSaccadeGainLimit) gains.push_back(gain);
      }
    }
    i = end;
  }
  if (!any_span) throw Error(ErrorKind::DegenerateRun, "no span of 3 consecutive usable samples");
  if (gains.empty()) throw Error(ErrorKind::DegenerateRun, "every gain sample is saccade-like");
  return median_in_place(gains);
}

MetricVector metric_vector(const GazeRun& run, int pad_samples) {
  const ValidityMask mask = mask_blinks(run, pad_samples);
  auto guarded = [](const char* metric, auto&& fn) {
    try {
      return fn();
    } catch (const MetricError&) {
      throw;
    } catch (const Error& e) {
      throw MetricError(metric, e);
    }
  };

  const ErrorSeries es = guarded("error_decomposition", [&] { return decompose_errors(run, mask); });
  const auto phase = es.usable_phase();
  const auto radial = es.usable_radial();

  MetricVector m;
  double radius_sum = 0.0;
  for (std::size_t i = 0; i < es.usable.size(); ++i)
    if (es.usable[i]) radius_sum += es.gaze_radius_deg[i];
  m.mean_radius_deg = radius_sum / static_cast<double>(es.usable_count());
  m.v_gain = guarded("v_gain", [&] { return v_gain(run, mask); });
  m.skew_radial = guarded("skew_radial", [&] { return sample_skewness(radial); });
  m.skew_phase = guarded("skew_phase", [&] { return sample_skewness(phase); });
  m.kurt_phase = guarded("kurt_phase", [&] { return excess_kurtosis(phase); });
  m.blink_loss_pct = blink_loss_percent(mask);
  return m;
}

Histogram error_histogram(std::span<const double> values, const std::vector<bool>& usable,
                          int n_bins) {
  if (n_bins < 2) throw Error(ErrorKind::InvalidParams, "n_bins must be >= 2");
  if (usable.size() != values.size()) throw Error(ErrorKind::LengthMismatch, "usable flags");
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!usable[i]) continue;
    lo = any ? std::min(lo, values[i]) : values[i];
    hi = any ? std::max(hi, values[i]) : values[i];
    any = true;
  }
  if (!any) throw Error(ErrorKind::NoUsableSamples);
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  const auto bins = static_cast<std::size_t>(n_bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + width * static_cast<double>(b));
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!usable[i]) continue;
    auto b = static_cast<std::size_t>((values[i] - lo) / width);
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

}  // namespace pursuit::features
