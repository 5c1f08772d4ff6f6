#include "pursuit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pursuit/rng.hpp"

namespace pursuit::synth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Component streams, so that switching one mechanism off leaves the
// others' draws untouched.
enum Stream : std::uint64_t { kRadial = 1, kJitter = 2, kBlink = 3, kLapse = 4 };

// Fraction of a lapse spent sagging; the remainder is the recovery.
constexpr double kLapseOnsetFraction = 0.7;

double lapse_profile(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  if (u < kLapseOnsetFraction) return 0.5 * (1.0 - std::cos(kPi * u / kLapseOnsetFraction));
  const double v = (u - kLapseOnsetFraction) / (1.0 - kLapseOnsetFraction);
  return 0.5 * (1.0 + std::cos(kPi * v));
}

std::vector<double> poisson_arrivals(double rate_hz, double horizon_s, Rng& rng) {
  std::vector<double> out;
  if (!(rate_hz > 0.0)) return out;
  std::exponential_distribution<double> gap(rate_hz);
  for (double t = gap(rng); t < horizon_s; t += gap(rng)) out.push_back(t);
  return out;
}

// Normal draw rejected below `floor`; falls back to the floor after a
// bounded number of attempts (only reachable for absurd mean/sd pairs).
double truncated_normal(double mean, double sd, double floor, Rng& rng) {
  if (!(sd > 0.0)) return std::max(mean, floor);
  std::normal_distribution<double> nd(mean, sd);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x = nd(rng);
    if (x >= floor) return x;
  }
  return floor;
}

void clamp_params(OculomotorParams& p, const std::string& who, std::vector<std::string>& log) {
  for (const auto& f : param_fields()) {
    double& v = p.*(f.member);
    const double clamped = std::clamp(v, f.lower, f.upper);
    if (clamped != v) {
      std::ostringstream os;
      os << who << ": " << f.name << " " << v << " clamped to " << clamped;
      log.push_back(os.str());
      v = clamped;
    }
  }
}

}  // namespace

const std::array<ParamField, 11>& param_fields() {
  static const std::array<ParamField, 11> fields{{
      {"pursuit_gain", &OculomotorParams::pursuit_gain, 0.0, 1.5},
      {"phase_lag_s", &OculomotorParams::phase_lag_s, 0.0, kInf},
      {"radial_noise_sd_deg", &OculomotorParams::radial_noise_sd_deg, 0.0, kInf},
      {"radial_noise_corr_time_s", &OculomotorParams::radial_noise_corr_time_s, 0.0, kInf},
      {"jitter_sd_deg", &OculomotorParams::jitter_sd_deg, 0.0, kInf},
      {"blink_rate_hz", &OculomotorParams::blink_rate_hz, 0.0, kInf},
      {"blink_duration_mean_s", &OculomotorParams::blink_duration_mean_s, 0.0, kInf},
      {"blink_duration_sd_s", &OculomotorParams::blink_duration_sd_s, 0.0, kInf},
      {"lapse_rate_hz", &OculomotorParams::lapse_rate_hz, 0.0, kInf},
      {"lapse_depth_deg", &OculomotorParams::lapse_depth_deg, 0.0, kInf},
      {"lapse_duration_s", &OculomotorParams::lapse_duration_s, 0.0, kInf},
  }};
  return fields;
}

std::vector<std::string> OculomotorParams::violations() const {
  std::vector<std::string> out;
  for (const auto& f : param_fields()) {
    const double v = this->*(f.member);
    if (!(v >= f.lower && v <= f.upper)) {
      std::ostringstream os;
      os << f.name << "=" << v << " outside [" << f.lower << ", " << f.upper << "]";
      out.push_back(os.str());
    }
  }
  return out;
}

std::vector<std::string> CohortSpec::violations() const {
  std::vector<std::string> out;
  if (n_subjects < 1) out.push_back("n_subjects must be >= 1");
  if (runs_per_session < 1) out.push_back("runs_per_session must be >= 1");
  if (runs_per_session > 3) out.push_back("runs_per_session must be <= 3");
  for (auto& v : sober_population.violations()) out.push_back("sober_population." + v);
  for (const auto& f : param_fields()) {
    if (!(between_subject_sd.*(f.member) >= 0.0))
      out.push_back("between_subject_sd." + std::string(f.name) + " must be >= 0");
    if (!std::isfinite(impaired_shift.*(f.member)))
      out.push_back("impaired_shift." + std::string(f.name) + " must be finite");
  }
  return out;
}

CohortSpec default_cohort() {
  CohortSpec c;
  c.sober_population = {
      .pursuit_gain = 1.0,
      .phase_lag_s = 0.08,
      .radial_noise_sd_deg = 0.35,
      .radial_noise_corr_time_s = 0.25,
      .jitter_sd_deg = 0.15,
      .blink_rate_hz = 0.25,
      .blink_duration_mean_s = 0.25,
      .blink_duration_sd_s = 0.08,
      .lapse_rate_hz = 0.05,
      .lapse_depth_deg = 1.0,
      .lapse_duration_s = 1.2,
  };
  c.impaired_shift = {
      .pursuit_gain = -0.002,
      .phase_lag_s = 0.01,
      .radial_noise_sd_deg = 0.05,
      .radial_noise_corr_time_s = 0.0,
      .jitter_sd_deg = 0.02,
      .blink_rate_hz = -0.08,
      .blink_duration_mean_s = 0.0,
      .blink_duration_sd_s = 0.0,
      .lapse_rate_hz = 0.04,
      .lapse_depth_deg = 1.5,
      .lapse_duration_s = -0.3,
  };
  c.between_subject_sd = {
      .pursuit_gain = 0.003,
      .phase_lag_s = 0.08,
      .radial_noise_sd_deg = 0.2,
      .radial_noise_corr_time_s = 0.08,
      .jitter_sd_deg = 0.08,
      .blink_rate_hz = 0.15,
      .blink_duration_mean_s = 0.05,
      .blink_duration_sd_s = 0.0,
      .lapse_rate_hz = 0.04,
      .lapse_depth_deg = 1.0,
      .lapse_duration_s = 0.3,
  };
  return c;
}

std::string subject_label(int index, int n_subjects) {
  int width = 2;
  for (int n = n_subjects; n >= 100; n /= 10) ++width;
  std::string s = std::to_string(index);
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::uint64_t run_seed(std::uint64_t cohort_seed, std::string_view subject_id, Session session,
                       int run_index) {
  return derive_seed(cohort_seed, {fnv1a(subject_id), session == Session::Baseline ? 0u : 1u,
                                   static_cast<std::uint64_t>(run_index)});
}

GazeRun simulate_run(const OculomotorParams& params, const StimulusSpec& spec, std::uint64_t seed) {
  if (auto v = params.violations(); !v.empty()) throw Error(ErrorKind::InvalidParams, v.front());
  if (auto v = spec.violations(); !v.empty()) throw Error(ErrorKind::InvalidStimulus, v.front());

  const std::size_t n = spec.sample_count();
  const double dt = spec.sample_period();
  const double omega = spec.angular_speed();
  const double s = spec.sign();
  const double radius = spec.radius_deg;
  const double duration = static_cast<double>(n) * dt;

  // First-order low-pass with phase lag omega*lag has amplitude cos(omega*lag).
  const double amplitude = std::cos(std::min(omega * params.phase_lag_s, kPi / 2.0));

  GazeRun run;
  run.stimulus = spec;
  run.samples.resize(n);

  Rng radial_rng(derive_seed(seed, {kRadial}));
  Rng jitter_rng(derive_seed(seed, {kJitter}));
  Rng blink_rng(derive_seed(seed, {kBlink}));
  Rng lapse_rng(derive_seed(seed, {kLapse}));
  std::normal_distribution<double> unit(0.0, 1.0);

  // Lapse envelope in [0, k] for k overlapping lapses.
  std::vector<double> sag(n, 0.0);
  if (params.lapse_depth_deg > 0.0 && params.lapse_duration_s > 0.0) {
    for (double start : poisson_arrivals(params.lapse_rate_hz, duration, lapse_rng)) {
      const auto first = static_cast<std::size_t>(std::ceil(start / dt));
      for (std::size_t i = first; i < n; ++i) {
        const double u = (static_cast<double>(i) * dt - start) / params.lapse_duration_s;
        if (u >= 1.0) break;
        sag[i] += lapse_profile(u);
      }
    }
  }

  const double rho = params.radial_noise_corr_time_s > 0.0
                         ? std::exp(-dt / params.radial_noise_corr_time_s)
                         : 0.0;
  const double innovation_sd = params.radial_noise_sd_deg * std::sqrt(1.0 - rho * rho);
  double wobble = params.radial_noise_sd_deg * unit(radial_rng);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (i > 0) wobble = rho * wobble + innovation_sd * unit(radial_rng);
    const double sag_deg = params.lapse_depth_deg * sag[i];
    // Lagging means the gaze angle trails the target along the direction of motion.
    const double angle =
        s * omega * (params.pursuit_gain * t - params.phase_lag_s) - s * sag_deg / radius;
    const double r = amplitude * radius + wobble - sag_deg;
    double x = spec.center_deg.x + r * std::cos(angle);
    double y = spec.center_deg.y + r * std::sin(angle);
    if (params.jitter_sd_deg > 0.0) {
      x += params.jitter_sd_deg * unit(jitter_rng);
      y += params.jitter_sd_deg * unit(jitter_rng);
    }
    run.samples[i] = {t, x, y, true};
  }

  for (double start : poisson_arrivals(params.blink_rate_hz, duration, blink_rng)) {
    const double len = truncated_normal(params.blink_duration_mean_s, params.blink_duration_sd_s,
                                        dt, blink_rng);
    const auto first = static_cast<std::size_t>(std::ceil(start / dt));
    for (std::size_t i = first; i < n && static_cast<double>(i) * dt < start + len; ++i) {
      run.samples[i] = {run.samples[i].t_s, 0.0, 0.0, false};
    }
  }
  return run;
}

Cohort simulate_cohort(const CohortSpec& cohort, const StimulusSpec& spec) {
  if (auto v = cohort.violations(); !v.empty()) throw Error(ErrorKind::InvalidParams, v.front());
  if (auto v = spec.violations(); !v.empty()) throw Error(ErrorKind::InvalidStimulus, v.front());

  Cohort out;
  for (int k = 1; k <= cohort.n_subjects; ++k) {
    SubjectParams sp;
    sp.record.subject_id = subject_label(k, cohort.n_subjects);
    Rng draw(derive_seed(cohort.seed, {fnv1a(sp.record.subject_id), 0x5eedULL}));
    std::normal_distribution<double> unit(0.0, 1.0);
    for (const auto& f : param_fields()) {
      const double z = unit(draw);
      sp.sober.*(f.member) =
          cohort.sober_population.*(f.member) + cohort.between_subject_sd.*(f.member) * z;
    }
    clamp_params(sp.sober, "subject " + sp.record.subject_id + " sober", out.clamp_log);
    sp.impaired = sp.sober;
    if (!cohort.identical_sessions) {
      for (const auto& f : param_fields())
        sp.impaired.*(f.member) += cohort.impaired_shift.*(f.member);
      clamp_params(sp.impaired, "subject " + sp.record.subject_id + " impaired", out.clamp_log);
    }

    for (Session session : {Session::Baseline, Session::Impaired}) {
      const auto& p = session == Session::Baseline ? sp.sober : sp.impaired;
      for (int r = 0; r < cohort.runs_per_session; ++r) {
        const Session seed_session = cohort.identical_sessions ? Session::Baseline : session;
        GazeRun run =
            simulate_run(p, spec, run_seed(cohort.seed, sp.record.subject_id, seed_session, r));
        run.subject_id = sp.record.subject_id;
        run.session = session;
        run.run_index = r;
        out.runs.push_back(std::move(run));
      }
    }
    out.subjects.push_back(sp.record);
    out.params.push_back(std::move(sp));
  }
  return out;
}

}  // namespace pursuit::synth
