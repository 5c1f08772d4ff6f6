#pragma once

// Parametric oculomotor simulator for circular smooth pursuit.
//
// The gaze follows the target with a gain on angular speed and a time lag.
// The lag is treated as the phase response of a first-order low-pass stage,
// which also shrinks the tracked circle by cos(omega * lag). On top of that:
//   - exponentially correlated radial wobble (AR(1)),
//   - white positional jitter on both axes,
//   - Poisson blinks with truncated-normal durations (samples flagged invalid),
//   - Poisson pursuit lapses: the gaze sags inward and falls behind the target
//     along a slow-onset / fast-recovery profile, then rejoins the path.
// With every noise, lapse and blink parameter at zero and lag zero, the gaze
// is exactly the target scaled in angular speed by pursuit_gain.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pursuit/trace.hpp"

namespace pursuit::synth {

struct OculomotorParams {
  double pursuit_gain = 1.0;
  double phase_lag_s = 0.0;
  double radial_noise_sd_deg = 0.0;
  double radial_noise_corr_time_s = 0.0;
  double jitter_sd_deg = 0.0;
  double blink_rate_hz = 0.0;
  double blink_duration_mean_s = 0.0;
  double blink_duration_sd_s = 0.0;
  double lapse_rate_hz = 0.0;
  double lapse_depth_deg = 0.0;
  double lapse_duration_s = 0.0;

  std::vector<std::string> violations() const;
};

struct ParamField {
  std::string_view name;
  double OculomotorParams::*member;
  double lower;  // invariant lower bound
  double upper;  // invariant upper bound
};

// Field table used for serialization, overrides and clamping.
const std::array<ParamField, 11>& param_fields();

struct CohortSpec {
  int n_subjects = 19;
  int runs_per_session = 3;
  std::uint64_t seed = 42;
  OculomotorParams sober_population;
  OculomotorParams impaired_shift;       // added to each subject's sober draw
  OculomotorParams between_subject_sd;   // per-field SD of subject-level draws
  // Control cohort: impaired runs replay the baseline runs exactly.
  bool identical_sessions = false;

  std::vector<std::string> violations() const;
};

// Calibrated default cohort: sign of every group t-statistic follows the
// published table under diff = impaired - baseline.
CohortSpec default_cohort();

struct SubjectParams {
  SubjectRecord record;
  OculomotorParams sober;
  OculomotorParams impaired;
};

struct Cohort {
  std::vector<SubjectRecord> subjects;
  std::vector<SubjectParams> params;
  std::vector<GazeRun> runs;  // subject-major, baseline before impaired, run index ascending
  std::vector<std::string> clamp_log;
};

GazeRun simulate_run(const OculomotorParams& params, const StimulusSpec& spec, std::uint64_t seed);

Cohort simulate_cohort(const CohortSpec& cohort, const StimulusSpec& spec);

// Zero-padded identifiers "01", "02", ... (at least two digits).
std::string subject_label(int index, int n_subjects);

std::uint64_t run_seed(std::uint64_t cohort_seed, std::string_view subject_id, Session session,
                       int run_index);

}  // namespace pursuit::synth
