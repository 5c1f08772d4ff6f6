#include "pursuit/trace.hpp"

#include <cmath>
#include <sstream>

namespace pursuit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyRun: return "EmptyRun";
    case ErrorKind::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorKind::IrregularSampling: return "IrregularSampling";
    case ErrorKind::InvalidStimulus: return "InvalidStimulus";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::DegenerateRun: return "DegenerateRun";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::NoUsableSamples: return "NoUsableSamples";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::TooFewSubjects: return "TooFewSubjects";
    case ErrorKind::InvalidDf: return "InvalidDf";
    case ErrorKind::ZeroEffect: return "ZeroEffect";
    case ErrorKind::Unattainable: return "Unattainable";
    case ErrorKind::MissingBaseline: return "MissingBaseline";
    case ErrorKind::MissingSession: return "MissingSession";
    case ErrorKind::UnknownSubject: return "UnknownSubject";
    case ErrorKind::DegenerateSplit: return "DegenerateSplit";
    case ErrorKind::ZeroVarianceFeature: return "ZeroVarianceFeature";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(Direction d) {
  return d == Direction::Clockwise ? "clockwise" : "counterclockwise";
}

std::string_view to_string(Session s) { return s == Session::Baseline ? "baseline" : "impaired"; }

Direction parse_direction(std::string_view text) {
  if (text == "clockwise") return Direction::Clockwise;
  if (text == "counterclockwise") return Direction::Counterclockwise;
  throw Error(ErrorKind::Parse, "unknown direction '" + std::string(text) + "'");
}

Session parse_session(std::string_view text) {
  if (text == "baseline") return Session::Baseline;
  if (text == "impaired") return Session::Impaired;
  throw Error(ErrorKind::Parse, "unknown session '" + std::string(text) + "'");
}

std::size_t StimulusSpec::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
}

std::vector<std::string> StimulusSpec::violations() const {
  std::vector<std::string> out;
  if (!(frequency_hz > 0.0)) out.push_back("frequency_hz must be > 0");
  if (!(radius_deg > 0.0)) out.push_back("radius_deg must be > 0");
  if (!(duration_s > 0.0)) out.push_back("duration_s must be > 0");
  if (!(sample_rate_hz >= 20.0 * frequency_hz))
    out.push_back("sample_rate_hz must be >= 20 x frequency_hz");
  if (!std::isfinite(center_deg.x) || !std::isfinite(center_deg.y))
    out.push_back("center_deg must be finite");
  return out;
}

double target_angle(const StimulusSpec& spec, double t) {
  return spec.sign() * spec.angular_speed() * t;
}

Point target_position(const StimulusSpec& spec, double t) {
  const double theta = target_angle(spec, t);
  return {spec.center_deg.x + spec.radius_deg * std::cos(theta),
          spec.center_deg.y + spec.radius_deg * std::sin(theta)};
}

std::string RunViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::EmptyRun: os << "EmptyRun"; break;
    case Kind::NonMonotoneTime: os << "NonMonotoneTime(" << index << ")"; break;
    case Kind::IrregularSampling:
      os << "IrregularSampling(" << index << ", dt=" << observed_dt << ")";
      break;
    case Kind::BadRunIndex: os << "BadRunIndex(" << detail << ")"; break;
    case Kind::InvalidStimulus: os << "InvalidStimulus(" << detail << ")"; break;
  }
  return os.str();
}

std::vector<RunViolation> check_run(const GazeRun& run) {
  using K = RunViolation::Kind;
  std::vector<RunViolation> out;
  for (const auto& v : run.stimulus.violations()) out.push_back({K::InvalidStimulus, 0, 0.0, v});
  if (run.run_index < 0 || run.run_index > 2)
    out.push_back({K::BadRunIndex, 0, 0.0, std::to_string(run.run_index)});
  if (run.samples.empty()) {
    out.push_back({K::EmptyRun, 0, 0.0, {}});
    return out;
  }
  const double nominal = 1.0 / run.stimulus.sample_rate_hz;
  for (std::size_t i = 1; i < run.samples.size(); ++i) {
    const double dt = run.samples[i].t_s - run.samples[i - 1].t_s;
    if (!(dt > 0.0)) {
      out.push_back({K::NonMonotoneTime, i, dt, {}});
    } else if (std::abs(dt - nominal) > 0.1 * nominal) {
      out.push_back({K::IrregularSampling, i, dt, {}});
    }
  }
  return out;
}

namespace {

ErrorKind headline_kind(const std::vector<RunViolation>& violations) {
  using K = RunViolation::Kind;
  for (const auto& v : violations) {
    switch (v.kind) {
      case K::EmptyRun: return ErrorKind::EmptyRun;
      case K::NonMonotoneTime: return ErrorKind::NonMonotoneTime;
      case K::IrregularSampling: return ErrorKind::IrregularSampling;
      default: break;
    }
  }
  return ErrorKind::InvalidStimulus;
}

std::string join_violations(const std::vector<RunViolation>& violations) {
  std::string text;
  for (const auto& v : violations) {
    if (!text.empty()) text += "; ";
    text += v.describe();
  }
  return text;
}

}  // namespace

InvalidRun::InvalidRun(std::vector<RunViolation> violations)
    : Error(headline_kind(violations), join_violations(violations)),
      violations_(std::move(violations)) {}

const GazeRun& validate_run(const GazeRun& run) {
  auto violations = check_run(run);
  if (!violations.empty()) throw InvalidRun(std::move(violations));
  return run;
}

}  // namespace pursuit
