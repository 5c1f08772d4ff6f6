#pragma once

// Core data model for circular smooth-pursuit recordings.
//
// Coordinates are visual degrees, y-up, origin at the display center. The
// target starts at 3 o'clock (angle 0) and moves at a constant angular speed.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pursuit/error.hpp"

namespace pursuit {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class Direction { Clockwise, Counterclockwise };
enum class Session { Baseline, Impaired };

std::string_view to_string(Direction d);
std::string_view to_string(Session s);
Direction parse_direction(std::string_view text);
Session parse_session(std::string_view text);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct StimulusSpec {
  double frequency_hz = 0.4;
  double radius_deg = 10.0;
  Point center_deg{};
  Direction direction = Direction::Clockwise;
  double duration_s = 30.0;
  double sample_rate_hz = 60.0;

  // -1 for clockwise, +1 for counterclockwise.
  double sign() const { return direction == Direction::Clockwise ? -1.0 : 1.0; }
  double angular_speed() const { return kTwoPi * frequency_hz; }
  double sample_period() const { return 1.0 / sample_rate_hz; }
  std::size_t sample_count() const;

  // Empty when all invariants hold.
  std::vector<std::string> violations() const;
};

// Unwrapped target angle at time t (radians).
double target_angle(const StimulusSpec& spec, double t);
Point target_position(const StimulusSpec& spec, double t);

struct GazeSample {
  double t_s = 0.0;
  double x_deg = 0.0;
  double y_deg = 0.0;
  bool valid = true;
};

struct GazeRun {
  std::string subject_id;
  Session session = Session::Baseline;
  int run_index = 0;
  StimulusSpec stimulus;
  std::vector<GazeSample> samples;
};

struct SubjectRecord {
  std::string subject_id;
  std::optional<std::string> sex;
  std::optional<std::string> vision_correction;
  std::optional<bool> adhd;
  std::optional<std::string> use_cadence;
  std::optional<int> last_use_days;
  std::optional<std::string> notes;
};

struct RunViolation {
  enum class Kind { EmptyRun, NonMonotoneTime, IrregularSampling, BadRunIndex, InvalidStimulus };
  Kind kind;
  std::size_t index = 0;
  double observed_dt = 0.0;
  std::string detail;

  std::string describe() const;
};

// Lists every violated GazeRun invariant; empty for a well-formed run.
std::vector<RunViolation> check_run(const GazeRun& run);

// Returns the run unchanged, or throws InvalidRun carrying every violation.
const GazeRun& validate_run(const GazeRun& run);

class InvalidRun : public Error {
 public:
  explicit InvalidRun(std::vector<RunViolation> violations);
  const std::vector<RunViolation>& violations() const noexcept { return violations_; }

 private:
  std::vector<RunViolation> violations_;
};

}  // namespace pursuit
