#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "pursuit/classify.hpp"
#include "pursuit/trace.hpp"

namespace testutil {

// Gaze position as a function of time; valid unless the callback says otherwise.
struct GazeAt {
  double x = 0.0;
  double y = 0.0;
  bool valid = true;
};

inline pursuit::GazeRun make_run(const pursuit::StimulusSpec& spec,
                                 const std::function<GazeAt(double)>& gaze) {
  pursuit::GazeRun run;
  run.subject_id = "01";
  run.stimulus = spec;
  const std::size_t n = spec.sample_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.sample_rate_hz;
    const auto g = gaze(t);
    run.samples.push_back({t, g.x, g.y, g.valid});
  }
  return run;
}

// Gaze on a circle of the given radius, angle scaled by gain about t = 0.
inline pursuit::GazeRun circling_run(const pursuit::StimulusSpec& spec, double gain, double radius) {
  return make_run(spec, [&](double t) {
    const double a = gain * pursuit::target_angle(spec, t);
    return GazeAt{spec.center_deg.x + radius * std::cos(a), spec.center_deg.y + radius * std::sin(a)};
  });
}

inline pursuit::GazeRun perfect_run(const pursuit::StimulusSpec& spec) {
  return make_run(spec, [&](double t) {
    const auto p = pursuit::target_position(spec, t);
    return GazeAt{p.x, p.y};
  });
}

// Twenty fixed, overlapping 2-D points in the first two feature columns.
inline std::vector<pursuit::classify::Observation> svm_toy_set() {
  using pursuit::classify::Label;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<pursuit::classify::Observation> out;
  for (int i = 0; i < 20; ++i) {
    const bool pos = i % 2 == 1;
    pursuit::classify::FeatureRow f{};
    f[0] = n(rng) + (pos ? 1.0 : -1.0);
    f[1] = n(rng) + (pos ? 0.5 : -0.5);
    out.push_back({"toy", pos ? Label::Impaired : Label::Baseline, f});
  }
  return out;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("pursuit_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
