#pragma once

// On-disk formats.
//
//   <root>/manifest.json                    cohort manifest
//   <root>/<subject>/<session>/run<k>.csv   t_s,gaze_x_deg,gaze_y_deg,valid
//   <root>/<subject>/<session>/run<k>.json  sidecar metadata
//
// Malformed input raises Error(ErrorKind::Parse) naming the file and line.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pursuit/classify.hpp"
#include "pursuit/stats.hpp"
#include "pursuit/synth.hpp"
#include "pursuit/trace.hpp"

namespace pursuit::io {

namespace fs = std::filesystem;

inline constexpr std::string_view kTraceHeader = "t_s,gaze_x_deg,gaze_y_deg,valid";
inline constexpr std::string_view kFeaturesHeader =
    "subject_id,session,run_index,mean_radius_deg,v_gain,skew_radial,skew_phase,kurt_phase,"
    "blink_loss_pct";

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const fs::path& path, std::string_view content);
std::string read_file(const fs::path& path);

std::string trace_csv(const GazeRun& run);
std::vector<GazeSample> parse_trace_csv(std::string_view text, const std::string& source);

nlohmann::json to_json(const StimulusSpec& spec);
StimulusSpec stimulus_from_json(const nlohmann::json& j);
nlohmann::json sidecar_json(const GazeRun& run);
nlohmann::json to_json(const SubjectRecord& s);
SubjectRecord subject_from_json(const nlohmann::json& j);
nlohmann::json to_json(const synth::OculomotorParams& p);
synth::OculomotorParams params_from_json(const nlohmann::json& j);
nlohmann::json generator_params_json(const synth::CohortSpec& cohort, const StimulusSpec& spec);
nlohmann::json manifest_json(const synth::Cohort& cohort, const synth::CohortSpec& spec,
                             const StimulusSpec& stimulus);

fs::path run_stem(const fs::path& root, const GazeRun& run);

// Writes every run plus the manifest; returns the number of trace files.
std::size_t write_cohort(const fs::path& root, const synth::Cohort& cohort,
                         const synth::CohortSpec& spec, const StimulusSpec& stimulus);

GazeRun read_run(const fs::path& csv_path);

// All runs under root, ordered by subject, session, run index.
std::vector<GazeRun> read_trace_tree(const fs::path& root);

std::string features_csv(const std::vector<stats::RunFeatures>& rows);
std::vector<stats::RunFeatures> parse_features_csv(std::string_view text, const std::string& source);

nlohmann::json to_json(const classify::EvalReport& report);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace pursuit::io
