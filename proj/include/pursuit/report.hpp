#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pursuit/classify.hpp"
#include "pursuit/stats.hpp"
#include "pursuit/trace.hpp"

namespace pursuit::report {

inline constexpr const char* kPreColor = "#1f77b4";   // blue: before impairment
inline constexpr const char* kPostColor = "#2ca02c";  // green: after impairment

// Gaze relative to the moving target (left) and to the display center with
// the target path (right), all runs of one session overlaid.
std::string trace_figure(std::span<const GazeRun> runs, const std::string& title);

// Overlaid normalized histograms of pre and post values.
std::string histogram_figure(std::span<const double> pre, std::span<const double> post,
                             const std::string& title, const std::string& x_label, int n_bins = 40);

// Per-subject baseline vs impaired means joined by a segment.
std::string paired_points_figure(const stats::SessionMeans& means, const std::string& title,
                                 const std::string& y_label);

std::string roc_figure(const std::vector<classify::RocPoint>& curve, double auc,
                       const std::string& title);

struct ReportFiles {
  std::vector<std::string> svgs;  // file names relative to the report directory
  std::vector<std::string> notes;
};

// Writes the subject's trace and error-distribution figures, the cohort
// paired-point figures and index.md into out_dir. Throws UnknownSubject if
// the subject does not appear in the features table.
ReportFiles write_report(const std::filesystem::path& out_dir, std::span<const GazeRun> subject_runs,
                         std::span<const stats::RunFeatures> features, const std::string& subject_id);

}  // namespace pursuit::report
