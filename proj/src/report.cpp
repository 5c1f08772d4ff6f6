#include "pursuit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pursuit/features.hpp"
#include "pursuit/io.hpp"
#include "pursuit/preprocess.hpp"
#include "pursuit/svg.hpp"

namespace pursuit::report {

namespace {

constexpr double kRadToDeg = 180.0 / kPi;

// Polylines broken at invalid samples.
std::vector<std::vector<svg::XY>> valid_segments(const GazeRun& run, bool relative_to_target) {
  std::vector<std::vector<svg::XY>> out(1);
  for (const auto& s : run.samples) {
    if (!s.valid) {
      if (!out.back().empty()) out.emplace_back();
      continue;
    }
    svg::XY p{s.x_deg, s.y_deg};
    if (relative_to_target) {
      const auto tp = target_position(run.stimulus, s.t_s);
      p = {s.x_deg - tp.x, s.y_deg - tp.y};
    }
    out.back().push_back(p);
  }
  return out;
}

void collect_errors(std::span<const GazeRun> runs, std::vector<double>& phase_deg,
                    std::vector<double>& radial_deg) {
  for (const auto& run : runs) {
    try {
      const auto es = features::decompose_errors(run, mask_blinks(run));
      for (double v : es.usable_phase()) phase_deg.push_back(v * kRadToDeg);
      for (double v : es.usable_radial()) radial_deg.push_back(v);
    } catch (const Error&) {
      // Degenerate runs contribute nothing to the distributions.
    }
  }
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string trace_figure(std::span<const GazeRun> runs, const std::string& title) {
  svg::Document doc(900, 470);
  doc.text({450, 24}, title, 16);

  double rel = 1.0;
  double lim = 1.0;
  for (const auto& run : runs) {
    lim = std::max(lim, run.stimulus.radius_deg + std::abs(run.stimulus.center_deg.x));
    lim = std::max(lim, run.stimulus.radius_deg + std::abs(run.stimulus.center_deg.y));
    for (const auto& seg : valid_segments(run, true))
      for (const auto& p : seg) rel = std::max({rel, std::abs(p.x), std::abs(p.y)});
    for (const auto& s : run.samples)
      if (s.valid) lim = std::max({lim, std::abs(s.x_deg), std::abs(s.y_deg)});
  }
  rel *= 1.05;
  lim *= 1.05;

  const char* colors[] = {"#1f77b4", "#ff7f0e", "#9467bd"};
  svg::Chart left(doc, 80, 70, 330, 330, -rel, rel, -rel, rel);
  left.frame("Gaze relative to target", "x offset (deg)", "y offset (deg)", 4);
  svg::Chart right(doc, 530, 70, 330, 330, -lim, lim, -lim, lim);
  right.frame("Gaze relative to display center", "x (deg)", "y (deg)", 4);

  if (!runs.empty()) {
    const auto& spec = runs.front().stimulus;
    std::vector<svg::XY> path;
    for (int k = 0; k <= 360; ++k) {
      const double a = kTwoPi * k / 360.0;
      path.push_back({spec.center_deg.x + spec.radius_deg * std::cos(a),
                      spec.center_deg.y + spec.radius_deg * std::sin(a)});
    }
    right.polyline(path, "#d62728", 2.0);
  }
  std::vector<std::pair<std::string, std::string>> legend;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const char* color = colors[r % 3];
    for (const auto& seg : valid_segments(runs[r], true)) left.polyline(seg, color, 0.8, 0.7);
    for (const auto& seg : valid_segments(runs[r], false)) right.polyline(seg, color, 0.8, 0.7);
    legend.emplace_back("run " + std::to_string(runs[r].run_index), color);
  }
  legend.emplace_back("target path", "#d62728");
  right.legend(legend);
  return doc.str();
}

std::string histogram_figure(std::span<const double> pre, std::span<const double> post,
                             const std::string& title, const std::string& x_label, int n_bins) {
  svg::Document doc(640, 440);
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (auto values : {pre, post}) {
    for (double v : values) {
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  if (!any) {
    doc.text({320, 220}, title + ": no usable samples", 14);
    return doc.str();
  }
  std::tie(lo, hi) = svg::padded_range(lo, hi, 0.0);
  const double width = (hi - lo) / n_bins;

  auto density = [&](std::span<const double> values) {
    std::vector<double> frac(static_cast<std::size_t>(n_bins), 0.0);
    if (values.empty()) return frac;
    for (double v : values) {
      auto b = static_cast<std::size_t>((v - lo) / width);
      frac[std::min(b, frac.size() - 1)] += 1.0;
    }
    for (auto& f : frac) f /= static_cast<double>(values.size());
    return frac;
  };
  const auto d_pre = density(pre);
  const auto d_post = density(post);
  const double top = std::max(*std::max_element(d_pre.begin(), d_pre.end()),
                              *std::max_element(d_post.begin(), d_post.end()));

  svg::Chart chart(doc, 80, 50, 520, 320, lo, hi, 0.0, top > 0 ? top * 1.1 : 1.0);
  chart.frame(title, x_label, "fraction of samples");
  auto steps = [&](const std::vector<double>& d) {
    std::vector<svg::XY> pts{{lo, 0.0}};
    for (std::size_t b = 0; b < d.size(); ++b) {
      pts.push_back({lo + width * b, d[b]});
      pts.push_back({lo + width * (b + 1), d[b]});
    }
    pts.push_back({hi, 0.0});
    return pts;
  };
  chart.polyline(steps(d_pre), kPreColor, 2.0);
  chart.polyline(steps(d_post), kPostColor, 2.0);
  chart.legend({{"pre-impairment", kPreColor}, {"post-impairment", kPostColor}});
  return doc.str();
}

std::string paired_points_figure(const stats::SessionMeans& means, const std::string& title,
                                 const std::string& y_label) {
  svg::Document doc(520, 460);
  std::vector<double> all(means.baseline);
  all.insert(all.end(), means.impaired.begin(), means.impaired.end());
  double lo = 0.0, hi = 1.0;
  if (!all.empty()) {
    const auto [mn, mx] = std::minmax_element(all.begin(), all.end());
    std::tie(lo, hi) = svg::padded_range(*mn, *mx, 0.08);
  }
  svg::Chart chart(doc, 90, 50, 380, 330, -0.3, 1.3, lo, hi);
  chart.frame(title, "", y_label);
  const auto base_px = chart.map(0.0, lo);
  const auto imp_px = chart.map(1.0, lo);
  doc.text({base_px.x, base_px.y + 50}, "baseline", 12);
  doc.text({imp_px.x, imp_px.y + 50}, "impaired", 12);
  for (std::size_t i = 0; i < means.subjects.size(); ++i) {
    const bool up = means.impaired[i] > means.baseline[i];
    chart.polyline({{0.0, means.baseline[i]}, {1.0, means.impaired[i]}}, up ? "#888888" : "#bbbbbb",
                   1.2);
    chart.point({0.0, means.baseline[i]}, 3.5, kPreColor);
    chart.point({1.0, means.impaired[i]}, 3.5, kPostColor);
  }
  return doc.str();
}

std::string roc_figure(const std::vector<classify::RocPoint>& curve, double auc,
                       const std::string& title) {
  svg::Document doc(480, 480);
  svg::Chart chart(doc, 80, 50, 360, 360, 0.0, 1.0, 0.0, 1.0);
  chart.frame(title + " (AUC " + fmt3(auc) + ")", "false positive rate", "true positive rate");
  chart.polyline({{0.0, 0.0}, {1.0, 1.0}}, "#bbbbbb", 1.0);
  std::vector<svg::XY> pts;
  for (const auto& p : curve) pts.push_back({p.fpr, p.tpr});
  chart.polyline(pts, "#d62728", 2.0);
  return doc.str();
}

ReportFiles write_report(const std::filesystem::path& out_dir, std::span<const GazeRun> subject_runs,
                         std::span<const stats::RunFeatures> feature_rows, const std::string& subject_id) {
  const bool known = std::any_of(feature_rows.begin(), feature_rows.end(),
                                 [&](const auto& r) { return r.subject_id == subject_id; });
  if (!known || subject_runs.empty())
    throw Error(ErrorKind::UnknownSubject, "subject " + subject_id + " not found");

  ReportFiles files;
  std::ostringstream md;
  md << "# Smooth pursuit report: subject " << subject_id << "\n\n";

  std::vector<GazeRun> pre, post;
  for (const auto& r : subject_runs) (r.session == Session::Baseline ? pre : post).push_back(r);
  const bool all_degenerate = std::none_of(feature_rows.begin(), feature_rows.end(), [&](const auto& r) {
    return r.subject_id == subject_id && r.metrics.has_value();
  });

  auto emit = [&](const std::string& name, const std::string& svg_text) {
    io::write_file_atomic(out_dir / name, svg_text);
    files.svgs.push_back(name);
  };

  md << "## Individual results\n\n";
  if (all_degenerate) {
    const std::string note = "Subject " + subject_id +
                             " is excluded: every run was degenerate, so no traces or error "
                             "distributions are plotted.";
    files.notes.push_back(note);
    md << note << "\n\n";
  } else {
    emit("trace_pre.svg", trace_figure(pre, "Subject " + subject_id + ": pre-impairment eye traces"));
    emit("trace_post.svg", trace_figure(post, "Subject " + subject_id + ": post-impairment eye traces"));
    std::vector<double> pre_phase, pre_radial, post_phase, post_radial;
    collect_errors(pre, pre_phase, pre_radial);
    collect_errors(post, post_phase, post_radial);
    emit("phase_error_hist.svg",
         histogram_figure(pre_phase, post_phase, "Phase error distribution", "phase error (deg)"));
    emit("radial_error_hist.svg",
         histogram_figure(pre_radial, post_radial, "Radial error distribution", "radial error (deg)"));
    md << "![Pre-impairment traces](trace_pre.svg)\n\n"
       << "![Post-impairment traces](trace_post.svg)\n\n"
       << "![Phase error distribution](phase_error_hist.svg)\n\n"
       << "![Radial error distribution](radial_error_hist.svg)\n\n"
       << "Blue: pre-impairment. Green: post-impairment.\n\n";
  }

  md << "## Cohort results (per-subject means)\n\n";
  struct CohortFigure {
    std::size_t metric;
    const char* file;
    const char* title;
    const char* label;
  };
  const CohortFigure cohort_figs[] = {
      {5, "cohort_blink_loss.svg", "Blink loss", "blink loss (%)"},
      {4, "cohort_kurtosis.svg", "Kurtosis of phase error", "excess kurtosis"},
      {3, "cohort_skew.svg", "Skew of phase error", "skewness"},
  };
  for (const auto& f : cohort_figs) {
    const auto means = stats::session_means(feature_rows, f.metric);
    emit(f.file, paired_points_figure(means, f.title, f.label));
    md << "![" << f.title << "](" << f.file << ")\n\n";
  }

  md << "## Paired statistics\n\nDifferences are impaired minus baseline.\n\n";
  const auto table = stats::stats_table(feature_rows);
  md << stats::stats_markdown(table) << "\n";

  io::write_file_atomic(out_dir / "index.md", md.str());
  return files;
}

}  // namespace pursuit::report
