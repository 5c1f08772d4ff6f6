#include "pursuit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <tuple>

namespace pursuit::io {

namespace {

using nlohmann::json;

std::string fixed6(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  if (ec != std::errc{}) return "nan";
  std::string s(buf, end);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view field, const std::string& source, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || field.empty() || !std::isfinite(v))
    parse_fail(source, line_no, "invalid number '" + std::string(field) + "'");
  return v;
}

int parse_int(std::string_view field, const std::string& source, std::size_t line_no) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
    parse_fail(source, line_no, "invalid integer '" + std::string(field) + "'");
  return v;
}

// Splits text into lines, tolerating CRLF and a missing final newline.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename into " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string trace_csv(const GazeRun& run) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& s : run.samples) {
    out += fixed6(s.t_s);
    out += ',';
    out += fixed6(s.x_deg);
    out += ',';
    out += fixed6(s.y_deg);
    out += s.valid ? ",1\n" : ",0\n";
  }
  return out;
}

std::vector<GazeSample> parse_trace_csv(std::string_view text, const std::string& source) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kTraceHeader)
    parse_fail(source, 1, "expected header '" + std::string(kTraceHeader) + "'");
  std::vector<GazeSample> samples;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_fields(lines[i]);
    const std::size_t line_no = i + 1;
    if (f.size() != 4) parse_fail(source, line_no, "expected 4 fields, got " + std::to_string(f.size()));
    GazeSample s;
    s.t_s = parse_double(f[0], source, line_no);
    s.x_deg = parse_double(f[1], source, line_no);
    s.y_deg = parse_double(f[2], source, line_no);
    if (f[3] == "1") {
      s.valid = true;
    } else if (f[3] == "0") {
      s.valid = false;
    } else {
      parse_fail(source, line_no, "valid must be 0 or 1");
    }
    samples.push_back(s);
  }
  return samples;
}

json to_json(const StimulusSpec& spec) {
  return {{"frequency_hz", spec.frequency_hz},
          {"radius_deg", spec.radius_deg},
          {"center_deg", {spec.center_deg.x, spec.center_deg.y}},
          {"direction", std::string(to_string(spec.direction))},
          {"duration_s", spec.duration_s},
          {"sample_rate_hz", spec.sample_rate_hz}};
}

StimulusSpec stimulus_from_json(const json& j) {
  StimulusSpec s;
  s.frequency_hz = j.at("frequency_hz").get<double>();
  s.radius_deg = j.at("radius_deg").get<double>();
  const auto& c = j.at("center_deg");
  if (!c.is_array() || c.size() != 2) throw Error(ErrorKind::Parse, "center_deg must have two elements");
  s.center_deg = {c[0].get<double>(), c[1].get<double>()};
  s.direction = parse_direction(j.at("direction").get<std::string>());
  s.duration_s = j.at("duration_s").get<double>();
  s.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  return s;
}

json sidecar_json(const GazeRun& run) {
  return {{"subject_id", run.subject_id},
          {"session", std::string(to_string(run.session))},
          {"run_index", run.run_index},
          {"stimulus", to_json(run.stimulus)}};
}

json to_json(const SubjectRecord& s) {
  json j;
  j["subject_id"] = s.subject_id;
  put_optional(j, "sex", s.sex);
  put_optional(j, "vision_correction", s.vision_correction);
  put_optional(j, "adhd", s.adhd);
  put_optional(j, "use_cadence", s.use_cadence);
  put_optional(j, "last_use_days", s.last_use_days);
  put_optional(j, "notes", s.notes);
  return j;
}

SubjectRecord subject_from_json(const json& j) {
  SubjectRecord s;
  s.subject_id = j.at("subject_id").get<std::string>();
  s.sex = get_optional<std::string>(j, "sex");
  s.vision_correction = get_optional<std::string>(j, "vision_correction");
  s.adhd = get_optional<bool>(j, "adhd");
  s.use_cadence = get_optional<std::string>(j, "use_cadence");
  s.last_use_days = get_optional<int>(j, "last_use_days");
  s.notes = get_optional<std::string>(j, "notes");
  return s;
}

json to_json(const synth::OculomotorParams& p) {
  json j = json::object();
  for (const auto& f : synth::param_fields()) j[std::string(f.name)] = p.*(f.member);
  return j;
}

synth::OculomotorParams params_from_json(const json& j) {
  synth::OculomotorParams p;
  for (const auto& f : synth::param_fields()) {
    const std::string key(f.name);
    if (j.contains(key)) p.*(f.member) = j.at(key).get<double>();
  }
  return p;
}

json generator_params_json(const synth::CohortSpec& cohort, const StimulusSpec& spec) {
  return {{"n_subjects", cohort.n_subjects},
          {"runs_per_session", cohort.runs_per_session},
          {"sober_population", to_json(cohort.sober_population)},
          {"impaired_shift", to_json(cohort.impaired_shift)},
          {"between_subject_sd", to_json(cohort.between_subject_sd)},
          {"identical_sessions", cohort.identical_sessions},
          {"stimulus", to_json(spec)}};
}

json manifest_json(const synth::Cohort& cohort, const synth::CohortSpec& spec,
                   const StimulusSpec& stimulus) {
  json subjects = json::array();
  for (const auto& s : cohort.subjects) subjects.push_back(to_json(s));
  return {{"subjects", subjects},
          {"seed", spec.seed},
          {"generator_params", generator_params_json(spec, stimulus)}};
}

fs::path run_stem(const fs::path& root, const GazeRun& run) {
  return root / run.subject_id / std::string(to_string(run.session)) /
         ("run" + std::to_string(run.run_index));
}

std::size_t write_cohort(const fs::path& root, const synth::Cohort& cohort,
                         const synth::CohortSpec& spec, const StimulusSpec& stimulus) {
  std::size_t files = 0;
  for (const auto& run : cohort.runs) {
    const auto stem = run_stem(root, run);
    write_file_atomic(fs::path(stem).concat(".csv"), trace_csv(run));
    write_file_atomic(fs::path(stem).concat(".json"), sidecar_json(run).dump(2) + "\n");
    ++files;
  }
  write_file_atomic(root / "manifest.json", manifest_json(cohort, spec, stimulus).dump(2) + "\n");
  return files;
}

GazeRun read_run(const fs::path& csv_path) {
  auto sidecar_path = csv_path;
  sidecar_path.replace_extension(".json");
  GazeRun run;
  json meta;
  try {
    meta = json::parse(read_file(sidecar_path));
    run.subject_id = meta.at("subject_id").get<std::string>();
    run.session = parse_session(meta.at("session").get<std::string>());
    run.run_index = meta.at("run_index").get<int>();
    run.stimulus = stimulus_from_json(meta.at("stimulus"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, sidecar_path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(ErrorKind::Parse, sidecar_path.string() + ": " + e.what());
  }
  run.samples = parse_trace_csv(read_file(csv_path), csv_path.string());
  return run;
}

std::vector<GazeRun> read_trace_tree(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorKind::Io, "not a directory: " + root.string());
  std::vector<fs::path> csvs;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") csvs.push_back(entry.path());
  }
  std::vector<GazeRun> runs;
  for (const auto& p : csvs) runs.push_back(read_run(p));
  std::sort(runs.begin(), runs.end(), [](const GazeRun& a, const GazeRun& b) {
    return std::tie(a.subject_id, a.session, a.run_index) < std::tie(b.subject_id, b.session, b.run_index);
  });
  return runs;
}

std::string features_csv(const std::vector<stats::RunFeatures>& rows) {
  const bool any_error = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.metrics; });
  std::string out(kFeaturesHeader);
  if (any_error) out += ",error";
  out += '\n';
  for (const auto& r : rows) {
    out += r.subject_id + "," + std::string(to_string(r.session)) + "," + std::to_string(r.run_index);
    for (std::size_t m = 0; m < features::kMetricNames.size(); ++m) {
      out += ',';
      if (r.metrics) out += format_double(features::metric_value(*r.metrics, m));
    }
    if (any_error) {
      std::string note = r.error;
      std::replace(note.begin(), note.end(), ',', ';');
      std::replace(note.begin(), note.end(), '\n', ' ');
      out += "," + note;
    }
    out += '\n';
  }
  return out;
}

std::vector<stats::RunFeatures> parse_features_csv(std::string_view text, const std::string& source) {
  const auto lines = lines_of(text);
  const std::string with_error = std::string(kFeaturesHeader) + ",error";
  if (lines.empty() || (lines[0] != kFeaturesHeader && lines[0] != with_error))
    parse_fail(source, 1, "unexpected features header");
  const std::size_t n_fields = lines[0] == kFeaturesHeader ? 9 : 10;
  std::vector<stats::RunFeatures> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t line_no = i + 1;
    const auto f = split_fields(lines[i]);
    if (f.size() != n_fields)
      parse_fail(source, line_no, "expected " + std::to_string(n_fields) + " fields");
    stats::RunFeatures r;
    r.subject_id = std::string(f[0]);
    try {
      r.session = parse_session(f[1]);
    } catch (const Error&) {
      parse_fail(source, line_no, "invalid session '" + std::string(f[1]) + "'");
    }
    r.run_index = parse_int(f[2], source, line_no);
    if (n_fields == 10) r.error = std::string(f[9]);
    const bool blank = std::all_of(f.begin() + 3, f.begin() + 9, [](auto s) { return s.empty(); });
    if (!blank) {
      features::MetricVector m;
      m.mean_radius_deg = parse_double(f[3], source, line_no);
      m.v_gain = parse_double(f[4], source, line_no);
      m.skew_radial = parse_double(f[5], source, line_no);
      m.skew_phase = parse_double(f[6], source, line_no);
      m.kurt_phase = parse_double(f[7], source, line_no);
      m.blink_loss_pct = parse_double(f[8], source, line_no);
      r.metrics = m;
    } else if (r.error.empty()) {
      parse_fail(source, line_no, "row has no metrics and no error note");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

json to_json(const classify::EvalReport& report) {
  json per_split = json::array();
  for (const auto& s : report.per_split) per_split.push_back({{"accuracy", s.accuracy}, {"auc", s.auc}});
  return {{"mode", std::string(classify::to_string(report.mode))},
          {"n_splits", report.n_splits},
          {"median_auc", report.median_auc},
          {"best_auc", report.best_auc},
          {"median_accuracy", report.median_accuracy},
          {"per_split", per_split}};
}

}  // namespace pursuit::io
