#include "pursuit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "pursuit/classify.hpp"
#include "pursuit/io.hpp"
#include "pursuit/report.hpp"
#include "pursuit/stats.hpp"
#include "pursuit/synth.hpp"

namespace pursuit::cli {

namespace fs = std::filesystem;

namespace {

// Errors caused by the flags themselves rather than by input data.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_usage_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParams:
    case ErrorKind::InvalidStimulus:
    case ErrorKind::InvalidDf:
    case ErrorKind::ZeroEffect:
    case ErrorKind::Unattainable:
      return true;
    default:
      return false;
  }
}

std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value) {
  if (flag->count() > 0) return flag_value;
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  std::uint64_t v = 0;
  const std::string text(env);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer: '" + text + "'");
  return v;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// "key=value" where key is a parameter name, optionally prefixed by
// sober., shift. or sd. (default sober).
void apply_override(synth::CohortSpec& spec, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + text + "'");
  std::string key = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  synth::OculomotorParams* target = &spec.sober_population;
  if (const auto dot = key.find('.'); dot != std::string::npos) {
    const std::string group = key.substr(0, dot);
    if (group == "sober") target = &spec.sober_population;
    else if (group == "shift") target = &spec.impaired_shift;
    else if (group == "sd") target = &spec.between_subject_sd;
    else throw UsageError("unknown parameter group '" + group + "' (sober, shift, sd)");
    key = key.substr(dot + 1);
  }
  for (const auto& f : synth::param_fields()) {
    if (f.name != key) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
      throw UsageError("--param " + key + ": not a number '" + value + "'");
    target->*(f.member) = v;
    return;
  }
  throw UsageError("unknown parameter '" + key + "'");
}

std::vector<stats::RunFeatures> load_features(const fs::path& path) {
  return io::parse_features_csv(io::read_file(path), path.string());
}

// ---- simulate ----

struct SimulateArgs {
  int subjects = 19;
  int runs = 3;
  std::uint64_t seed = kDefaultSeed;
  CLI::Option* seed_opt = nullptr;
  fs::path out;
  std::vector<std::string> params;
  bool identical = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  auto spec = synth::default_cohort();
  spec.n_subjects = a.subjects;
  spec.runs_per_session = a.runs;
  spec.seed = resolve_seed(a.seed_opt, a.seed);
  spec.identical_sessions = a.identical;
  for (const auto& p : a.params) apply_override(spec, p);
  if (auto v = spec.violations(); !v.empty()) throw Error(ErrorKind::InvalidParams, v.front());

  const StimulusSpec stimulus;
  const auto cohort = synth::simulate_cohort(spec, stimulus);
  for (const auto& line : cohort.clamp_log) err << "note: " << line << "\n";
  const auto n = io::write_cohort(a.out, cohort, spec, stimulus);
  out << "wrote " << n << " runs (" << spec.n_subjects << " subjects x " << spec.runs_per_session
      << " runs x 2 sessions, seed " << spec.seed << ") to " << a.out.string() << "\n";
  return kOk;
}

// ---- features ----

struct FeaturesArgs {
  fs::path in;
  fs::path out;
  int pad = kDefaultBlinkPad;
};

int cmd_features(const FeaturesArgs& a, std::ostream& out, std::ostream& err) {
  if (a.pad < 0) throw UsageError("--pad must be >= 0");
  const auto runs = io::read_trace_tree(a.in);
  if (runs.empty()) throw Error(ErrorKind::EmptyRun, "no runs found under " + a.in.string());
  for (const auto& run : runs) {
    try {
      validate_run(run);
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, (io::run_stem(a.in, run).string() + ".csv: ") + e.what());
    }
  }
  const auto rows = stats::extract_features(runs, a.pad);
  std::size_t degenerate = 0;
  for (const auto& r : rows) {
    if (r.metrics) continue;
    ++degenerate;
    err << "note: subject " << r.subject_id << " " << to_string(r.session) << " run " << r.run_index
        << " excluded: " << r.error << "\n";
  }
  io::write_file_atomic(a.out, io::features_csv(rows));
  out << "wrote " << rows.size() << " rows (" << degenerate << " degenerate) to " << a.out.string()
      << "\n";
  return kOk;
}

// ---- stats ----

struct StatsArgs {
  fs::path features;
  fs::path out;
};

int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
  const auto rows = load_features(a.features);
  const auto table = stats::stats_table(rows);
  for (const auto& r : table)
    if (!r.ok()) err << "note: " << r.metric << ": " << r.error << "\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    io::write_file_atomic(a.out / "stats.tsv", stats::stats_tsv(table));
    io::write_file_atomic(a.out / "stats.md", stats::stats_markdown(table));
  }
  out << stats::stats_markdown(table);
  return kOk;
}

// ---- power ----

struct PowerArgs {
  double d = 0.0;
  double alpha = 0.05;
  double power = 0.8;
  std::string sided = "two";
  bool verify = false;
  int sims = 100000;
  std::uint64_t seed = kDefaultSeed;
  CLI::Option* seed_opt = nullptr;
};

int cmd_power(const PowerArgs& a, std::ostream& out, std::ostream&) {
  const auto sided = stats::parse_sided(a.sided);
  const double n = stats::required_n(a.d, a.alpha, a.power, sided);
  out << "required_n = " << io::format_double(n) << " (d=" << io::format_double(a.d)
      << ", alpha=" << io::format_double(a.alpha) << ", power=" << io::format_double(a.power)
      << ", " << a.sided << "-sided)\n";
  if (a.verify) {
    const int n_int = static_cast<int>(std::ceil(n - 1e-9));
    const double mc = stats::mc_power(a.d, n_int, a.alpha, sided, a.sims, resolve_seed(a.seed_opt, a.seed));
    // Three binomial standard errors.
    const double tol = 3.0 * std::sqrt(a.power * (1.0 - a.power) / a.sims);
    const bool agrees = mc >= a.power - tol;
    out << "mc_power(n=" << n_int << ", sims=" << a.sims << ") = " << fixed(mc, 4) << ": "
        << (agrees ? "agrees with" : "DISAGREES with") << " target power " << io::format_double(a.power)
        << " (tolerance " << fixed(tol, 4) << ")\n";
  }
  return kOk;
}

// ---- train-eval ----

struct TrainEvalArgs {
  fs::path features;
  fs::path out;
  int splits = 200;
  double c = 1.0;
  std::uint64_t seed = kDefaultSeed;
  CLI::Option* seed_opt = nullptr;
};

int cmd_train_eval(const TrainEvalArgs& a, std::ostream& out, std::ostream& err) {
  if (a.splits < 1) throw UsageError("--splits must be >= 1");
  if (!(a.c > 0.0)) throw UsageError("--c must be > 0");
  const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed);
  const auto rows = load_features(a.features);
  const auto reports = classify::evaluate_modes(rows, a.splits, a.c, seed);
  fs::create_directories(a.out);
  for (const auto& rep : reports) {
    const std::string mode(classify::to_string(rep.mode));
    for (const auto& line : rep.log) err << "note: " << mode << ": " << line << "\n";
    io::write_file_atomic(a.out / ("eval_" + mode + ".json"), io::to_json(rep).dump(2) + "\n");

    // ROC of the split whose AUC is closest to the median.
    std::size_t pick = 0;
    for (std::size_t k = 1; k < rep.per_split.size(); ++k) {
      if (std::abs(rep.per_split[k].auc - rep.median_auc) <
          std::abs(rep.per_split[pick].auc - rep.median_auc))
        pick = k;
    }
    const auto scored = classify::score_split(rows, rep.mode, static_cast<int>(pick), a.c, seed);
    const auto curve = classify::roc_curve(scored.scores, scored.labels);
    const double auc = classify::roc_auc(scored.scores, scored.labels);
    io::write_file_atomic(a.out / ("roc_" + mode + ".svg"),
                          report::roc_figure(curve, auc, "ROC, " + mode + " features, split " +
                                                             std::to_string(pick)));
    out << mode << ": median AUC " << fixed(rep.median_auc, 3) << ", best AUC "
        << fixed(rep.best_auc, 3) << ", median accuracy " << fixed(rep.median_accuracy, 3) << " over "
        << rep.n_splits << " splits\n";
  }
  return kOk;
}

// ---- report ----

struct ReportArgs {
  fs::path traces;
  fs::path features;
  std::string subject = "01";
  fs::path out;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream&) {
  const auto rows = load_features(a.features);
  auto runs = io::read_trace_tree(a.traces);
  std::erase_if(runs, [&](const GazeRun& r) { return r.subject_id != a.subject; });
  fs::create_directories(a.out);
  const auto files = report::write_report(a.out, runs, rows, a.subject);
  for (const auto& note : files.notes) out << "note: " << note << "\n";
  out << "wrote " << files.svgs.size() << " figures and index.md to " << a.out.string() << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smooth pursuit impairment analysis toolkit", "pursuit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pursuit 1.0.0");
  const std::string seed_help = "RNG seed (default: $" + std::string(kSeedEnv) + " or 42)";

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate a synthetic cohort of gaze traces");
  s->add_option("--subjects", sim.subjects, "Number of subjects")->capture_default_str();
  s->add_option("--runs", sim.runs, "Runs per session (1-3)")->capture_default_str();
  sim.seed_opt = s->add_option("--seed", sim.seed, seed_help);
  s->add_option("--out", sim.out, "Output directory")->required();
  s->add_option("--param", sim.params,
                "Generator override [sober.|shift.|sd.]name=value (repeatable)");
  s->add_flag("--identical-sessions", sim.identical,
              "Impaired runs replay the baseline runs (control cohort)");

  FeaturesArgs feat;
  auto* f = app.add_subcommand("features", "Extract per-run metrics from a trace directory");
  f->add_option("--in", feat.in, "Trace directory")->required();
  f->add_option("--out", feat.out, "Features CSV to write")->required();
  f->add_option("--pad", feat.pad, "Blink padding in samples")->capture_default_str();

  StatsArgs st;
  auto* t = app.add_subcommand("stats", "Paired t-test table over per-subject means");
  t->add_option("--features", st.features, "Features CSV")->required();
  t->add_option("--out", st.out, "Directory for stats.tsv and stats.md");

  PowerArgs pw;
  auto* p = app.add_subcommand("power", "Sample size for a paired t-test");
  p->add_option("--d", pw.d, "Effect size (Cohen's d)")->required();
  p->add_option("--alpha", pw.alpha, "Significance level")->capture_default_str();
  p->add_option("--power", pw.power, "Target power")->capture_default_str();
  p->add_option("--sided", pw.sided, "one or two")
      ->check(CLI::IsMember({"one", "two"}))
      ->capture_default_str();
  p->add_flag("--verify", pw.verify, "Cross-check with Monte Carlo power");
  p->add_option("--sims", pw.sims, "Monte Carlo simulations")->capture_default_str();
  pw.seed_opt = p->add_option("--seed", pw.seed, seed_help);

  TrainEvalArgs te;
  auto* e = app.add_subcommand("train-eval", "Linear SVM over repeated 50/50 splits, raw and normalized");
  e->add_option("--features", te.features, "Features CSV")->required();
  e->add_option("--out", te.out, "Output directory")->required();
  e->add_option("--splits", te.splits, "Number of random splits")->capture_default_str();
  e->add_option("--c", te.c, "SVM regularization C")->capture_default_str();
  te.seed_opt = e->add_option("--seed", te.seed, seed_help);

  ReportArgs rp;
  auto* r = app.add_subcommand("report", "Figures and markdown for one subject and the cohort");
  r->add_option("--traces", rp.traces, "Trace directory")->required();
  r->add_option("--features", rp.features, "Features CSV")->required();
  r->add_option("--subject", rp.subject, "Subject identifier")->capture_default_str();
  r->add_option("--out", rp.out, "Report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim, out, err);
    if (f->parsed()) return cmd_features(feat, out, err);
    if (t->parsed()) return cmd_stats(st, out, err);
    if (p->parsed()) return cmd_power(pw, out, err);
    if (e->parsed()) return cmd_train_eval(te, out, err);
    if (r->parsed()) return cmd_report(rp, out, err);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return is_usage_kind(ex.kind()) ? kUsage : kData;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace pursuit::cli
