#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pursuit/classify.hpp"
#include "pursuit/cli.hpp"
#include "pursuit/error.hpp"
#include "pursuit/features.hpp"
#include "pursuit/report.hpp"
#include "pursuit/stats.hpp"
#include "pursuit/synth.hpp"

namespace py = pybind11;
using namespace pursuit;

namespace {

synth::OculomotorParams params_from_dict(const py::dict& d) {
  synth::OculomotorParams p;
  for (auto [key, value] : d) {
    const auto name = key.cast<std::string>();
    bool found = false;
    for (const auto& f : synth::param_fields()) {
      if (f.name == name) {
        p.*f.member = value.cast<double>();
        found = true;
      }
    }
    if (!found) throw Error(ErrorKind::InvalidParams, "unknown parameter '" + name + "'");
  }
  return p;
}

py::dict run_to_dict(const GazeRun& run) {
  std::vector<double> t, x, y;
  std::vector<bool> valid;
  for (const auto& s : run.samples) {
    t.push_back(s.t_s);
    x.push_back(s.x_deg);
    y.push_back(s.y_deg);
    valid.push_back(s.valid);
  }
  py::dict d;
  d["subject_id"] = run.subject_id;
  d["session"] = std::string(to_string(run.session));
  d["run_index"] = run.run_index;
  d["t_s"] = t;
  d["x_deg"] = x;
  d["y_deg"] = y;
  d["valid"] = valid;
  return d;
}

py::dict metrics_to_dict(const features::MetricVector& m) {
  py::dict d;
  d["mean_radius_deg"] = m.mean_radius_deg;
  d["v_gain"] = m.v_gain;
  d["skew_radial"] = m.skew_radial;
  d["skew_phase"] = m.skew_phase;
  d["kurt_phase"] = m.kurt_phase;
  d["blink_loss_pct"] = m.blink_loss_pct;
  return d;
}

std::vector<stats::RunFeatures> cohort_features(int n_subjects, int runs, std::uint64_t seed) {
  auto spec = synth::default_cohort();
  spec.n_subjects = n_subjects;
  spec.runs_per_session = runs;
  spec.seed = seed;
  const auto cohort = synth::simulate_cohort(spec, StimulusSpec{});
  return stats::extract_features(cohort.runs);
}

py::dict eval_to_dict(const classify::EvalReport& r) {
  std::vector<double> aucs, accs;
  for (const auto& s : r.per_split) {
    aucs.push_back(s.auc);
    accs.push_back(s.accuracy);
  }
  py::dict d;
  d["mode"] = std::string(classify::to_string(r.mode));
  d["n_splits"] = r.n_splits;
  d["median_auc"] = r.median_auc;
  d["best_auc"] = r.best_auc;
  d["median_accuracy"] = r.median_accuracy;
  d["auc"] = aucs;
  d["accuracy"] = accs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Smooth-pursuit gaze metrics, statistics and classification";
  py::register_exception<Error>(m, "PursuitError", PyExc_ValueError);

  m.def("t_cdf", &stats::t_cdf, py::arg("t"), py::arg("df"));
  m.def("t_quantile", &stats::t_quantile, py::arg("p"), py::arg("df"));
  m.def("two_tailed_p", &stats::two_tailed_p, py::arg("t"), py::arg("df"));
  m.def("noncentral_t_cdf", &stats::noncentral_t_cdf, py::arg("t"), py::arg("df"), py::arg("delta"));

  m.def(
      "paired_t",
      [](const std::vector<double>& baseline, const std::vector<double>& impaired) {
        const auto r = stats::paired_t(baseline, impaired);
        return py::dict(py::arg("t") = r.t, py::arg("df") = r.df, py::arg("p") = r.p_two_tailed);
      },
      py::arg("baseline"), py::arg("impaired"));
  m.def(
      "cohens_d",
      [](const std::vector<double>& baseline, const std::vector<double>& impaired) {
        const auto r = stats::cohens_d(baseline, impaired);
        return py::dict(py::arg("dz") = r.dz, py::arg("d_pooled") = r.d_pooled);
      },
      py::arg("baseline"), py::arg("impaired"));
  m.def(
      "required_n",
      [](double d, double alpha, double power, const std::string& sided) {
        return stats::required_n(d, alpha, power, stats::parse_sided(sided));
      },
      py::arg("d"), py::arg("alpha") = 0.05, py::arg("power") = 0.8, py::arg("sided") = "two");
  m.def(
      "mc_power",
      [](double d, int n, double alpha, const std::string& sided, int n_sims, std::uint64_t seed) {
        return stats::mc_power(d, n, alpha, stats::parse_sided(sided), n_sims, seed);
      },
      py::arg("d"), py::arg("n"), py::arg("alpha") = 0.05, py::arg("sided") = "two",
      py::arg("n_sims") = 100000, py::arg("seed") = cli::kDefaultSeed);

  m.def("wrap_angle", &features::wrap_angle, py::arg("radians"));
  m.def(
      "skewness", [](const std::vector<double>& xs) { return features::sample_skewness(xs); }, py::arg("xs"));
  m.def(
      "excess_kurtosis", [](const std::vector<double>& xs) { return features::excess_kurtosis(xs); },
      py::arg("xs"));
  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        std::vector<classify::Label> ls;
        for (int l : labels) ls.push_back(l ? classify::Label::Impaired : classify::Label::Baseline);
        return classify::roc_auc(scores, ls);
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "simulate_run",
      [](const py::dict& params, std::uint64_t seed) {
        return run_to_dict(synth::simulate_run(params_from_dict(params), StimulusSpec{}, seed));
      },
      py::arg("params") = py::dict(), py::arg("seed") = cli::kDefaultSeed);
  m.def(
      "run_metrics",
      [](const py::dict& params, std::uint64_t seed) {
        return metrics_to_dict(
            features::metric_vector(synth::simulate_run(params_from_dict(params), StimulusSpec{}, seed)));
      },
      py::arg("params") = py::dict(), py::arg("seed") = cli::kDefaultSeed);

  m.def(
      "cohort_stats",
      [](int n_subjects, int runs, std::uint64_t seed) {
        const auto rows = stats::stats_table(cohort_features(n_subjects, runs, seed));
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["metric"] = r.metric;
          d["n"] = r.n_subjects;
          d["t"] = r.t_stat;
          d["df"] = r.df;
          d["p"] = r.p_value;
          d["dz"] = r.cohen_dz;
          d["d_pooled"] = r.cohen_d_pooled;
          d["n_req_one_sided"] = r.n_req_one_sided;
          d["n_req_two_sided"] = r.n_req_two_sided;
          d["error"] = r.error;
          out.append(d);
        }
        return out;
      },
      py::arg("n_subjects") = 19, py::arg("runs") = 3, py::arg("seed") = cli::kDefaultSeed);
  m.def(
      "evaluate",
      [](int n_subjects, int runs, int n_splits, double c, std::uint64_t seed) {
        const auto rows = cohort_features(n_subjects, runs, seed);
        const auto both = classify::evaluate_modes(rows, n_splits, c, seed);
        return py::dict(py::arg("raw") = eval_to_dict(both[0]), py::arg("normalized") = eval_to_dict(both[1]));
      },
      py::arg("n_subjects") = 19, py::arg("runs") = 3, py::arg("n_splits") = 200, py::arg("c") = 1.0,
      py::arg("seed") = cli::kDefaultSeed);
  m.def(
      "roc_svg",
      [](const std::vector<double>& scores, const std::vector<int>& labels, const std::string& title) {
        std::vector<classify::Label> ls;
        for (int l : labels) ls.push_back(l ? classify::Label::Impaired : classify::Label::Baseline);
        return report::roc_figure(classify::roc_curve(scores, ls), classify::roc_auc(scores, ls), title);
      },
      py::arg("scores"), py::arg("labels"), py::arg("title") = "ROC");

  // Runs the command-line tool in-process; returns (exit code, stdout, stderr).
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"pursuit"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
