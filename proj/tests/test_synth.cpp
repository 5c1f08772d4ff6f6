#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "pursuit/features.hpp"
#include "pursuit/io.hpp"
#include "pursuit/stats.hpp"
#include "pursuit/synth.hpp"

using namespace pursuit;
using synth::OculomotorParams;

TEST_CASE("noiseless perfect tracker reproduces the target") {
  const StimulusSpec spec;
  const auto run = synth::simulate_run(OculomotorParams{}, spec, 7);
  REQUIRE(run.samples.size() == spec.sample_count());
  for (const auto& s : run.samples) {
    const auto p = target_position(spec, s.t_s);
    CHECK(s.valid);
    CHECK(std::abs(s.x_deg - p.x) < 1e-9);
    CHECK(std::abs(s.y_deg - p.y) < 1e-9);
  }
  const auto mask = mask_blinks(run);
  CHECK(features::v_gain(run, mask) == doctest::Approx(1.0).epsilon(1e-9));
  const auto es = features::decompose_errors(run, mask);
  for (double r : es.radial_err_deg) CHECK(std::abs(r) < 1e-9);
  CHECK(blink_loss_percent(mask) == 0.0);
}

TEST_CASE("reduced pursuit gain shows up in v_gain") {
  OculomotorParams p;
  p.pursuit_gain = 0.8;
  const auto run = synth::simulate_run(p, StimulusSpec{}, 1);
  CHECK(std::abs(features::v_gain(run, mask_blinks(run)) - 0.8) <= 0.01);
}

TEST_CASE("lowering pursuit gain strictly lowers v_gain") {
  double previous = 2.0;
  for (double g : {1.2, 1.0, 0.9, 0.7, 0.5}) {
    OculomotorParams p;
    p.pursuit_gain = g;
    const auto run = synth::simulate_run(p, StimulusSpec{}, 3);
    const double v = features::v_gain(run, mask_blinks(run));
    CHECK(v < previous);
    previous = v;
  }
}

TEST_CASE("lowering pursuit gain lowers v_gain in expectation with noise") {
  auto mean_gain = [](double g) {
    double sum = 0.0;
    for (int s = 0; s < 50; ++s) {
      OculomotorParams p;
      p.pursuit_gain = g;
      p.jitter_sd_deg = 0.2;
      p.radial_noise_sd_deg = 0.3;
      p.radial_noise_corr_time_s = 0.1;
      const auto run = synth::simulate_run(p, StimulusSpec{}, 1000 + s);
      sum += features::v_gain(run, mask_blinks(run));
    }
    return sum / 50.0;
  };
  CHECK(mean_gain(0.85) < mean_gain(0.95));
}

TEST_CASE("blink loss tracks rate times duration") {
  OculomotorParams p;
  p.blink_rate_hz = 0.2;
  p.blink_duration_mean_s = 0.3;
  p.blink_duration_sd_s = 0.05;
  double sum = 0.0;
  for (int s = 0; s < 100; ++s) {
    const auto run = synth::simulate_run(p, StimulusSpec{}, 500 + s);
    sum += blink_loss_percent(mask_blinks(run, 0));
  }
  CHECK(std::abs(sum / 100.0 - 6.0) <= 3.0);
}

TEST_CASE("blink samples are flagged invalid") {
  OculomotorParams p;
  p.blink_rate_hz = 0.5;
  p.blink_duration_mean_s = 0.3;
  const auto run = synth::simulate_run(p, StimulusSpec{}, 11);
  const auto invalid = std::count_if(run.samples.begin(), run.samples.end(),
                                     [](const GazeSample& s) { return !s.valid; });
  CHECK(invalid > 0);
}

TEST_CASE("radial noise has the requested stationary SD") {
  OculomotorParams p;
  p.radial_noise_sd_deg = 0.5;
  p.radial_noise_corr_time_s = 0.05;
  double var_sum = 0.0;
  for (int s = 0; s < 20; ++s) {
    const auto run = synth::simulate_run(p, StimulusSpec{}, 70 + s);
    const auto es = features::decompose_errors(run, mask_blinks(run));
    double m = 0.0, m2 = 0.0;
    for (double r : es.radial_err_deg) m += r;
    m /= es.radial_err_deg.size();
    for (double r : es.radial_err_deg) m2 += (r - m) * (r - m);
    var_sum += m2 / es.radial_err_deg.size();
  }
  CHECK(std::sqrt(var_sum / 20) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("metric vector under radial noise") {
  OculomotorParams p;
  p.radial_noise_sd_deg = 0.5;
  p.radial_noise_corr_time_s = 0.1;
  p.jitter_sd_deg = 0.1;
  double radius = 0.0, gain = 0.0;
  for (int s = 0; s < 50; ++s) {
    const auto m = features::metric_vector(synth::simulate_run(p, StimulusSpec{}, 300 + s));
    radius += m.mean_radius_deg;
    gain += m.v_gain;
  }
  CHECK(std::abs(radius / 50 - 10.0) <= 0.05);
  CHECK(std::abs(gain / 50 - 1.0) <= 0.02);
}

TEST_CASE("different seeds give independent radial noise") {
  OculomotorParams p;
  p.radial_noise_sd_deg = 0.5;
  p.radial_noise_corr_time_s = 0.02;
  const StimulusSpec spec;
  const auto a = features::decompose_errors(synth::simulate_run(p, spec, 1), ValidityMask{std::vector<bool>(1800, true), {}});
  const auto b = features::decompose_errors(synth::simulate_run(p, spec, 2), ValidityMask{std::vector<bool>(1800, true), {}});
  const auto& x = a.radial_err_deg;
  const auto& y = b.radial_err_deg;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.1);
}

TEST_CASE("simulate_run is deterministic per seed") {
  const auto p = synth::default_cohort().sober_population;
  const auto a = synth::simulate_run(p, StimulusSpec{}, 99);
  const auto b = synth::simulate_run(p, StimulusSpec{}, 99);
  const auto c = synth::simulate_run(p, StimulusSpec{}, 100);
  CHECK(io::trace_csv(a) == io::trace_csv(b));
  CHECK(io::trace_csv(a) != io::trace_csv(c));
}

TEST_CASE("invalid parameters are rejected") {
  OculomotorParams p;
  p.pursuit_gain = 1.6;
  CHECK_THROWS_AS(synth::simulate_run(p, StimulusSpec{}, 1), Error);
  p = {};
  p.jitter_sd_deg = -0.1;
  CHECK_FALSE(p.violations().empty());
}

TEST_CASE("default cohort shape") {
  const auto spec = synth::default_cohort();
  CHECK(spec.n_subjects == 19);
  CHECK(spec.runs_per_session == 3);
  const auto cohort = synth::simulate_cohort(spec, StimulusSpec{});
  CHECK(cohort.runs.size() == 114);
  CHECK(cohort.subjects.size() == 19);
  const auto baseline = std::count_if(cohort.runs.begin(), cohort.runs.end(),
                                      [](const GazeRun& r) { return r.session == Session::Baseline; });
  CHECK(baseline == 57);
  std::set<std::string> ids;
  for (const auto& s : cohort.subjects) ids.insert(s.subject_id);
  CHECK(ids.size() == 19);
  CHECK(cohort.subjects.front().subject_id == "01");
  for (const auto& sp : cohort.params) {
    CHECK(sp.sober.violations().empty());
    CHECK(sp.impaired.violations().empty());
  }
}

TEST_CASE("single-subject cohort") {
  auto spec = synth::default_cohort();
  spec.n_subjects = 1;
  CHECK(synth::simulate_cohort(spec, StimulusSpec{}).runs.size() == 6);
  spec.runs_per_session = 1;
  CHECK(synth::simulate_cohort(spec, StimulusSpec{}).runs.size() == 2);
}

TEST_CASE("out-of-range subject draws are clamped and logged") {
  auto spec = synth::default_cohort();
  spec.between_subject_sd.jitter_sd_deg = 5.0;
  const auto cohort = synth::simulate_cohort(spec, StimulusSpec{});
  CHECK_FALSE(cohort.clamp_log.empty());
  for (const auto& sp : cohort.params) CHECK(sp.sober.jitter_sd_deg >= 0.0);
}

TEST_CASE("run seeds are distinct per key") {
  std::set<std::uint64_t> seeds;
  for (int s = 1; s <= 19; ++s)
    for (Session sess : {Session::Baseline, Session::Impaired})
      for (int r = 0; r < 3; ++r) seeds.insert(synth::run_seed(42, synth::subject_label(s, 19), sess, r));
  CHECK(seeds.size() == 114);
  CHECK(synth::subject_label(7, 19) == "07");
  CHECK(synth::subject_label(7, 150) == "007");
}

TEST_CASE("identical-session control replays baseline runs") {
  auto spec = synth::default_cohort();
  spec.n_subjects = 2;
  spec.identical_sessions = true;
  const auto cohort = synth::simulate_cohort(spec, StimulusSpec{});
  CHECK(io::trace_csv(cohort.runs[0]) == io::trace_csv(cohort.runs[3]));
}

// 40 null cohorts of 19 subjects, six metrics each.
TEST_CASE("null cohorts rarely produce large group t statistics") {
  auto spec = synth::default_cohort();
  spec.impaired_shift = {};
  spec.impaired_shift.pursuit_gain = 0.0;
  spec.runs_per_session = 1;
  StimulusSpec stim;
  stim.duration_s = 10.0;
  int within = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    spec.seed = seed;
    const auto cohort = synth::simulate_cohort(spec, stim);
    const auto rows = stats::extract_features(cohort.runs);
    for (const auto& row : stats::stats_table(rows)) {
      if (!row.ok()) continue;
      ++total;
      if (std::abs(row.t_stat) < 2.9) ++within;
    }
  }
  REQUIRE(total > 200);
  CHECK(static_cast<double>(within) / total >= 0.95);
}
