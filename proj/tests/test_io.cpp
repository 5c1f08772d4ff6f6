#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "pursuit/io.hpp"
#include "pursuit/synth.hpp"

using namespace pursuit;
namespace fs = std::filesystem;

namespace {

synth::CohortSpec small_cohort() {
  auto spec = synth::default_cohort();
  spec.n_subjects = 2;
  spec.runs_per_session = 2;
  return spec;
}

}  // namespace

TEST_CASE("trace csv round trip") {
  auto run = synth::simulate_run(synth::default_cohort().sober_population, StimulusSpec{}, 3);
  const auto text = io::trace_csv(run);
  CHECK(text.rfind("t_s,gaze_x_deg,gaze_y_deg,valid\n", 0) == 0);
  const auto back = io::parse_trace_csv(text, "mem");
  REQUIRE(back.size() == run.samples.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].valid == run.samples[i].valid);
    CHECK(std::abs(back[i].x_deg - run.samples[i].x_deg) <= 5e-7);
    CHECK(std::abs(back[i].t_s - run.samples[i].t_s) <= 5e-7);
  }
  CHECK(io::trace_csv(GazeRun{run.subject_id, run.session, run.run_index, run.stimulus, back}) == text);
}

TEST_CASE("trace csv errors name the line") {
  const std::string bad = "t_s,gaze_x_deg,gaze_y_deg,valid\n0,1,2,1\n0.1,abc,2,1\n";
  CHECK_THROWS_WITH_AS(io::parse_trace_csv(bad, "f.csv"), doctest::Contains("f.csv:3"), Error);
  CHECK_THROWS_WITH_AS(io::parse_trace_csv("t,x,y,v\n", "f.csv"), doctest::Contains("f.csv:1"), Error);
  CHECK_THROWS_AS(io::parse_trace_csv("t_s,gaze_x_deg,gaze_y_deg,valid\n0,1,2\n", "f"), Error);
  CHECK_THROWS_AS(io::parse_trace_csv("t_s,gaze_x_deg,gaze_y_deg,valid\n0,1,2,2\n", "f"), Error);
  CHECK_THROWS_AS(io::parse_trace_csv("t_s,gaze_x_deg,gaze_y_deg,valid\n0,nan,2,1\n", "f"), Error);
  CHECK(io::parse_trace_csv("t_s,gaze_x_deg,gaze_y_deg,valid\r\n0,1,2,0\r\n", "f").size() == 1);
}

TEST_CASE("sidecar and stimulus json") {
  StimulusSpec spec;
  spec.center_deg = {1.0, -2.0};
  spec.direction = Direction::Counterclockwise;
  const auto j = io::to_json(spec);
  CHECK(j.at("center_deg").is_array());
  CHECK(j.at("direction") == "counterclockwise");
  const auto back = io::stimulus_from_json(j);
  CHECK(back.center_deg.y == -2.0);
  CHECK(back.direction == Direction::Counterclockwise);

  GazeRun run;
  run.subject_id = "07";
  run.session = Session::Impaired;
  run.run_index = 2;
  const auto side = io::sidecar_json(run);
  for (const char* key : {"subject_id", "session", "run_index", "stimulus"}) CHECK(side.contains(key));
  CHECK(side.at("session") == "impaired");
}

TEST_CASE("subject records keep optional fields") {
  SubjectRecord r;
  r.subject_id = "03";
  r.adhd = false;
  r.last_use_days = 4;
  const auto back = io::subject_from_json(io::to_json(r));
  CHECK(back.subject_id == "03");
  CHECK(back.adhd == std::optional<bool>(false));
  CHECK(back.last_use_days == std::optional<int>(4));
  CHECK_FALSE(back.sex.has_value());
}

TEST_CASE("params json round trip") {
  const auto p = synth::default_cohort().sober_population;
  const auto back = io::params_from_json(io::to_json(p));
  for (const auto& f : synth::param_fields()) CHECK(back.*(f.member) == p.*(f.member));
}

TEST_CASE("cohort directory layout and reload") {
  testutil::TempDir dir("io");
  const auto spec = small_cohort();
  const auto cohort = synth::simulate_cohort(spec, StimulusSpec{});
  CHECK(io::write_cohort(dir.path(), cohort, spec, StimulusSpec{}) == 8);
  CHECK(fs::exists(dir.path() / "01" / "baseline" / "run0.csv"));
  CHECK(fs::exists(dir.path() / "02" / "impaired" / "run1.json"));
  const auto manifest = nlohmann::json::parse(io::read_file(dir.path() / "manifest.json"));
  CHECK(manifest.at("seed") == 42);
  CHECK(manifest.at("subjects").size() == 2);
  CHECK(manifest.at("generator_params").contains("sober_population"));

  const auto runs = io::read_trace_tree(dir.path());
  REQUIRE(runs.size() == 8);
  CHECK(runs[0].subject_id == "01");
  CHECK(runs[0].session == Session::Baseline);
  CHECK(runs[3].session == Session::Impaired);
  CHECK(runs[3].run_index == 1);
  for (const auto& r : runs) CHECK(check_run(r).empty());
  // No temporaries left behind.
  for (const auto& e : fs::recursive_directory_iterator(dir.path()))
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
}

TEST_CASE("writing the same cohort twice is byte identical") {
  testutil::TempDir a("io_a"), b("io_b");
  const auto spec = small_cohort();
  io::write_cohort(a.path(), synth::simulate_cohort(spec, StimulusSpec{}), spec, StimulusSpec{});
  io::write_cohort(b.path(), synth::simulate_cohort(spec, StimulusSpec{}), spec, StimulusSpec{});
  for (const auto& e : fs::recursive_directory_iterator(a.path())) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a.path());
    CHECK(io::read_file(e.path()) == io::read_file(b.path() / rel));
  }
}

TEST_CASE("corrupt sidecar is a parse error naming the file") {
  testutil::TempDir dir("io_bad");
  const auto spec = small_cohort();
  io::write_cohort(dir.path(), synth::simulate_cohort(spec, StimulusSpec{}), spec, StimulusSpec{});
  const auto side = dir.path() / "01" / "baseline" / "run1.json";
  std::ofstream(side) << "{\"subject_id\": 5}";
  CHECK_THROWS_WITH_AS(io::read_trace_tree(dir.path()), doctest::Contains("run1.json"), Error);
}

TEST_CASE("features csv round trip with and without degenerate rows") {
  features::MetricVector m{10.25, 0.99, -0.1, 0.3, 1.7, 2.5};
  std::vector<stats::RunFeatures> rows{{"01", Session::Baseline, 0, m, {}}, {"01", Session::Impaired, 0, m, {}}};
  const auto clean = io::features_csv(rows);
  CHECK(clean.rfind(std::string(io::kFeaturesHeader) + "\n", 0) == 0);
  CHECK(clean.find("01,baseline,0,10.25,0.99,-0.1,0.3,1.7,2.5\n") != std::string::npos);
  const auto back = io::parse_features_csv(clean, "f");
  REQUIRE(back.size() == 2);
  CHECK(back[1].metrics->kurt_phase == 1.7);

  rows.push_back({"02", Session::Baseline, 1, std::nullopt, "skew_radial: ZeroVariance, flat"});
  const auto noted = io::features_csv(rows);
  CHECK(noted.rfind(std::string(io::kFeaturesHeader) + ",error\n", 0) == 0);
  CHECK(noted.find("02,baseline,1,,,,,,,skew_radial: ZeroVariance; flat\n") != std::string::npos);
  const auto back2 = io::parse_features_csv(noted, "f");
  REQUIRE(back2.size() == 3);
  CHECK_FALSE(back2[2].metrics.has_value());
  CHECK(back2[2].error.find("ZeroVariance") != std::string::npos);
  CHECK_THROWS_WITH_AS(io::parse_features_csv("a,b\n", "feat.csv"), doctest::Contains("feat.csv:1"), Error);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(-2.5) == "-2.5");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("eval report json keys") {
  classify::EvalReport r;
  r.mode = classify::Mode::Normalized;
  r.n_splits = 1;
  r.per_split = {{0.9, 0.95}};
  r.median_auc = r.best_auc = 0.95;
  r.median_accuracy = 0.9;
  const auto j = io::to_json(r);
  CHECK(j.at("mode") == "normalized");
  for (const char* key : {"mode", "n_splits", "median_auc", "best_auc", "median_accuracy", "per_split"})
    CHECK(j.contains(key));
  CHECK(j.at("per_split")[0].at("auc") == 0.95);
}
