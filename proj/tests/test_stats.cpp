#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pursuit/stats.hpp"

using namespace pursuit;
using namespace pursuit::stats;

namespace {

RunFeatures row(const std::string& id, Session s, int k, double v) {
  features::MetricVector m{v, v, v, v, v, v};
  return {id, s, k, m, {}};
}

}  // namespace

TEST_CASE("t_cdf special values") {
  CHECK(t_cdf(0.0, 1) == 0.5);
  CHECK(t_cdf(0.0, 17) == 0.5);
  CHECK(std::abs(t_cdf(1.0, 1) - 0.75) < 1e-10);
  for (double t : {-3.0, -0.5, 0.2, 1.0, 7.0})
    CHECK(std::abs(t_cdf(t, 1) - (0.5 + std::atan(t) / kPi)) < 1e-12);
  CHECK(std::abs(t_cdf(1.96, 1e6) - oracle::normal_cdf(1.96)) < 1e-4);
  CHECK(std::abs(t_cdf(1.96, 1e6) - 0.9750) < 1e-4);
  CHECK_THROWS_WITH_AS(t_cdf(1.0, 0.0), doctest::Contains("InvalidDf"), Error);
}

TEST_CASE("t_cdf agrees with integrating the density") {
  for (double df : {1.0, 2.0, 3.0, 5.0, 18.0, 30.0, 100.0, 1000.0}) {
    for (double t : {-12.0, -4.3, -2.29, -1.0, 0.3, 2.48, 4.82, 9.0}) {
      CHECK(std::abs(t_cdf(t, df) - oracle::t_cdf_by_density(t, df)) < 1e-10);
    }
  }
}

TEST_CASE("t_cdf symmetry") {
  for (double df : {1.0, 4.0, 18.0, 250.0})
    for (double t = -40.0; t <= 40.0; t += 1.7) CHECK(std::abs(t_cdf(t, df) + t_cdf(-t, df) - 1.0) < 1e-12);
}

TEST_CASE("t_quantile inverts t_cdf") {
  for (double df : {2.0, 18.0, 60.0})
    for (double p : {0.01, 0.2, 0.5, 0.95, 0.999}) CHECK(t_cdf(t_quantile(p, df), df) == doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("normal quantile inverts the normal CDF") {
  for (double p : {1e-8, 0.025, 0.3, 0.5, 0.8, 0.975})
    CHECK(oracle::normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("noncentral t reduces to the central t") {
  for (double t : {-2.0, 0.0, 1.3, 3.0}) CHECK(noncentral_t_cdf(t, 9.0, 0.0) == doctest::Approx(t_cdf(t, 9.0)).epsilon(1e-9));
}

TEST_CASE("noncentral t CDF matches simulation") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 1.0);
  const double df = 7.0, delta = 1.8, t0 = 2.1;
  std::chi_squared_distribution<double> chi(df);
  int below = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i)
    if ((z(rng) + delta) / std::sqrt(chi(rng) / df) <= t0) ++below;
  CHECK(std::abs(noncentral_t_cdf(t0, df, delta) - static_cast<double>(below) / n) < 0.003);
}

TEST_CASE("paired t worked example") {
  const auto r = paired_t(std::vector<double>{0, 0, 0}, std::vector<double>{1, 2, 3});
  CHECK(r.t == doctest::Approx(std::sqrt(12.0)).epsilon(1e-12));
  CHECK(r.df == 2);
  CHECK(r.p_two_tailed == doctest::Approx(0.0742).epsilon(1e-3));
  CHECK(std::abs(r.p_two_tailed - 2.0 * (1.0 - oracle::t_cdf_by_density(std::sqrt(12.0), 2))) < 1e-10);
}

TEST_CASE("paired t errors") {
  CHECK_THROWS_WITH_AS(paired_t(std::vector<double>{1, 2}, std::vector<double>{1}), doctest::Contains("LengthMismatch"), Error);
  CHECK_THROWS_WITH_AS(paired_t(std::vector<double>{1}, std::vector<double>{2}), doctest::Contains("TooFewSubjects"), Error);
  CHECK_THROWS_WITH_AS(paired_t(std::vector<double>{1, 2, 3}, std::vector<double>{2, 3, 4}), doctest::Contains("ZeroVariance"), Error);
}

TEST_CASE("published t statistics give the expected p values") {
  CHECK(two_tailed_p(-3.0, 18) == doctest::Approx(0.0077).epsilon(0.01));
  CHECK(two_tailed_p(-2.29, 18) == doctest::Approx(0.0343).epsilon(0.001));
  CHECK(two_tailed_p(2.48, 18) == doctest::Approx(0.0233).epsilon(0.01));
}

TEST_CASE("dz equals t over root n") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(19), b(19);
    for (std::size_t i = 0; i < 19; ++i) {
      a[i] = n(rng);
      b[i] = a[i] + 0.4 + n(rng);
    }
    CHECK(std::abs(cohens_d(a, b).dz - paired_t(a, b).t / std::sqrt(19.0)) < 1e-12);
  }
}

TEST_CASE("cohen's d antisymmetry and pooled form") {
  const std::vector<double> a{1.0, 2.5, 3.0, 4.2, 0.7};
  const std::vector<double> b{2.0, 2.9, 4.4, 4.0, 1.9};
  const auto ab = cohens_d(a, b);
  const auto ba = cohens_d(b, a);
  CHECK(ab.dz == doctest::Approx(-ba.dz));
  CHECK(ab.d_pooled == doctest::Approx(-ba.d_pooled));
  auto var = [](const std::vector<double>& v) {
    double m = 0.0, s = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
  };
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    ma += a[i] / 5;
    mb += b[i] / 5;
  }
  CHECK(ab.d_pooled == doctest::Approx((mb - ma) / std::sqrt((var(a) + var(b)) / 2)).epsilon(1e-12));
  CHECK_THROWS_AS(cohens_d(a, std::vector<double>{1.5, 3.0, 3.5, 4.7, 1.2}), Error);
}

TEST_CASE("shifting a subject's values in both sessions leaves the test unchanged") {
  std::vector<double> a{1.0, 2.0, 3.5, 0.2}, b{1.5, 2.2, 4.5, 0.1};
  const auto before = paired_t(a, b);
  a[2] += 0.5;
  b[2] += 0.5;
  a[0] -= 1.0;
  b[0] -= 1.0;
  const auto after = paired_t(a, b);
  CHECK(after.t == doctest::Approx(before.t).epsilon(1e-12));
  CHECK(after.p_two_tailed == doctest::Approx(before.p_two_tailed).epsilon(1e-12));
}

TEST_CASE("required n reproduces the published column") {
  CHECK(required_n(1.568, 0.05, 0.8, Sided::One) == doctest::Approx(4.22396).epsilon(1e-3));
  CHECK(required_n(0.728, 0.05, 0.8, Sided::One) == doctest::Approx(13.1298).epsilon(1e-3));
  CHECK(required_n(1.156, 0.05, 0.8, Sided::One) == doctest::Approx(6.21961).epsilon(1e-3));
  const double n2 = required_n(0.5, 0.05, 0.8, Sided::Two);
  CHECK(n2 > 33.0);
  CHECK(n2 < 34.0);
}

TEST_CASE("required n hits the target power") {
  for (double d : {0.3, 0.9, 2.0}) {
    for (Sided s : {Sided::One, Sided::Two}) {
      const double n = required_n(d, 0.05, 0.8, s);
      CHECK(paired_power(d, n, 0.05, s) == doctest::Approx(0.8).epsilon(1e-6));
    }
  }
}

TEST_CASE("required n clamps and orders") {
  CHECK(required_n(10.0, 0.05, 0.8, Sided::One) == 2.0);
  CHECK(required_n(-10.0, 0.05, 0.8, Sided::One) == 2.0);
  // df = 1 at n = 2 leaves two-sided power short of 0.8 even for d = 10.
  const double two = required_n(10.0, 0.05, 0.8, Sided::Two);
  CHECK(two > 2.0);
  CHECK(two < 2.1);
  CHECK(required_n(100.0, 0.05, 0.8, Sided::Two) == 2.0);
  double previous = 1e9;
  for (double d : {0.2, 0.4, 0.8, 1.2, 1.6}) {
    const double n = required_n(d, 0.05, 0.8, Sided::Two);
    CHECK(n < previous);
    previous = n;
  }
  previous = 0.0;
  for (double p : {0.6, 0.7, 0.8, 0.9, 0.95}) {
    const double n = required_n(0.5, 0.05, p, Sided::One);
    CHECK(n > previous);
    previous = n;
  }
  CHECK_THROWS_WITH_AS(required_n(0.0, 0.05, 0.8, Sided::One), doctest::Contains("ZeroEffect"), Error);
  CHECK_THROWS_WITH_AS(required_n(0.5, 0.5, 0.3, Sided::One), doctest::Contains("Unattainable"), Error);
  CHECK_THROWS_AS(required_n(0.5, 1.5, 0.8, Sided::One), Error);
}

TEST_CASE("monte carlo power") {
  CHECK(std::abs(mc_power(0.0, 20, 0.05, Sided::Two, 100000, 1) - 0.05) <= 0.003);
  CHECK(mc_power(3.0, 20, 0.05, Sided::Two, 20000, 2) > 0.999);
  const double analytic = paired_power(0.67, 15, 0.05, Sided::One);
  CHECK(std::abs(mc_power(0.67, 15, 0.05, Sided::One, 100000, 3) - analytic) <= 0.02);
  CHECK(mc_power(0.5, 10, 0.05, Sided::One, 5000, 9) == mc_power(0.5, 10, 0.05, Sided::One, 5000, 9));
  CHECK_THROWS_AS(mc_power(0.5, 1, 0.05, Sided::One, 5000, 1), Error);
  CHECK_THROWS_AS(mc_power(0.5, 10, 0.05, Sided::One, 999, 1), Error);
}

TEST_CASE("session means average runs per subject") {
  std::vector<RunFeatures> rows{row("a", Session::Baseline, 0, 1.0), row("a", Session::Baseline, 1, 3.0),
                                row("a", Session::Impaired, 0, 5.0), row("b", Session::Baseline, 0, 2.0),
                                row("b", Session::Impaired, 0, 4.0), row("b", Session::Impaired, 1, 8.0)};
  const auto m = session_means(rows, 0);
  CHECK(m.subjects == std::vector<std::string>{"a", "b"});
  CHECK(m.baseline == std::vector<double>{2.0, 2.0});
  CHECK(m.impaired == std::vector<double>{5.0, 6.0});
}

TEST_CASE("degenerate runs are excluded from the means") {
  std::vector<RunFeatures> rows{row("a", Session::Baseline, 0, 1.0), row("a", Session::Impaired, 0, 5.0),
                                row("b", Session::Baseline, 0, 2.0), row("b", Session::Impaired, 0, 4.0)};
  rows.push_back({"a", Session::Impaired, 1, std::nullopt, "ZeroVariance"});
  const auto m = session_means(rows, 0);
  CHECK(m.impaired[0] == 5.0);
}

TEST_CASE("a missing session names the subject") {
  std::vector<RunFeatures> rows{row("a", Session::Baseline, 0, 1.0), row("a", Session::Impaired, 0, 5.0),
                                row("b", Session::Baseline, 0, 2.0)};
  CHECK_THROWS_WITH_AS(stats_table(rows), doctest::Contains("b"), Error);
  try {
    stats_table(rows);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingSession);
  }
}

TEST_CASE("identical sessions give ZeroVariance on every row") {
  std::vector<RunFeatures> rows;
  for (int s = 0; s < 5; ++s) {
    rows.push_back(row("s" + std::to_string(s), Session::Baseline, 0, s * 1.5));
    rows.push_back(row("s" + std::to_string(s), Session::Impaired, 0, s * 1.5));
  }
  const auto table = stats_table(rows);
  REQUIRE(table.size() == 6);
  for (const auto& r : table) {
    CHECK_FALSE(r.ok());
    CHECK(r.error.find("ZeroVariance") != std::string::npos);
  }
}

TEST_CASE("two-subject table uses df 1 and keeps table order") {
  std::vector<RunFeatures> rows;
  features::MetricVector b1{10, 1, 0.1, 0.2, 0.3, 2}, i1{9.5, 0.9, 0.0, 0.5, 0.9, 1};
  features::MetricVector b2{10.2, 1, 0.2, 0.1, 0.2, 3}, i2{9.9, 0.8, -0.3, 0.6, 0.4, 1.5};
  rows.push_back({"x", Session::Baseline, 0, b1, {}});
  rows.push_back({"x", Session::Impaired, 0, i1, {}});
  rows.push_back({"y", Session::Baseline, 0, b2, {}});
  rows.push_back({"y", Session::Impaired, 0, i2, {}});
  const auto table = stats_table(rows);
  REQUIRE(table.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(table[k].metric == features::kMetricNames[k]);
    CHECK(table[k].df == 1);
    CHECK(table[k].n_subjects == 2);
    CHECK(table[k].p_value >= 0.0);
    CHECK(table[k].p_value <= 1.0);
    if (table[k].ok()) {
      CHECK(table[k].n_req_one_sided >= 2.0);
      CHECK(table[k].n_req_two_sided >= table[k].n_req_one_sided);
    }
  }
  const auto tsv = stats_tsv(table);
  CHECK(tsv.rfind("metric\tn\tt_stat\tdf\tp_value\tcohen_dz\tcohen_d_pooled\tn_req_one_sided\tn_req_two_sided\n", 0) == 0);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 7);
  CHECK(stats_markdown(table).find("| mean_radius_deg |") != std::string::npos);
}

TEST_CASE("sidedness text") {
  CHECK(parse_sided("one") == Sided::One);
  CHECK(parse_sided("two") == Sided::Two);
  CHECK_THROWS_AS(parse_sided("three"), Error);
}
