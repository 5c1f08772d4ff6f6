// Special functions behind the t-test and power computations.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "pursuit/stats.hpp"

namespace pursuit::stats {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

constexpr int kGaussOrder = 20;

struct GaussLegendre {
  std::array<double, kGaussOrder> nodes{};
  std::array<double, kGaussOrder> weights{};

  GaussLegendre() {
    const int n = kGaussOrder;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double step = p0 / dp;
        z -= step;
        if (std::abs(step) < 1e-15) break;
      }
      nodes[i] = z;
      weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre rule;
  return rule;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::InvalidParams, "incomplete_beta a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_cdf(double t, double df) {
  if (!(df > 0.0) || !std::isfinite(df)) throw Error(ErrorKind::InvalidDf, std::to_string(df));
  if (std::isnan(t)) return t;
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidParams, "t_quantile p in (0, 1)");
  if (p == 0.5) return 0.0;
  double lo = -1.0, hi = 1.0;
  while (t_cdf(lo, df) > p) lo *= 2.0;
  while (t_cdf(hi, df) < p) hi *= 2.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    (t_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidParams, "normal_quantile p in (0, 1)");
  // Acklam's rational approximation, then two Halley refinements.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int k = 0; k < 2; ++k) {
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(kTwoPi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double noncentral_t_cdf(double t, double df, double delta) {
  if (!(df > 0.0)) throw Error(ErrorKind::InvalidDf, std::to_string(df));
  if (delta == 0.0) return t_cdf(t, df);
  // T = (Z + delta) / (X / sqrt(df)) with X ~ chi(df), so
  // P(T <= t) = E[ Phi(t X / sqrt(df) - delta) ]. Integrate over X = u^2,
  // which keeps the integrand smooth at the origin for df >= 1.
  const double root_df = std::sqrt(df);
  const double x_lo = std::max(0.0, root_df - 12.0);
  const double x_hi = root_df + 12.0;
  const double u_lo = std::sqrt(x_lo);
  const double u_hi = std::sqrt(x_hi);
  const double log_norm = (0.5 * df - 1.0) * std::log(2.0) + std::lgamma(0.5 * df);

  const auto& rule = gauss_legendre();
  constexpr int kPanels = 128;
  const double width = (u_hi - u_lo) / kPanels;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double mid = u_lo + (p + 0.5) * width;
    for (int k = 0; k < kGaussOrder; ++k) {
      const double u = mid + 0.5 * width * rule.nodes[k];
      if (u <= 0.0) continue;
      const double x = u * u;
      const double log_density = (df - 1.0) * std::log(x) - 0.5 * x * x - log_norm;
      const double integrand = 2.0 * u * std::exp(log_density) * normal_cdf(t * x / root_df - delta);
      total += 0.5 * width * rule.weights[k] * integrand;
    }
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace pursuit::stats
