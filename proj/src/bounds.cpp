#include "eucsec/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace eucsec::bounds {

namespace {

constexpr double kStirlingSwitch = 12.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

bool valid_p(double p) { return std::isfinite(p) && p > 0.0; }

// Asymptotic correction sum_k B_2k / (2k (2k-1) x^{2k-1}).
double stirling_tail(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return inv * (1.0 / 12.0 +
                inv2 * (-1.0 / 360.0 +
                        inv2 * (1.0 / 1260.0 +
                                inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0))))));
}

}  // namespace

double log_gamma_ratio(double x, double a) {
  require(x > 0.0 && x + a > 0.0, "log_gamma_ratio: arguments must be positive");
  if (a == 0.0) return 0.0;
  if (x < kStirlingSwitch || x + a < kStirlingSwitch) return std::lgamma(x + a) - std::lgamma(x);
  // ln G(y) = (y - 1/2) ln y - y + ln(2 pi)/2 + tail(y); take the difference
  // with y = x + a and y = x, grouping terms to avoid cancellation.
  const double y = x + a;
  return (x - 0.5) * std::log1p(a / x) + a * std::log(y) - a + (stirling_tail(y) - stirling_tail(x));
}

double gaussian_mean_norm(long d, double p) {
  require(d >= 1, "gaussian_mean_norm: d must be >= 1");
  require(valid_p(p), "gaussian_mean_norm: p must be a positive finite real");
  if (p == 2.0) return std::sqrt(static_cast<double>(d));
  const double half_d = 0.5 * static_cast<double>(d);
  return std::exp(log_gamma_ratio(half_d, 0.5 * p) / p + 0.5 * std::numbers::ln2);
}

double thm1_upper(long N, long d) {
  require(d >= 1 && d <= N, "thm1_upper: need 1 <= d <= N");
  return std::sqrt(2.0 / std::numbers::pi) * std::sqrt(static_cast<double>(N)) *
         std::sqrt(static_cast<double>(d)) / gaussian_mean_norm(d, 1.0);
}

double normalized_upper(long d, double p, Field field) {
  require(d >= 1, "normalized_upper: d must be >= 1");
  require(p >= 1.0 && p <= 2.0, "normalized_upper: p must lie in [1, 2]");
  const double ratio = field == Field::Real ? gaussian_mean_norm(1, p) / gaussian_mean_norm(d, p)
                                            : gaussian_mean_norm(2, p) / gaussian_mean_norm(2 * d, p);
  return std::sqrt(static_cast<double>(d)) * ratio;
}

double thm2_upper(long N, long d, double p, Field field) {
  require(d >= 1 && d <= N, "thm2_upper: need 1 <= d <= N");
  require(p >= 1.0 && p <= 2.0, "thm2_upper: p must lie in [1, 2]");
  return std::pow(static_cast<double>(N), 1.0 / p - 0.5) * normalized_upper(d, p, field);
}

double lambda_prime_lower(long d) {
  require(d >= 1, "lambda_prime_lower: d must be >= 1");
  return std::sqrt(static_cast<double>(d));
}

double meyer_pajor_lower(long d, double p) {
  require(d >= 1, "meyer_pajor_lower: d must be >= 1");
  require(p >= 1.0 && p <= 2.0, "meyer_pajor_lower: p must lie in [1, 2]");
  const double dd = static_cast<double>(d);
  // ln Vol(B_2^d) = (d/2) ln pi - ln G(d/2 + 1)
  // ln Vol(B_p^d) = d ln(2 G(1 + 1/p)) - ln G(1 + d/p)
  const double log_b2 = 0.5 * dd * std::log(std::numbers::pi) - std::lgamma(0.5 * dd + 1.0);
  const double log_bp = dd * (std::numbers::ln2 + std::lgamma(1.0 + 1.0 / p)) - std::lgamma(1.0 + dd / p);
  return std::exp((log_b2 - log_bp) / dd);
}

double sphere_average_l1(long N) {
  require(N >= 1, "sphere_average_l1: N must be >= 1");
  return static_cast<double>(N) * gaussian_mean_norm(1, 1.0) / gaussian_mean_norm(N, 1.0);
}

double measure_scale(long N, double p, Measure measure) {
  if (measure == Measure::Counting) return 1.0;
  if (std::isinf(p)) return std::pow(static_cast<double>(N), -0.5);
  return std::pow(static_cast<double>(N), 1.0 / p - 0.5);
}

BoundReport bound_report(long N, long d, double p, Field field, Measure measure) {
  BoundReport r;
  r.N = N;
  r.d = d;
  r.p = p;
  r.field = field;
  r.measure = measure;
  const double scale = measure_scale(N, p, measure);
  r.thm_upper_lambda = thm2_upper(N, d, p, field) / scale;
  if (p == 1.0) r.thm_lower_lambda_prime = lambda_prime_lower(d) / scale;
  r.meyer_pajor_lower = meyer_pajor_lower(d, p) / scale;
  if (p == 1.0 && measure == Measure::Counting) r.sphere_average = sphere_average_l1(N);
  if (p == 1.0 && field == Field::Complex)
    r.complex_p1_asymptote = 0.5 * std::sqrt(std::numbers::pi) * std::sqrt(static_cast<double>(N)) / scale;
  return r;
}

}  // namespace eucsec::bounds
