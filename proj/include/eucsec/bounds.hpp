#ifndef EUCSEC_BOUNDS_HPP
#define EUCSEC_BOUNDS_HPP

#include <optional>

#include "eucsec/core.hpp"

/// Closed-form constants for sections of l_p^N balls. Every Gamma-function
/// ratio is evaluated in log space, so dimensions up to 1e6 are safe.
namespace eucsec::bounds {

/// ln(Gamma(x + a) / Gamma(x)) for x > 0, x + a > 0. Uses a Stirling-series
/// difference for large x so the result keeps full relative precision.
double log_gamma_ratio(double x, double a);

/// (E |G|_2^p)^{1/p} for a standard Gaussian vector G in R^d.
/// Equals sqrt(2) (Gamma((d+p)/2) / Gamma(d/2))^{1/p}.
double gaussian_mean_norm(long d, double p);

/// Largest lambda with lambda |x|_2 <= |x|_1 on some d-dim subspace of l_1^N
/// can be: sqrt(2/pi) sqrt(N) sqrt(d) / mu_d.
double thm1_upper(long N, long d);

/// The same ceiling for l_p^N, p in [1, 2], real or complex scalars.
double thm2_upper(long N, long d, double p, Field field);

/// thm2_upper with the N^{1/p - 1/2} factor removed (probability measure).
double normalized_upper(long d, double p, Field field);

/// Any lambda' with |x|_1 <= lambda' |x|_2 on a d-dim subspace is >= sqrt(d).
double lambda_prime_lower(long d);

/// (Vol(B_2^d) / Vol(B_p^d))^{1/d}: the volume-comparison lower bound on lambda'.
double meyer_pajor_lower(long d, double p);

/// Mean of |x|_1 over the Euclidean unit sphere of R^N, N mu_1 / mu_N.
double sphere_average_l1(long N);

/// Convert a counting-measure lambda into the normalized-measure value:
/// both the l_p and the l_2 norm are rescaled, so the factor is N^{1/p-1/2}.
double measure_scale(long N, double p, Measure measure);

struct BoundReport {
  long N = 0;
  long d = 0;
  double p = 1.0;
  Field field = Field::Real;
  Measure measure = Measure::Counting;
  double thm_upper_lambda = 0.0;
  /// sqrt(d); only meaningful for p = 1.
  std::optional<double> thm_lower_lambda_prime;
  double meyer_pajor_lower = 0.0;
  /// N mu_1 / mu_N; counting measure, p = 1 only.
  std::optional<double> sphere_average;
  /// sqrt(pi)/2 sqrt(N); complex field, p = 1 only.
  std::optional<double> complex_p1_asymptote;
};

/// Evaluates every bound for one (N, d, p, field, measure) coordinate. All
/// lambda-type values are expressed in the requested measure.
BoundReport bound_report(long N, long d, double p, Field field, Measure measure);

}  // namespace eucsec::bounds

#endif
