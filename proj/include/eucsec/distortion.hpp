#ifndef EUCSEC_DISTORTION_HPP
#define EUCSEC_DISTORTION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eucsec/bounds.hpp"
#include "eucsec/core.hpp"
#include "eucsec/norms.hpp"
#include "eucsec/opnorm.hpp"
#include "eucsec/subspace.hpp"

/// Distortion constants of a subspace E of l_p^N:
///   lambda_min = min { |x|_p : x in E, |x|_2 = 1 }
///   lambda_max = max { |x|_p : x in E, |x|_2 = 1 }
/// Under Measure::Normalized both norms use the uniform probability measure,
/// so values are the counting ones divided by N^{1/p - 1/2}.
namespace eucsec {

/// Default limit on the number of candidate zero sets C(N, d-1) visited by
/// lambda_min_exact.
inline constexpr long long kDefaultVertexBudget = 1LL << 22;

enum class Target { Min, Max };

template <typename Scalar>
struct LambdaResult {
  double value = 0.0;
  ValueKind kind = ValueKind::Exact;
  /// Unit vector (counting l_2) in E attaining value.
  VectorX<Scalar> witness;
};

/// |x|_p / |x|_2, both under the given measure.
template <typename Derived>
double norm_ratio(const Eigen::MatrixBase<Derived>& x, double p, Measure measure) {
  return lp_norm(x, p, measure) / lp_norm(x, 2.0, measure);
}

struct VertexStats {
  long long candidates = 0;
  long long degenerate = 0;  // zero sets whose rows were rank deficient
};

/// Number of (d-1)-subsets of N coordinates, saturating at LLONG_MAX.
long long vertex_candidates(long N, long d);

/// Exact lambda_max for p = 1 by enumerating sign vectors on the N coordinates
/// (lambda_max = max_eps |B^T eps|_2). Real field only.
LambdaResult<double> lambda_max_exact(const Subspace& e, Measure measure = Measure::Counting,
                                      int cap = kDefaultEnumerationCap);

/// Exact lambda_min for p = 1: 1 / (outer radius of the section B_1^N cap E).
/// Every vertex of the section vanishes on d-1 coordinates whose rows of the
/// basis have rank d-1, so the vertex direction is the null vector of those
/// rows. All C(N, d-1) zero sets are visited; rank-deficient ones are counted
/// in stats and skipped (a vertex on them is reached through a regular subset).
LambdaResult<double> lambda_min_exact(const Subspace& e, Measure measure = Measure::Counting,
                                      long long budget = kDefaultVertexBudget, VertexStats* stats = nullptr);

struct HeuristicOptions {
  int restarts = 50;
  std::uint64_t seed = 0;
  int max_iterations = 500;
  /// Vertex-exchange steps per start in the real p = 1 minimizer; < 0 = no limit.
  int max_vertex_hops = -1;
};

/// Multi-start local optimization of |By|_p over the unit sphere of the
/// coefficient space. Max returns an attained value (lower bound), Min an
/// attained value (upper bound). Deterministic given options.seed; a run with
/// more restarts visits a superset of starts, so it is never worse.
///
/// Max: power iteration with sign polishing for real p = 1.
/// Min, real p = 1: exact great-circle line searches that descend to a vertex
/// of the section, then vertex exchange until no edge improves.
/// Min otherwise: Riemannian gradient descent on a smoothed objective (complex
/// scalars are optimized as pairs of reals).
template <typename Scalar>
LambdaResult<Scalar> lambda_heuristic(const BasicSubspace<Scalar>& e, double p, Target target,
                                      Measure measure = Measure::Counting, const HeuristicOptions& options = {});

/// E |X|_1 for X the standard Gaussian vector on E, in closed form:
/// E|g| * sum_k |row_k(B)|_2, with E|g| = sqrt(2/pi) (real) or sqrt(pi)/2 (complex).
template <typename Scalar>
double gaussian_l1_mean(const BasicSubspace<Scalar>& e);

struct BoundCheck {
  bool applicable = false;         // p in [1, 2]
  double thm_upper = 0.0;          // ceiling on lambda_min
  std::optional<double> lambda_prime_lower;  // floor on lambda_max (p = 1)
  bool min_ok = true;
  bool max_ok = true;
  bool sandwich_ok = true;         // 1 <= min <= max <= sqrt(N), counting p = 1
  bool violation = false;          // an Exact value broke a theorem
  std::vector<std::string> notes;
};

template <typename Scalar>
struct DistortionEstimate {
  long N = 0;
  long d = 0;
  double p = 1.0;
  Measure measure = Measure::Counting;
  Field field = Field::Real;
  LambdaResult<Scalar> lambda_min;
  LambdaResult<Scalar> lambda_max;
  BoundCheck bound_check;
  VertexStats vertex_stats;

  double distortion() const { return lambda_max.value / lambda_min.value; }
};

struct EvaluateOptions {
  int enumeration_cap = kDefaultEnumerationCap;
  long long vertex_budget = kDefaultVertexBudget;
  HeuristicOptions heuristic;
  bool allow_exact = true;
  bool throw_on_violation = true;
};

/// Exact where eligible (real field, p = 1, within caps), heuristic otherwise,
/// then compared against the closed-form bounds. An Exact value on the wrong
/// side of a bound throws TheoremViolation unless throw_on_violation is off.
template <typename Scalar>
DistortionEstimate<Scalar> evaluate(const BasicSubspace<Scalar>& e, double p, Measure measure,
                                    const EvaluateOptions& options = {});

}  // namespace eucsec

#endif
