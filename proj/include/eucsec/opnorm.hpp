#ifndef EUCSEC_OPNORM_HPP
#define EUCSEC_OPNORM_HPP

#include <cstdint>

#include "eucsec/core.hpp"

namespace eucsec {

inline constexpr int kDefaultEnumerationCap = 20;
inline constexpr int kMaxEnumerationCap = 40;

/// Exact value of max over eps in {+-1}^m, eps(0) = +1, of objective(M eps),
/// where objective is |.|_1 or |.|_2. Gray-code walk with O(rows) updates;
/// chunks are fixed-size so results do not depend on the thread count. Ties
/// resolve to the lexicographically smallest eps (with -1 < +1).
enum class SignObjective { L1, L2 };
struct SignSearchResult {
  double value = 0.0;
  Eigen::VectorXd eps;
};
SignSearchResult max_over_signs(const Eigen::MatrixXd& m, SignObjective objective,
                                int cap = kDefaultEnumerationCap);

struct InfToOneResult {
  double value = 0.0;
  Eigen::VectorXd eps;        // input signs (length cols)
  Eigen::VectorXd eps_prime;  // output signs (length rows), eps_prime = sign(A eps)
};

/// |A : l_inf -> l_1| = max eps'^T A eps, enumerating the shorter side.
InfToOneResult opnorm_inf_to_1(const Eigen::MatrixXd& a, int cap = kDefaultEnumerationCap);

enum class NormMode { Exact, Heuristic };

struct OpNormOptions {
  NormMode mode = NormMode::Heuristic;
  int restarts = 50;
  std::uint64_t seed = 0;
  int cap = kDefaultEnumerationCap;
  int max_iterations = 2000;
};

template <typename Scalar>
struct OpNormResult {
  double value = 0.0;
  VectorX<Scalar> witness;  // unit vector in the domain norm attaining value
  ValueKind kind = ValueKind::Exact;
  bool converged = true;
};

/// |B : l_2 -> l_p| for p in [1, 2]. Exact mode: p = 1 by sign enumeration
/// over the rows (|B|_{2->1} = max_eps |B^T eps|_2), p = 2 by SVD. Heuristic
/// mode returns a value attained by its witness, hence a lower bound.
template <typename Scalar>
OpNormResult<Scalar> opnorm_2_to_p(const MatrixX<Scalar>& b, double p, const OpNormOptions& options);

/// |A : l_{p'} -> l_p| for p in (1, 2), p' = p/(p-1), by multi-start mixed-norm
/// power iteration. Always a certified lower bound.
template <typename Scalar>
OpNormResult<Scalar> opnorm_pprime_to_p(const MatrixX<Scalar>& a, double p, const OpNormOptions& options);

}  // namespace eucsec

#endif
