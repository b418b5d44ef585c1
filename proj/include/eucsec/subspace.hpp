#ifndef EUCSEC_SUBSPACE_HPP
#define EUCSEC_SUBSPACE_HPP

#include <algorithm>
#include <string>

#include "eucsec/core.hpp"

namespace eucsec {

/// A d-dimensional subspace E of R^N or C^N, stored as an N x d basis with
/// orthonormal columns. Construct through orthonormalize().
template <typename Scalar>
struct BasicSubspace {
  MatrixX<Scalar> basis;
  Provenance provenance;

  Eigen::Index ambient_dim() const { return basis.rows(); }
  Eigen::Index dim() const { return basis.cols(); }
  static constexpr Field field() { return field_of<Scalar>(); }

  /// max |B^H B - I|
  double orthonormality_residual() const {
    const auto d = basis.cols();
    return (basis.adjoint() * basis - MatrixX<Scalar>::Identity(d, d)).cwiseAbs().maxCoeff();
  }

  /// Euclidean distance from x to E relative to |x|_2.
  template <typename Derived>
  double projection_residual(const Eigen::MatrixBase<Derived>& x) const {
    const double nx = x.norm();
    if (nx == 0.0) return 0.0;
    return (x - basis * (basis.adjoint() * x)).norm() / nx;
  }
};

using Subspace = BasicSubspace<double>;
using ComplexSubspace = BasicSubspace<Complex>;

inline constexpr double kRankTolerance = 1e-8;

/// Orthonormal basis for the column span of raw, via Householder QR without
/// pivoting (so the leading k columns of the result span the leading k columns
/// of raw). Each column is then rotated by a unit scalar so that its first
/// largest-modulus entry is real and positive.
template <typename Derived>
BasicSubspace<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived>& raw,
                                                       Provenance provenance = {}) {
  using Scalar = typename Derived::Scalar;
  const auto n = raw.rows();
  const auto d = raw.cols();
  if (d < 1 || n < d) throw DomainError("orthonormalize: need N >= d >= 1");
  if (!raw.allFinite()) throw NumericError("orthonormalize: non-finite entries");

  const MatrixX<Scalar> a = raw;
  double largest = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) largest = std::max(largest, a.col(j).norm());
  if (largest == 0.0) throw RankDeficiencyError("orthonormalize: zero matrix");

  Eigen::HouseholderQR<MatrixX<Scalar>> qr(a);
  const MatrixX<Scalar>& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (std::abs(packed(j, j)) < kRankTolerance * largest)
      throw RankDeficiencyError("orthonormalize: column " + std::to_string(j) +
                                " is numerically dependent on the previous ones");
  }
  MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(n, d);

  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::Index at = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // strict comparison with a relative slack keeps the first of near-ties
      const double m = std::abs(q(i, j));
      if (m > best * (1.0 + 1e-12)) {
        best = m;
        at = i;
      }
    }
    const Scalar phase = q(at, j) / best;
    q.col(j) *= Scalar(1) / phase;
    if constexpr (is_complex_v<Scalar>) q(at, j) = Scalar(std::abs(q(at, j)), 0.0);
  }
  return BasicSubspace<Scalar>{std::move(q), std::move(provenance)};
}

}  // namespace eucsec

#endif
