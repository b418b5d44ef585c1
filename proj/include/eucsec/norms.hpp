#ifndef EUCSEC_NORMS_HPP
#define EUCSEC_NORMS_HPP

#include <cmath>
#include <limits>

#include "eucsec/core.hpp"

namespace eucsec {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// l_p norm of a real or complex vector (moduli for complex entries).
/// p = kInf gives the max modulus under either measure.
template <typename Derived>
double lp_norm(const Eigen::MatrixBase<Derived>& expr, double p, Measure measure = Measure::Counting) {
  if (!(p > 0.0)) throw DomainError("lp_norm: p must be positive");
  // coefficient access on an unevaluated product would redo the product per entry
  const auto& x = expr.eval();
  const auto n = x.size();
  if (n == 0) return 0.0;
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  double sum = 0.0;
  if (p == 1.0) {
    sum = x.cwiseAbs().sum();
  } else if (p == 2.0) {
    // scaled to avoid overflow/underflow in the squares
    const double big = x.cwiseAbs().maxCoeff();
    if (big == 0.0) return 0.0;
    double s = (x / big).squaredNorm();
    if (measure == Measure::Normalized) s /= static_cast<double>(n);
    return big * std::sqrt(s);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) sum += std::pow(std::abs(x(i)), p);
  }
  if (measure == Measure::Normalized) sum /= static_cast<double>(n);
  if (p == 1.0) return sum;
  return std::pow(sum, 1.0 / p);
}

/// Conjugate exponent p/(p-1); 1 maps to infinity and infinity to 1.
inline double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// Unnormalized l_p duality map: y_k -> |y_k|^{p-1} y_k / |y_k|, with 0 at
/// zero coordinates (the subgradient choice at p = 1). <y, psi_p(y)> = |y|_p^p.
template <typename Derived>
VectorX<typename Derived::Scalar> duality_map(const Eigen::MatrixBase<Derived>& expr, double p) {
  using Scalar = typename Derived::Scalar;
  const auto& y = expr.eval();
  VectorX<Scalar> out(y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double m = std::abs(y(k));
    if (m == 0.0) {
      out(k) = Scalar(0);
    } else if (p == 1.0) {
      out(k) = y(k) / m;
    } else {
      out(k) = y(k) * std::pow(m, p - 2.0);
    }
  }
  return out;
}

/// r-norm of the singular values. With normalized = true the trace is divided
/// by the column count (the normalized trace on A*A).
template <typename Derived>
double schatten_norm(const Eigen::MatrixBase<Derived>& a, double r, bool normalized = false) {
  using Plain = typename Derived::PlainObject;
  if (!(r > 0.0)) throw DomainError("schatten_norm: r must be positive");
  if (!a.allFinite()) throw NumericError("schatten_norm: non-finite entries");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Plain> svd(a.eval());
  if (svd.info() != Eigen::Success) throw NumericError("schatten_norm: SVD failed to converge");
  const Eigen::VectorXd s = svd.singularValues();
  if (std::isinf(r)) return s.size() ? s.maxCoeff() : 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) sum += std::pow(s(i), r);
  if (normalized) sum /= static_cast<double>(a.cols());
  return std::pow(sum, 1.0 / r);
}

}  // namespace eucsec

#endif
