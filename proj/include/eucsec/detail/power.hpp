#ifndef EUCSEC_DETAIL_POWER_HPP
#define EUCSEC_DETAIL_POWER_HPP

#include <cmath>

#include "eucsec/core.hpp"
#include "eucsec/norms.hpp"

namespace eucsec::detail {

// Power iteration x <- B^H psi_p(B x) / |.|_2 for max |Bx|_p over the unit
// sphere. Each accepted step cannot decrease the value: f is convex and
// 1-homogeneous, so f(x_new) >= <grad f(x), x_new> >= <grad f(x), x> = f(x).
template <typename Scalar>
double power_2_to_p(const MatrixX<Scalar>& b, double p, VectorX<Scalar>& x, int max_iterations, bool& converged) {
  x.normalize();
  double val = lp_norm(b * x, p);
  converged = false;
  for (int it = 0; it < max_iterations; ++it) {
    const VectorX<Scalar> g = b.adjoint() * duality_map(b * x, p);
    const double ng = g.norm();
    if (ng == 0.0) {
      converged = true;
      break;
    }
    const VectorX<Scalar> xn = g / ng;
    const double vn = lp_norm(b * xn, p);
    if (vn < val) {
      converged = true;
      break;
    }
    const bool small_step = vn - val <= 1e-15 * val;
    x = xn;
    val = vn;
    if (small_step) {
      converged = true;
      break;
    }
  }
  return val;
}

// Mixed-norm power iteration for max |Ax|_p over |x|_q = 1, q = p'.
template <typename Scalar>
double power_pprime_to_p(const MatrixX<Scalar>& a, double p, double q, VectorX<Scalar>& x, int max_iterations,
                         bool& converged) {
  x /= lp_norm(x, q);
  double val = lp_norm(a * x, p);
  converged = false;
  for (int it = 0; it < max_iterations; ++it) {
    const VectorX<Scalar> z = a.adjoint() * duality_map(a * x, p);
    if (z.norm() == 0.0) {
      converged = true;
      break;
    }
    VectorX<Scalar> xn = duality_map(z, p);
    xn /= lp_norm(xn, q);
    const double vn = lp_norm(a * xn, p);
    if (vn < val) {
      converged = true;
      break;
    }
    const bool small_step = vn - val <= 1e-15 * val;
    x = xn;
    val = vn;
    if (small_step) {
      converged = true;
      break;
    }
  }
  return val;
}

// Sign ascent for max_eps |B^T eps|_2 starting from eps = sign(Bx): single
// flips, then pair flips once no single flip helps (pairs only up to
// kPairFlipRows rows; near-full subspaces turn this into number partitioning,
// where single flips stall). Returns true and replaces x by B^T eps / |B^T eps|
// if anything helped.
inline constexpr Eigen::Index kPairFlipRows = 512;

inline bool polish_signs(const Eigen::MatrixXd& b, Eigen::VectorXd& x) {
  const Eigen::Index n = b.rows();
  const Eigen::VectorXd y = b * x;
  Eigen::VectorXd eps = y.unaryExpr([](double t) { return t < 0.0 ? -1.0 : 1.0; });
  Eigen::VectorXd v = b.transpose() * eps;
  const Eigen::VectorXd rn = b.rowwise().squaredNorm();
  const bool pairs = n <= kPairFlipRows;
  const Eigen::MatrixXd gram = pairs ? Eigen::MatrixXd(b * b.transpose()) : Eigen::MatrixXd();
  bool any = false;
  for (bool improved = true; improved;) {
    improved = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double c = eps(j) * b.row(j).dot(v);
      if (rn(j) > c + 1e-13 * (rn(j) + std::abs(c))) {
        v.noalias() -= (2.0 * eps(j)) * b.row(j).transpose();
        eps(j) = -eps(j);
        improved = any = true;
      }
    }
    if (improved || !pairs) continue;
    // |v|^2 changes by 4 (rn_i - c_i + rn_j - c_j + 2 eps_i eps_j G_ij) under a pair flip
    const Eigen::VectorXd c = eps.cwiseProduct(b * v);
    for (Eigen::Index i = 0; i < n && !improved; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double gain = rn(i) - c(i) + rn(j) - c(j) + 2.0 * eps(i) * eps(j) * gram(i, j);
        const double scale = rn(i) + rn(j) + std::abs(c(i)) + std::abs(c(j));
        if (gain > 1e-13 * scale) {
          v.noalias() -= (2.0 * eps(i)) * b.row(i).transpose() + (2.0 * eps(j)) * b.row(j).transpose();
          eps(i) = -eps(i);
          eps(j) = -eps(j);
          improved = any = true;
          break;
        }
      }
  }
  if (any && v.norm() > 0.0) x = v / v.norm();
  return any;
}

// Power iteration followed by rounds of sign polishing (real, p = 1).
inline double power_with_polish(const Eigen::MatrixXd& b, Eigen::VectorXd& x, int max_iterations, bool& converged) {
  double value = power_2_to_p(b, 1.0, x, max_iterations, converged);
  for (int round = 0; round < 100; ++round) {
    Eigen::VectorXd trial = x;
    if (!polish_signs(b, trial)) break;
    bool conv = false;
    const double v = power_2_to_p(b, 1.0, trial, max_iterations, conv);
    if (v <= value) break;
    value = v;
    x = trial;
    converged = conv;
  }
  return value;
}

}  // namespace eucsec::detail

#endif
