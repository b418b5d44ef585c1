#include "eucsec/distortion.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>
#include <numeric>

#include "eucsec/detail/power.hpp"
#include "eucsec/norms.hpp"
#include "eucsec/parallel.hpp"
#include "eucsec/random.hpp"

namespace eucsec {

long long vertex_candidates(long N, long d) {
  const long k = std::min(d - 1, N - d + 1);
  long double c = 1.0L;
  for (long i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(N - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(LLONG_MAX) / 2) return LLONG_MAX;
  }
  return static_cast<long long>(std::llround(c));
}

LambdaResult<double> lambda_max_exact(const Subspace& e, Measure measure, int cap) {
  const auto N = e.ambient_dim();
  OpNormOptions opts;
  opts.mode = NormMode::Exact;
  opts.cap = cap;
  const auto r = opnorm_2_to_p<double>(e.basis, 1.0, opts);
  LambdaResult<double> out;
  out.kind = ValueKind::Exact;
  out.witness = e.basis * r.witness;
  out.value = r.value / bounds::measure_scale(N, 1.0, measure);
  return out;
}

LambdaResult<double> lambda_min_exact(const Subspace& e, Measure measure, long long budget, VertexStats* stats) {
  const Eigen::MatrixXd& b = e.basis;
  const long N = b.rows();
  const long d = b.cols();
  const long long count = vertex_candidates(N, d);
  if (count > budget)
    throw CapExceededError("lambda_min_exact: " + std::to_string(count) + " zero sets exceed the budget of " +
                           std::to_string(budget) + "; use lambda_heuristic");

  VertexStats local;
  const long k = d - 1;
  std::vector<Eigen::Index> zero_set(static_cast<std::size_t>(k));
  std::iota(zero_set.begin(), zero_set.end(), 0);

  double best_ratio = kInf;
  Eigen::VectorXd best_w;
  Eigen::MatrixXd rows(k, d);
  const Eigen::VectorXd last = Eigen::VectorXd::Unit(d, d - 1);
  for (;;) {
    ++local.candidates;
    Eigen::VectorXd direction;
    if (k == 0) {
      direction = Eigen::VectorXd::Ones(1);
    } else {
      for (long i = 0; i < k; ++i) rows.row(i) = b.row(zero_set[static_cast<std::size_t>(i)]);
      const double scale = rows.rowwise().norm().maxCoeff();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(rows.transpose());
      bool regular = scale > 0.0;
      for (long i = 0; i < k && regular; ++i)
        regular = std::abs(qr.matrixQR()(i, i)) > 1e-10 * scale;
      if (regular) {
        direction = qr.householderQ() * last;
      } else {
        ++local.degenerate;
      }
    }
    if (direction.size()) {
      const Eigen::VectorXd w = b * direction;
      const double ratio = w.cwiseAbs().sum() / w.norm();
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best_w = w;
      }
    }
    // next (d-1)-subset in lexicographic order
    long i = k - 1;
    while (i >= 0 && zero_set[static_cast<std::size_t>(i)] == N - k + i) --i;
    if (i < 0) break;
    ++zero_set[static_cast<std::size_t>(i)];
    for (long j = i + 1; j < k; ++j) zero_set[static_cast<std::size_t>(j)] = zero_set[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (stats) *stats = local;
  if (best_w.size() == 0) throw NumericError("lambda_min_exact: every zero set was degenerate");

  LambdaResult<double> out;
  out.kind = ValueKind::Exact;
  out.witness = best_w / best_w.norm();
  out.value = out.witness.cwiseAbs().sum() / bounds::measure_scale(N, 1.0, measure);
  return out;
}

namespace {

struct CircleMin {
  double theta = 0.0;
  double value = kInf;
  Eigen::Index coord = -1;
};

// Minimum over the breakpoints in (0, pi) of f(t) = sum_k |a_k cos t + b_k sin t|
// (coordinates with ignore[k] set are left out). Between consecutive
// breakpoints f is a positive sinusoid, hence concave there, so the minimum
// over the whole circle is attained at a breakpoint.
CircleMin circle_min(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const std::vector<char>& ignore) {
  struct Breakpoint {
    double theta;
    Eigen::Index k;
  };
  const Eigen::Index n = a.size();
  std::vector<Breakpoint> bps;
  bps.reserve(static_cast<std::size_t>(n));
  std::vector<double> sgn(static_cast<std::size_t>(n), 0.0);
  double sa = 0.0;
  double sb = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (ignore[static_cast<std::size_t>(k)]) continue;
    const double ak = a(k);
    const double bk = b(k);
    if (ak == 0.0 && bk == 0.0) continue;
    const double s = ak != 0.0 ? (ak > 0.0 ? 1.0 : -1.0) : (bk > 0.0 ? 1.0 : -1.0);
    sgn[static_cast<std::size_t>(k)] = s;
    sa += s * ak;
    sb += s * bk;
    if (ak != 0.0) {
      double t = std::atan2(-ak, bk);
      if (t < 0.0) t += std::numbers::pi;
      if (t >= std::numbers::pi) t -= std::numbers::pi;
      if (t > 0.0) bps.push_back({t, k});
    }
  }
  std::sort(bps.begin(), bps.end(), [](const Breakpoint& x, const Breakpoint& y) {
    return x.theta < y.theta || (x.theta == y.theta && x.k < y.k);
  });
  CircleMin best;
  for (const auto& bp : bps) {
    const double v = std::cos(bp.theta) * sa + std::sin(bp.theta) * sb;
    if (v < best.value) best = {bp.theta, v, bp.k};
    const double s = sgn[static_cast<std::size_t>(bp.k)];
    sa -= 2.0 * s * a(bp.k);
    sb -= 2.0 * s * b(bp.k);
    sgn[static_cast<std::size_t>(bp.k)] = -s;
  }
  return best;
}

// Orthonormal basis of the rows of B indexed by the current zero set.
struct RowSpan {
  Eigen::MatrixXd q;
  Eigen::Index size = 0;

  explicit RowSpan(Eigen::Index d) : q(d, d) {}

  // Adds row r if independent of the span; returns whether it was added.
  bool add(const Eigen::VectorXd& r) {
    const double rn = r.norm();
    if (rn == 0.0 || size >= q.rows()) return false;
    Eigen::VectorXd v = r;
    for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(size) * (q.leftCols(size).transpose() * v);
    const double vn = v.norm();
    if (vn <= 1e-9 * rn) return false;
    q.col(size++) = v / vn;
    return true;
  }

  void project_out(Eigen::VectorXd& v) const {
    for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(size) * (q.leftCols(size).transpose() * v);
  }
};

// Line-search descent for min |By|_1 on the unit sphere that only ever adds
// zero coordinates, ending at a vertex of the section (d-1 independent zeros).
void descend_to_vertex(const Eigen::MatrixXd& b, Eigen::VectorXd& y, std::vector<Eigen::Index>& zeros, Rng& rng) {
  const Eigen::Index n = b.rows();
  const Eigen::Index d = b.cols();
  zeros.clear();
  std::vector<char> ignore(static_cast<std::size_t>(n), 0);
  RowSpan span(d);
  y.normalize();
  Eigen::VectorXd x = b * y;

  auto absorb_zeros = [&](Eigen::Index forced) {
    const double tol = 1e-13 * x.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < n && span.size < d - 1; ++k) {
      if (ignore[static_cast<std::size_t>(k)]) continue;
      if (k != forced && std::abs(x(k)) > tol) continue;
      if (span.add(b.row(k).transpose())) {
        ignore[static_cast<std::size_t>(k)] = 1;
        zeros.push_back(k);
      }
    }
  };
  absorb_zeros(-1);

  for (Eigen::Index guard = 0; span.size < d - 1 && guard < 4 * d; ++guard) {
    Eigen::VectorXd s(n);
    for (Eigen::Index k = 0; k < n; ++k)
      s(k) = ignore[static_cast<std::size_t>(k)] || x(k) == 0.0 ? 0.0 : (x(k) > 0.0 ? 1.0 : -1.0);
    Eigen::VectorXd u = -(b.transpose() * s);
    span.project_out(u);
    u -= y.dot(u) * y;
    if (u.norm() <= 1e-12) {
      for (Eigen::Index i = 0; i < d; ++i) u(i) = rng.normal();
      span.project_out(u);
      u -= y.dot(u) * y;
    }
    if (u.norm() == 0.0) break;
    u.normalize();
    Eigen::VectorXd a = x;
    for (auto k : zeros) a(k) = 0.0;
    const Eigen::VectorXd bu = b * u;
    const CircleMin cm = circle_min(a, bu, ignore);
    if (cm.coord < 0) break;
    y = std::cos(cm.theta) * y + std::sin(cm.theta) * u;
    span.project_out(y);
    y.normalize();
    x = b * y;
    absorb_zeros(cm.coord);
  }
}

// Snaps y onto the null vector of the zero-set rows; returns false if they
// are rank deficient.
bool snap_to_vertex(const Eigen::MatrixXd& b, const std::vector<Eigen::Index>& zeros, Eigen::VectorXd& y) {
  const Eigen::Index d = b.cols();
  if (static_cast<Eigen::Index>(zeros.size()) != d - 1) return false;
  if (d == 1) {
    y = Eigen::VectorXd::Ones(1);
    return true;
  }
  Eigen::MatrixXd m(d - 1, d);
  for (Eigen::Index i = 0; i < d - 1; ++i) m.row(i) = b.row(zeros[static_cast<std::size_t>(i)]);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m.transpose());
  for (Eigen::Index i = 0; i < d - 1; ++i)
    if (std::abs(qr.matrixQR()(i, i)) <= 1e-12) return false;
  Eigen::VectorXd nv = qr.householderQ() * Eigen::VectorXd::Unit(d, d - 1);
  if (nv.dot(y) < 0.0) nv = -nv;
  y = nv;
  return true;
}

// Vertex exchange: release one zero coordinate at a time and take the best
// breakpoint on the resulting great circle; stop when no exchange improves.
void vertex_exchange(const Eigen::MatrixXd& b, Eigen::VectorXd& y, std::vector<Eigen::Index>& zeros, int max_hops) {
  const Eigen::Index n = b.rows();
  const Eigen::Index d = b.cols();
  if (d < 2 || !snap_to_vertex(b, zeros, y)) return;
  std::vector<char> ignore(static_cast<std::size_t>(n), 0);
  double value = (b * y).cwiseAbs().sum();

  for (int hop = 0; max_hops < 0 || hop < max_hops; ++hop) {
    Eigen::MatrixXd m(d - 1, d);
    for (Eigen::Index i = 0; i < d - 1; ++i) m.row(i) = b.row(zeros[static_cast<std::size_t>(i)]);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m.transpose());
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d - 1);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(d - 1).triangularView<Eigen::Upper>();
    // columns of u = pinv(m): m u_i = e_i, u_i orthogonal to y
    const Eigen::MatrixXd u = r.triangularView<Eigen::Upper>().solve(q.transpose()).transpose();
    const Eigen::MatrixXd bu = b * u;
    Eigen::VectorXd a = b * y;
    std::fill(ignore.begin(), ignore.end(), 0);
    for (auto k : zeros) {
      a(k) = 0.0;
      ignore[static_cast<std::size_t>(k)] = 1;
    }
    double best = value;
    Eigen::Index best_i = -1;
    CircleMin best_cm;
    for (Eigen::Index i = 0; i < d - 1; ++i) {
      const Eigen::Index zi = zeros[static_cast<std::size_t>(i)];
      const double un = u.col(i).norm();
      ignore[static_cast<std::size_t>(zi)] = 0;
      const CircleMin cm = circle_min(a, bu.col(i) / un, ignore);
      ignore[static_cast<std::size_t>(zi)] = 1;
      if (cm.coord >= 0 && cm.value < best * (1.0 - 1e-13)) {
        best = cm.value;
        best_i = i;
        best_cm = cm;
      }
    }
    if (best_i < 0) break;
    const Eigen::VectorXd dir = u.col(best_i) / u.col(best_i).norm();
    Eigen::VectorXd trial = std::cos(best_cm.theta) * y + std::sin(best_cm.theta) * dir;
    std::vector<Eigen::Index> trial_zeros = zeros;
    trial_zeros[static_cast<std::size_t>(best_i)] = best_cm.coord;
    if (!snap_to_vertex(b, trial_zeros, trial)) break;
    const double tv = (b * trial).cwiseAbs().sum();
    if (!(tv < value)) break;
    y = trial;
    zeros = std::move(trial_zeros);
    value = tv;
  }
}

// Riemannian gradient descent on sum_k (|x_k|^2 + delta^2)^{p/2}, x = B y,
// with delta driven to zero for p < 2. Keeps the best exact value seen.
template <typename Scalar>
double smooth_min(const MatrixX<Scalar>& b, double p, VectorX<Scalar>& y, int max_iterations) {
  const double n = static_cast<double>(b.rows());
  y.normalize();
  VectorX<Scalar> best_y = y;
  double best = lp_norm(b * y, p);
  std::vector<double> deltas;
  if (p < 2.0) {
    for (double f : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8}) deltas.push_back(f / std::sqrt(n));
  } else {
    deltas.push_back(0.0);
  }
  const int per_stage = std::max(20, max_iterations / static_cast<int>(deltas.size()));
  for (double delta : deltas) {
    const double d2 = delta * delta;
    auto objective = [&](const VectorX<Scalar>& v) {
      const VectorX<Scalar> x = b * v;
      double s = 0.0;
      for (Eigen::Index k = 0; k < x.size(); ++k) s += std::pow(std::norm(x(k)) + d2, 0.5 * p);
      return s;
    };
    double step = -1.0;
    for (int it = 0; it < per_stage; ++it) {
      const VectorX<Scalar> x = b * y;
      VectorX<Scalar> w(x.size());
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double m2 = std::norm(x(k)) + d2;
        w(k) = m2 == 0.0 ? Scalar(0) : x(k) * std::pow(m2, 0.5 * p - 1.0);
      }
      VectorX<Scalar> g = p * (b.adjoint() * w);
      g -= y * Scalar(std::real(y.dot(g)));
      const double gn2 = g.squaredNorm();
      const double f0 = objective(y);
      if (gn2 <= 1e-30 * f0 * f0) break;
      if (step < 0.0) step = 0.1 * f0 / gn2;
      bool accepted = false;
      VectorX<Scalar> next;
      double f1 = f0;
      for (int ls = 0; ls < 60; ++ls) {
        next = (y - step * g).normalized();
        f1 = objective(next);
        if (f1 <= f0 - 1e-4 * step * gn2) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      y = next;
      step *= 2.0;
      const double exact = lp_norm(b * y, p);
      if (exact < best) {
        best = exact;
        best_y = y;
      }
      if (f0 - f1 <= 1e-15 * f0) break;
    }
  }
  y = best_y;
  return best;
}

template <typename Scalar>
std::vector<VectorX<Scalar>> heuristic_starts(const MatrixX<Scalar>& b, const HeuristicOptions& options) {
  const Eigen::Index n = b.rows();
  std::vector<VectorX<Scalar>> starts;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd row_norms = b.rowwise().norm();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return row_norms(i) > row_norms(j); });
  const auto coordinate = std::min<Eigen::Index>(n, std::max(options.restarts, 1));
  for (Eigen::Index i = 0; i < coordinate; ++i) {
    const Eigen::Index k = order[static_cast<std::size_t>(i)];
    if (row_norms(k) == 0.0) break;
    starts.emplace_back(b.row(k).adjoint() / row_norms(k));
  }
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(options.seed, {0x51, static_cast<std::uint64_t>(r)}));
    VectorX<Scalar> y(b.cols());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.gaussian<Scalar>();
    starts.push_back(y.normalized());
  }
  return starts;
}

}  // namespace

template <typename Scalar>
LambdaResult<Scalar> lambda_heuristic(const BasicSubspace<Scalar>& e, double p, Target target, Measure measure,
                                      const HeuristicOptions& options) {
  if (!(p >= 1.0) || std::isinf(p)) throw DomainError("lambda_heuristic: p must be a finite real >= 1");
  const MatrixX<Scalar>& b = e.basis;
  const auto starts = heuristic_starts(b, options);

  struct Run {
    double value = 0.0;
    VectorX<Scalar> y;
  };
  auto runs = parallel_map<Run>(starts.size(), [&](std::size_t s) {
    Run run;
    run.y = starts[s];
    if (target == Target::Max) {
      bool converged = false;
      if constexpr (!is_complex_v<Scalar>) {
        if (p == 1.0) {
          run.value = detail::power_with_polish(b, run.y, options.max_iterations, converged);
          return run;
        }
      }
      run.value = detail::power_2_to_p(b, p, run.y, options.max_iterations, converged);
      return run;
    }
    if constexpr (!is_complex_v<Scalar>) {
      if (p == 1.0) {
        Rng rng(derive_seed(options.seed, {0x7e, static_cast<std::uint64_t>(s)}));
        std::vector<Eigen::Index> zeros;
        descend_to_vertex(b, run.y, zeros, rng);
        vertex_exchange(b, run.y, zeros, options.max_vertex_hops);
        run.value = (b * run.y).cwiseAbs().sum();
        return run;
      }
    }
    run.value = smooth_min(b, p, run.y, options.max_iterations);
    return run;
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s) {
    const bool better = target == Target::Max ? runs[s].value > runs[best].value : runs[s].value < runs[best].value;
    if (better) best = s;
  }
  LambdaResult<Scalar> out;
  out.kind = target == Target::Max ? ValueKind::HeuristicLowerBound : ValueKind::HeuristicUpperBound;
  out.witness = b * runs[best].y.normalized();
  out.witness.normalize();
  out.value = lp_norm(out.witness, p) / bounds::measure_scale(b.rows(), p, measure);
  return out;
}

template <typename Scalar>
double gaussian_l1_mean(const BasicSubspace<Scalar>& e) {
  const double mean_abs = is_complex_v<Scalar> ? 0.5 * std::sqrt(std::numbers::pi) : std::sqrt(2.0 / std::numbers::pi);
  return mean_abs * e.basis.rowwise().norm().sum();
}

template <typename Scalar>
DistortionEstimate<Scalar> evaluate(const BasicSubspace<Scalar>& e, double p, Measure measure,
                                    const EvaluateOptions& options) {
  DistortionEstimate<Scalar> est;
  est.N = static_cast<long>(e.ambient_dim());
  est.d = static_cast<long>(e.dim());
  est.p = p;
  est.measure = measure;
  est.field = field_of<Scalar>();

  bool min_done = false;
  bool max_done = false;
  if constexpr (!is_complex_v<Scalar>) {
    if (options.allow_exact && p == 1.0) {
      if (vertex_candidates(est.N, est.d) <= options.vertex_budget) {
        est.lambda_min = lambda_min_exact(e, measure, options.vertex_budget, &est.vertex_stats);
        min_done = true;
      }
      if (est.N <= options.enumeration_cap) {
        est.lambda_max = lambda_max_exact(e, measure, options.enumeration_cap);
        max_done = true;
      }
    }
  }
  if (!min_done) est.lambda_min = lambda_heuristic(e, p, Target::Min, measure, options.heuristic);
  if (!max_done) est.lambda_max = lambda_heuristic(e, p, Target::Max, measure, options.heuristic);

  // Both witnesses are attained points; either may improve the other side.
  if (est.lambda_max.value < est.lambda_min.value) {
    const auto old_min = est.lambda_min;
    const auto old_max = est.lambda_max;
    if (old_min.kind != ValueKind::Exact) {
      est.lambda_min.value = old_max.value;
      est.lambda_min.witness = old_max.witness;
    }
    if (old_max.kind != ValueKind::Exact) {
      est.lambda_max.value = old_min.value;
      est.lambda_max.witness = old_min.witness;
    }
  }

  BoundCheck& bc = est.bound_check;
  const double tol = 1e-9;
  if (est.vertex_stats.degenerate > 0)
    bc.notes.push_back("degenerate position: " + std::to_string(est.vertex_stats.degenerate) +
                       " rank-deficient zero sets skipped");
  if (p >= 1.0 && p <= 2.0) {
    bc.applicable = true;
    const double scale = bounds::measure_scale(est.N, p, measure);
    bc.thm_upper = bounds::thm2_upper(est.N, est.d, p, est.field) / scale;
    bc.min_ok = est.lambda_min.value <= bc.thm_upper + tol;
    if (!bc.min_ok) {
      if (est.lambda_min.kind == ValueKind::Exact) {
        bc.violation = true;
        bc.notes.push_back("VIOLATION: exact lambda_min above the upper bound");
      } else {
        bc.notes.push_back("heuristic lambda_min above the upper bound (optimizer did not reach the minimum)");
      }
    }
    if (p == 1.0) {
      bc.lambda_prime_lower = bounds::lambda_prime_lower(est.d) / scale;
      bc.max_ok = est.lambda_max.value >= *bc.lambda_prime_lower - tol;
      if (!bc.max_ok) {
        if (est.lambda_max.kind == ValueKind::Exact) {
          bc.violation = true;
          bc.notes.push_back("VIOLATION: exact lambda_max below sqrt(d)");
        } else {
          bc.notes.push_back("heuristic lambda_max below sqrt(d) (optimizer did not reach the maximum)");
        }
      }
      // Every attained value obeys |x|_2 <= |x|_1 <= sqrt(N) |x|_2.
      const double lo = 1.0 / scale;
      const double hi = std::sqrt(static_cast<double>(est.N)) / scale;
      bc.sandwich_ok = est.lambda_min.value >= lo - tol * hi && est.lambda_max.value <= hi + tol * hi &&
                       est.lambda_min.value <= est.lambda_max.value + tol * hi;
      if (!bc.sandwich_ok) {
        bc.violation = true;
        bc.notes.push_back("VIOLATION: l1/l2 sandwich broken");
      }
    }
  }
  if (bc.violation && options.throw_on_violation) {
    std::string msg = "evaluate: theorem check failed for " + e.provenance.describe();
    for (const auto& n : bc.notes) msg += "; " + n;
    throw TheoremViolation(msg);
  }
  return est;
}

template LambdaResult<double> lambda_heuristic<double>(const Subspace&, double, Target, Measure,
                                                       const HeuristicOptions&);
template LambdaResult<Complex> lambda_heuristic<Complex>(const ComplexSubspace&, double, Target, Measure,
                                                         const HeuristicOptions&);
template double gaussian_l1_mean<double>(const Subspace&);
template double gaussian_l1_mean<Complex>(const ComplexSubspace&);
template DistortionEstimate<double> evaluate<double>(const Subspace&, double, Measure, const EvaluateOptions&);
template DistortionEstimate<Complex> evaluate<Complex>(const ComplexSubspace&, double, Measure,
                                                       const EvaluateOptions&);

}  // namespace eucsec
