#include "eucsec/opnorm.hpp"

#include <bit>
#include <string>
#include <vector>

#include "eucsec/detail/power.hpp"
#include "eucsec/norms.hpp"
#include "eucsec/parallel.hpp"
#include "eucsec/random.hpp"

namespace eucsec {

namespace {

constexpr int kChunkBits = 12;

// bit j of mask set <=> eps(j+1) = -1; eps(0) is always +1.
Eigen::VectorXd signs_from_mask(std::uint64_t mask, Eigen::Index m) {
  Eigen::VectorXd eps = Eigen::VectorXd::Ones(m);
  for (Eigen::Index j = 1; j < m; ++j)
    if ((mask >> (j - 1)) & 1ULL) eps(j) = -1.0;
  return eps;
}

// Lexicographic order on sign vectors with -1 < +1.
bool lex_less(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t diff = a ^ b;
  if (diff == 0) return false;
  const std::uint64_t lowest = diff & (~diff + 1);
  return (a & lowest) != 0;
}

double objective_value(const Eigen::VectorXd& v, SignObjective objective) {
  return objective == SignObjective::L1 ? v.cwiseAbs().sum() : v.squaredNorm();
}

struct ChunkBest {
  double value = -1.0;
  std::uint64_t mask = 0;
};

void check_cap(Eigen::Index m, int cap, const char* who) {
  if (cap > kMaxEnumerationCap) throw DomainError(std::string(who) + ": cap above the hard maximum");
  if (m > cap)
    throw CapExceededError(std::string(who) + ": enumeration over " + std::to_string(m) +
                           " signs exceeds the cap of " + std::to_string(cap) + "; use the heuristic variant");
}

}  // namespace

SignSearchResult max_over_signs(const Eigen::MatrixXd& m, SignObjective objective, int cap) {
  const Eigen::Index cols = m.cols();
  if (cols < 1) throw DomainError("max_over_signs: empty matrix");
  if (!m.allFinite()) throw NumericError("max_over_signs: non-finite entries");
  check_cap(cols, cap, "max_over_signs");

  const std::uint64_t total = 1ULL << (cols - 1);
  const std::uint64_t chunk = std::min<std::uint64_t>(total, 1ULL << kChunkBits);
  const std::uint64_t chunks = total / chunk;

  auto bests = parallel_map<ChunkBest>(chunks, [&](std::size_t c) {
    ChunkBest best;
    const std::uint64_t begin = c * chunk;
    std::uint64_t mask = begin ^ (begin >> 1);
    Eigen::VectorXd eps = signs_from_mask(mask, cols);
    Eigen::VectorXd v = m * eps;
    for (std::uint64_t i = begin;; ++i) {
      const double val = objective_value(v, objective);
      if (val > best.value || (val == best.value && lex_less(mask, best.mask))) {
        best.value = val;
        best.mask = mask;
      }
      if (i + 1 == begin + chunk) break;
      const int bit = std::countr_zero(i + 1);
      const Eigen::Index j = bit + 1;
      v.noalias() -= (2.0 * eps(j)) * m.col(j);
      eps(j) = -eps(j);
      mask ^= 1ULL << bit;
    }
    return best;
  });

  ChunkBest best = bests.front();
  for (const auto& b : bests)
    if (b.value > best.value || (b.value == best.value && lex_less(b.mask, best.mask))) best = b;

  SignSearchResult out;
  out.eps = signs_from_mask(best.mask, cols);
  const Eigen::VectorXd image = m * out.eps;
  out.value = objective == SignObjective::L1 ? image.cwiseAbs().sum() : image.norm();
  return out;
}

InfToOneResult opnorm_inf_to_1(const Eigen::MatrixXd& a, int cap) {
  if (a.size() == 0) throw DomainError("opnorm_inf_to_1: empty matrix");
  InfToOneResult out;
  auto sign_of = [](const Eigen::VectorXd& v) {
    return v.unaryExpr([](double t) { return t < 0.0 ? -1.0 : 1.0; }).eval();
  };
  if (a.cols() <= a.rows()) {
    const auto r = max_over_signs(a, SignObjective::L1, cap);
    out.eps = r.eps;
    out.eps_prime = sign_of(a * r.eps);
  } else {
    const Eigen::MatrixXd at = a.transpose();
    const auto r = max_over_signs(at, SignObjective::L1, cap);
    out.eps_prime = r.eps;
    out.eps = sign_of(at * r.eps);
  }
  out.value = out.eps_prime.dot(a * out.eps);
  return out;
}

namespace {

template <typename Scalar>
VectorX<Scalar> random_unit(Rng& rng, Eigen::Index n) {
  VectorX<Scalar> x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.gaussian<Scalar>();
  const double nx = x.norm();
  if (nx == 0.0) x(0) = Scalar(1);
  return x / std::max(nx, 1e-300);
}

template <typename Scalar>
std::vector<VectorX<Scalar>> singular_starts(const MatrixX<Scalar>& b, Eigen::Index count) {
  Eigen::BDCSVD<MatrixX<Scalar>> svd(b, Eigen::ComputeThinV);
  std::vector<VectorX<Scalar>> out;
  const auto k = std::min<Eigen::Index>(count, svd.matrixV().cols());
  for (Eigen::Index i = 0; i < k; ++i) out.emplace_back(svd.matrixV().col(i));
  return out;
}

template <typename Scalar>
OpNormResult<Scalar> exact_2_to_p(const MatrixX<Scalar>& b, double p, const OpNormOptions& options) {
  OpNormResult<Scalar> out;
  out.kind = ValueKind::Exact;
  if (p == 2.0) {
    Eigen::BDCSVD<MatrixX<Scalar>> svd(b, Eigen::ComputeThinV);
    out.value = svd.singularValues()(0);
    out.witness = svd.matrixV().col(0);
    return out;
  }
  if constexpr (is_complex_v<Scalar>) {
    throw DomainError("opnorm_2_to_p: exact mode is real-only at p = 1");
  } else {
    if (p != 1.0) throw DomainError("opnorm_2_to_p: exact mode requires p = 1 or p = 2");
    const Eigen::MatrixXd bt = b.transpose();
    const auto r = max_over_signs(bt, SignObjective::L2, options.cap);
    const Eigen::VectorXd v = bt * r.eps;
    out.value = r.value;
    out.witness = v / v.norm();
    return out;
  }
}

}  // namespace

template <typename Scalar>
OpNormResult<Scalar> opnorm_2_to_p(const MatrixX<Scalar>& b, double p, const OpNormOptions& options) {
  if (b.size() == 0) throw DomainError("opnorm_2_to_p: empty matrix");
  if (!b.allFinite()) throw NumericError("opnorm_2_to_p: non-finite entries");
  if (!(p >= 1.0 && p <= 2.0)) throw DomainError("opnorm_2_to_p: p must lie in [1, 2]");
  if (options.mode == NormMode::Exact) return exact_2_to_p(b, p, options);

  std::vector<VectorX<Scalar>> starts = singular_starts(b, 3);
  for (int k = 0; k < options.restarts; ++k) {
    Rng rng(derive_seed(options.seed, {0x2b, static_cast<std::uint64_t>(k)}));
    starts.push_back(random_unit<Scalar>(rng, b.cols()));
  }

  struct Run {
    double value = -1.0;
    VectorX<Scalar> x;
    bool converged = false;
  };
  auto runs = parallel_map<Run>(starts.size(), [&](std::size_t s) {
    Run r;
    r.x = starts[s];
    if constexpr (!is_complex_v<Scalar>) {
      if (p == 1.0) {
        r.value = detail::power_with_polish(b, r.x, options.max_iterations, r.converged);
        return r;
      }
    }
    r.value = detail::power_2_to_p(b, p, r.x, options.max_iterations, r.converged);
    return r;
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s)
    if (runs[s].value > runs[best].value) best = s;
  OpNormResult<Scalar> out;
  out.witness = runs[best].x;
  out.value = lp_norm(b * out.witness, p);
  out.kind = ValueKind::HeuristicLowerBound;
  out.converged = runs[best].converged;
  return out;
}


template <typename Scalar>
OpNormResult<Scalar> opnorm_pprime_to_p(const MatrixX<Scalar>& a, double p, const OpNormOptions& options) {
  if (a.size() == 0) throw DomainError("opnorm_pprime_to_p: empty matrix");
  if (!a.allFinite()) throw NumericError("opnorm_pprime_to_p: non-finite entries");
  if (!(p > 1.0 && p < 2.0)) throw DomainError("opnorm_pprime_to_p: p must lie strictly inside (1, 2)");
  const double q = conjugate_exponent(p);

  std::vector<VectorX<Scalar>> starts;
  starts.push_back(VectorX<Scalar>::Ones(a.cols()));
  for (auto& v : singular_starts(a, 3)) starts.push_back(std::move(v));
  for (int k = 0; k < options.restarts; ++k) {
    Rng rng(derive_seed(options.seed, {0x3c, static_cast<std::uint64_t>(k)}));
    starts.push_back(random_unit<Scalar>(rng, a.cols()));
  }

  struct Run {
    double value = -1.0;
    VectorX<Scalar> x;
    bool converged = false;
  };
  auto runs = parallel_map<Run>(starts.size(), [&](std::size_t s) {
    Run r;
    r.x = starts[s];
    if (r.x.norm() == 0.0) r.x(0) = Scalar(1);
    r.value = detail::power_pprime_to_p(a, p, q, r.x, options.max_iterations, r.converged);
    return r;
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s)
    if (runs[s].value > runs[best].value) best = s;
  OpNormResult<Scalar> out;
  out.witness = runs[best].x;
  out.value = lp_norm(a * out.witness, p) / lp_norm(out.witness, q);
  out.kind = ValueKind::HeuristicLowerBound;
  out.converged = runs[best].converged;
  return out;
}

template OpNormResult<double> opnorm_2_to_p<double>(const Eigen::MatrixXd&, double, const OpNormOptions&);
template OpNormResult<Complex> opnorm_2_to_p<Complex>(const Eigen::MatrixXcd&, double, const OpNormOptions&);
template OpNormResult<double> opnorm_pprime_to_p<double>(const Eigen::MatrixXd&, double, const OpNormOptions&);
template OpNormResult<Complex> opnorm_pprime_to_p<Complex>(const Eigen::MatrixXcd&, double, const OpNormOptions&);

}  // namespace eucsec
