#include "eucsec/conjecture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>

#include "eucsec/detail/power.hpp"
#include "eucsec/generators.hpp"
#include "eucsec/norms.hpp"
#include "eucsec/parallel.hpp"
#include "eucsec/random.hpp"

namespace eucsec::conj {

const char* to_string(Variant v) { return v == Variant::B ? "B" : "C"; }

const char* to_string(Status s) {
  switch (s) {
    case Status::Confirmed:
      return "Confirmed";
    case Status::Undecided:
      return "Undecided";
    case Status::CandidateCounterexample:
      return "CandidateCounterexample";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "B" || s == "b") return Variant::B;
  if (s == "C" || s == "c") return Variant::C;
  throw ParseError("unknown conjecture variant '" + s + "' (expected B or C)");
}

double exponent_r(Variant v, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw DomainError("exponent_r: p must lie in [1, 2]");
  if (p == 2.0) return kInf;
  return v == Variant::B ? 2.0 * p / (2.0 - p) : p / (2.0 - p);
}

TraceLemmaResult trace_lemma_check(const Eigen::MatrixXd& t, int cap) {
  if (t.size() == 0) throw DomainError("trace_lemma_check: empty matrix");
  if (t.rows() > cap) throw CapExceededError("trace_lemma_check: T has more rows than the enumeration cap");
  const Eigen::MatrixXd a = t * t.transpose();
  const auto r = opnorm_inf_to_1(a, cap);
  TraceLemmaResult out;
  out.trace = a.trace();
  out.norm = r.value;
  out.witness = r.eps;
  out.holds = out.trace <= out.norm + 1e-9 * std::max(1.0, out.norm);
  if (!out.holds) throw TheoremViolation("trace lemma failed: tr = " + std::to_string(out.trace) +
                                         " > norm = " + std::to_string(out.norm));
  return out;
}

HsResult hs_vs_21_check(const Eigen::MatrixXd& t, int cap) {
  if (t.size() == 0) throw DomainError("hs_vs_21_check: empty matrix");
  OpNormOptions o;
  o.mode = NormMode::Exact;
  o.cap = cap;
  HsResult out;
  out.hs = schatten_norm(t, 2.0);
  out.norm21 = opnorm_2_to_p<double>(t, 1.0, o).value;
  out.holds = out.hs <= out.norm21 + 1e-9;
  if (!out.holds) throw TheoremViolation("HS bound failed: hs = " + std::to_string(out.hs) +
                                         " > norm21 = " + std::to_string(out.norm21));
  return out;
}

double confirm_tolerance(ValueKind kind, double rhs) {
  return kind == ValueKind::Exact ? 1e-9 : 1e-12 * std::max(1.0, rhs);
}

namespace {

Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DomainError("variant C needs a square matrix");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("variant C needs a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw NumericError("eigen decomposition failed");
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -1e-10) throw DomainError("variant C needs a positive semi-definite matrix (min eigenvalue " +
                                     std::to_string(lo) + ")");
  if (lo >= 0.0) return a;
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// lhs of the instance at x (x need not be normalized).
double lhs_at(Variant v, double p, const Eigen::MatrixXd& m, const Eigen::VectorXd& x) {
  if (v == Variant::B) return lp_norm(m * x, p) / x.norm();
  return lp_norm(m * x, p) / lp_norm(x, conjugate_exponent(p));
}

OpNormResult<double> heuristic_lhs(Variant v, double p, const Eigen::MatrixXd& m, int restarts, std::uint64_t seed,
                                   int max_iterations) {
  OpNormOptions o;
  o.mode = NormMode::Heuristic;
  o.restarts = restarts;
  o.seed = seed;
  o.max_iterations = max_iterations;
  if (v == Variant::B) return opnorm_2_to_p<double>(m, p, o);
  return opnorm_pprime_to_p<double>(m, p, o);
}

// Local refinement around the best witness: random kicks of decreasing size,
// each followed by the same power iteration. Keeps the best attained value.
void perturbation_polish(Variant v, double p, const Eigen::MatrixXd& m, OpNormResult<double>& best,
                         std::uint64_t seed, int max_iterations) {
  Rng rng(seed);
  const double q = conjugate_exponent(p);
  for (double sigma : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    for (int k = 0; k < 8; ++k) {
      Eigen::VectorXd x = best.witness;
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += sigma * rng.normal();
      if (x.norm() == 0.0) continue;
      bool conv = false;
      double val = 0.0;
      if (v == Variant::B) {
        val = (p == 1.0) ? detail::power_with_polish(m, x, max_iterations, conv)
                         : detail::power_2_to_p(m, p, x, max_iterations, conv);
      } else {
        val = detail::power_pprime_to_p(m, p, q, x, max_iterations, conv);
      }
      val = lhs_at(v, p, m, x);
      if (val > best.value) {
        best.value = val;
        best.witness = v == Variant::B ? Eigen::VectorXd(x / x.norm()) : Eigen::VectorXd(x / lp_norm(x, q));
        best.converged = conv;
      }
    }
  }
}

}  // namespace

ConjectureInstance evaluate_instance(Variant variant, double p, const Eigen::MatrixXd& matrix,
                                     const InstanceOptions& options) {
  if (matrix.size() == 0) throw DomainError("evaluate_instance: empty matrix");
  if (!matrix.allFinite()) throw NumericError("evaluate_instance: non-finite entries");
  ConjectureInstance inst;
  inst.variant = variant;
  inst.p = p;
  inst.r = exponent_r(variant, p);
  inst.matrix = variant == Variant::C ? clip_psd(matrix) : matrix;
  const Eigen::MatrixXd& m = inst.matrix;

  inst.rhs = schatten_norm(m, inst.r);

  bool exact = false;
  if (p == 2.0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
    inst.lhs = svd.singularValues()(0);
    inst.witness = svd.matrixV().col(0);
    exact = true;
  } else if (p == 1.0 && variant == Variant::B && m.rows() <= options.cap) {
    OpNormOptions o;
    o.mode = NormMode::Exact;
    o.cap = options.cap;
    const auto r = opnorm_2_to_p<double>(m, 1.0, o);
    inst.lhs = r.value;
    inst.witness = r.witness;
    exact = true;
  } else if (p == 1.0 && variant == Variant::C && std::min(m.rows(), m.cols()) <= options.cap) {
    const auto r = opnorm_inf_to_1(m, options.cap);
    inst.lhs = r.value;
    inst.witness = r.eps;
    exact = true;
  } else if (p == 1.0 && variant == Variant::C) {
    throw CapExceededError("variant C at p = 1 needs exhaustive sign enumeration; matrix exceeds the cap");
  }

  if (exact) {
    inst.lhs_kind = ValueKind::Exact;
    inst.slack = inst.lhs - inst.rhs;
    if (inst.slack >= -confirm_tolerance(ValueKind::Exact, inst.rhs)) {
      inst.status = Status::Confirmed;
    } else {
      inst.status = Status::CandidateCounterexample;
      inst.theorem_violation = true;
      inst.diagnostics = "exact left side below the Schatten norm at a proven endpoint";
    }
    return inst;
  }

  auto best = heuristic_lhs(variant, p, m, options.restarts, options.seed, options.max_iterations);
  inst.lhs_kind = ValueKind::HeuristicLowerBound;
  auto settle = [&] {
    inst.lhs = best.value;
    inst.witness = best.witness;
    inst.slack = inst.lhs - inst.rhs;
    return inst.slack >= -confirm_tolerance(ValueKind::HeuristicLowerBound, inst.rhs);
  };
  if (settle()) {
    inst.status = Status::Confirmed;
    return inst;
  }
  if (!options.escalate) {
    inst.status = Status::Undecided;
    inst.diagnostics = "restart budget exhausted with negative slack " + std::to_string(inst.slack);
    return inst;
  }

  inst.escalated = true;
  const int more = options.restarts * std::max(1, options.escalation_factor);
  auto wide = heuristic_lhs(variant, p, m, more, derive_seed(options.seed, {0xe5ca1a7e}), options.max_iterations);
  if (wide.value > best.value) best = std::move(wide);
  perturbation_polish(variant, p, m, best, derive_seed(options.seed, {0x9017}), options.max_iterations);
  if (settle()) {
    inst.status = Status::Confirmed;
    inst.diagnostics = "confirmed after escalation";
  } else {
    inst.status = Status::CandidateCounterexample;
    inst.diagnostics = "negative slack survived " + std::to_string(more) +
                       " restarts and perturbation polish; lhs is only a lower bound";
  }
  return inst;
}

double reevaluate_lhs(const ConjectureInstance& inst) {
  if (inst.witness.size() == 0) throw DomainError("reevaluate_lhs: instance has no witness");
  if (inst.variant == Variant::C && inst.p == 1.0)
    return (inst.matrix * inst.witness).cwiseAbs().sum() / inst.witness.cwiseAbs().maxCoeff();
  if (inst.variant == Variant::C && inst.p == 2.0) return (inst.matrix * inst.witness).norm() / inst.witness.norm();
  return lhs_at(inst.variant, inst.p, inst.matrix, inst.witness);
}

const char* to_string(Family f) {
  switch (f) {
    case Family::Gaussian:
      return "gaussian";
    case Family::PsdWishart:
      return "psd-wishart";
    case Family::OrthogonalProjection:
      return "orthogonal-projection";
    case Family::Circulant:
      return "circulant";
    case Family::SparseSigns:
      return "sparse-signs";
    case Family::Diagonal:
      return "diagonal";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  for (auto f : all_families())
    if (s == to_string(f)) return f;
  if (s == "sparse+-1" || s == "sparse±1") return Family::SparseSigns;
  throw ParseError("unknown matrix family '" + s + "'");
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> f{Family::Gaussian,  Family::PsdWishart,  Family::OrthogonalProjection,
                                     Family::Circulant, Family::SparseSigns, Family::Diagonal};
  return f;
}

Eigen::MatrixXd sample_family(Family family, long n, Variant variant, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_family: n must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd m;
  bool psd = false;
  switch (family) {
    case Family::Gaussian:
      m = rng.gaussian_matrix<double>(n, n);
      break;
    case Family::PsdWishart: {
      const Eigen::MatrixXd g = rng.gaussian_matrix<double>(n, n);
      m = g * g.transpose();
      psd = true;
      break;
    }
    case Family::OrthogonalProjection: {
      const long k = 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(n)));
      const auto e = gen::gaussian_subspace<double>(n, k, rng.bits());
      m = e.basis * e.basis.transpose();
      psd = true;
      break;
    }
    case Family::Circulant: {
      Eigen::VectorXd c(n);
      for (long i = 0; i < n; ++i) c(i) = rng.normal();
      m.resize(n, n);
      for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) m(i, j) = c((j - i + n) % n);
      break;
    }
    case Family::SparseSigns: {
      m = Eigen::MatrixXd::Zero(n, n);
      for (long j = 0; j < n; ++j)
        for (long i = 0; i < n; ++i)
          if (rng.uniform() < 0.3) m(i, j) = rng.uniform() < 0.5 ? -1.0 : 1.0;
      if (m.cwiseAbs().sum() == 0.0) m(rng.below(static_cast<std::uint64_t>(n)), 0) = 1.0;
      break;
    }
    case Family::Diagonal: {
      m = Eigen::MatrixXd::Zero(n, n);
      for (long i = 0; i < n; ++i) m(i, i) = rng.normal();
      break;
    }
  }
  if (variant == Variant::C && !psd) {
    m = m * m.transpose();
    m = 0.5 * (m + m.transpose());
  }
  return m;
}

SearchResult search(const SearchOptions& options) {
  if (options.p_grid.empty() || options.families.empty()) throw DomainError("search: empty grid");
  if (options.instances_per_cell < 1) throw DomainError("search: instances_per_cell must be >= 1");
  if (options.min_size < 1 || options.max_size < options.min_size) throw DomainError("search: bad size range");

  struct Job {
    std::size_t cell;
    double p;
    Family family;
    long k;
  };
  std::vector<Job> jobs;
  SearchResult out;
  for (double p : options.p_grid) {
    exponent_r(options.variant, p);  // validates p
    for (Family f : options.families) {
      out.cells.push_back(CellSummary{p, f, kInf, 0, 0, 0, 0});
      for (long k = 0; k < options.instances_per_cell; ++k) jobs.push_back(Job{out.cells.size() - 1, p, f, k});
    }
  }

  auto rows = parallel_map<LeaderboardRow>(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    std::uint64_t pbits = 0;
    static_assert(sizeof(pbits) == sizeof(job.p));
    std::memcpy(&pbits, &job.p, sizeof pbits);
    const std::uint64_t seed =
        derive_seed(options.seed, {static_cast<std::uint64_t>(options.variant), pbits,
                                   static_cast<std::uint64_t>(job.family), static_cast<std::uint64_t>(job.k)});
    Rng rng(seed);
    const long span = options.max_size - options.min_size + 1;
    const long n = options.min_size + static_cast<long>(rng.below(static_cast<std::uint64_t>(span)));
    const Eigen::MatrixXd m = sample_family(job.family, n, options.variant, rng.bits());
    InstanceOptions io;
    io.restarts = options.restarts;
    io.seed = rng.bits();
    io.cap = options.cap;
    io.escalation_factor = options.escalation_factor;
    const auto inst = evaluate_instance(options.variant, job.p, m, io);
    LeaderboardRow row;
    row.variant = options.variant;
    row.p = job.p;
    row.r = inst.r;
    row.family = job.family;
    row.seed = seed;
    row.instance_id = static_cast<long>(job.cell) * options.instances_per_cell + job.k;
    row.n = n;
    row.lhs = inst.lhs;
    row.lhs_kind = inst.lhs_kind;
    row.rhs = inst.rhs;
    row.slack = inst.slack;
    row.status = inst.status;
    row.theorem_violation = inst.theorem_violation;
    return row;
  });

  for (const auto& row : rows) {
    auto& c = out.cells[static_cast<std::size_t>(row.instance_id / options.instances_per_cell)];
    c.min_slack = std::min(c.min_slack, row.slack);
    ++c.instances;
    if (row.status == Status::Confirmed) ++c.confirmed;
    if (row.status == Status::Undecided) ++c.undecided;
    if (row.status == Status::CandidateCounterexample) ++c.candidates;
    if (row.theorem_violation) ++out.theorem_violations;
  }
  std::sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.slack != b.slack) return a.slack < b.slack;
    return a.instance_id < b.instance_id;
  });
  out.leaderboard = std::move(rows);
  return out;
}

void write_leaderboard_csv(std::ostream& out, const std::vector<LeaderboardRow>& rows) {
  out << "variant,p,r,family,seed,instance_id,lhs,lhs_kind,rhs,slack,status\n";
  char buf[512];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%s,%llu,%ld,%.17g,%s,%.17g,%.17g,%s\n", to_string(row.variant),
                  row.p, row.r, to_string(row.family), static_cast<unsigned long long>(row.seed), row.instance_id,
                  row.lhs, eucsec::to_string(row.lhs_kind), row.rhs, row.slack, to_string(row.status));
    out << buf;
  }
}

}  // namespace eucsec::conj
