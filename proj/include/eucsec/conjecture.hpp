#ifndef EUCSEC_CONJECTURE_HPP
#define EUCSEC_CONJECTURE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eucsec/core.hpp"
#include "eucsec/opnorm.hpp"

/// Checks of the summing-norm inequalities
///   (B)  |B : l_2 -> l_p|     >= |B|_{S_r},  r = 2p/(2-p)
///   (C)  |A : l_p' -> l_p|    >= |A|_{S_r},  r = p/(2-p), A positive semi-definite
/// At p = 1 both are theorems (tr A <= |A|_{inf->1} and |T|_HS <= |T|_{2->1})
/// and are evaluated exactly; for p in (1, 2) the left side is a multi-start
/// lower bound, so a negative slack is evidence, never a proof.
namespace eucsec::conj {

enum class Variant { B, C };
enum class Status { Confirmed, Undecided, CandidateCounterexample };

const char* to_string(Variant v);
const char* to_string(Status s);
Variant parse_variant(const std::string& s);

/// r as a function of p for each variant.
double exponent_r(Variant v, double p);

struct TraceLemmaResult {
  double trace = 0.0;
  double norm = 0.0;  // |T T^T|_{inf->1}
  bool holds = true;
  Eigen::VectorXd witness;  // sign vector attaining norm
};

/// tr(T T^T) <= |T T^T|_{inf->1}, exact. Throws TheoremViolation if it fails,
/// CapExceededError if T has more rows than cap.
TraceLemmaResult trace_lemma_check(const Eigen::MatrixXd& t, int cap = kDefaultEnumerationCap);

struct HsResult {
  double hs = 0.0;
  double norm21 = 0.0;
  bool holds = true;
};

/// |T|_HS <= |T : l_2 -> l_1|, exact. Same error behavior as trace_lemma_check.
HsResult hs_vs_21_check(const Eigen::MatrixXd& t, int cap = kDefaultEnumerationCap);

struct ConjectureInstance {
  Variant variant = Variant::B;
  double p = 1.5;
  double r = 6.0;
  Eigen::MatrixXd matrix;
  double lhs = 0.0;
  ValueKind lhs_kind = ValueKind::HeuristicLowerBound;
  Eigen::VectorXd witness;  // attains lhs (unit in the domain norm)
  double rhs = 0.0;
  double slack = 0.0;
  Status status = Status::Undecided;
  bool escalated = false;
  /// Exact lhs below rhs at an endpoint where the inequality is proven.
  bool theorem_violation = false;
  std::string diagnostics;
};

struct InstanceOptions {
  int restarts = 50;
  std::uint64_t seed = 0;
  int cap = kDefaultEnumerationCap;
  bool escalate = true;
  int escalation_factor = 100;
  int max_iterations = 2000;
};

/// Slack allowed below zero when declaring Confirmed. Exact lhs: 1e-9.
/// Heuristic lhs: rounding only, 1e-12 max(1, rhs).
double confirm_tolerance(ValueKind kind, double rhs);

/// p in [1, 2]. Variant C symmetrizes nothing: A must be symmetric, and its
/// eigenvalues are clipped at 0 when they lie in [-1e-10, 0).
ConjectureInstance evaluate_instance(Variant variant, double p, const Eigen::MatrixXd& matrix,
                                     const InstanceOptions& options = {});

/// Recomputes the left-hand side from the stored witness.
double reevaluate_lhs(const ConjectureInstance& inst);

enum class Family { Gaussian, PsdWishart, OrthogonalProjection, Circulant, SparseSigns, Diagonal };
const char* to_string(Family f);
Family parse_family(const std::string& s);
const std::vector<Family>& all_families();

/// One random n x n member of a family. For variant C, families that are not
/// positive semi-definite by construction are replaced by M M^T.
Eigen::MatrixXd sample_family(Family family, long n, Variant variant, std::uint64_t seed);

struct SearchOptions {
  Variant variant = Variant::B;
  std::vector<double> p_grid{1.25, 1.5, 1.75};
  std::vector<Family> families = all_families();
  int instances_per_cell = 100;
  std::uint64_t seed = 0;
  int restarts = 20;
  int escalation_factor = 100;
  long min_size = 2;
  long max_size = 8;
  int cap = kDefaultEnumerationCap;
};

struct LeaderboardRow {
  Variant variant = Variant::B;
  double p = 0.0;
  double r = 0.0;
  Family family = Family::Gaussian;
  std::uint64_t seed = 0;
  long instance_id = 0;
  long n = 0;
  double lhs = 0.0;
  ValueKind lhs_kind = ValueKind::HeuristicLowerBound;
  double rhs = 0.0;
  double slack = 0.0;
  Status status = Status::Undecided;
  bool theorem_violation = false;
};

struct CellSummary {
  double p = 0.0;
  Family family = Family::Gaussian;
  double min_slack = 0.0;
  long instances = 0;
  long confirmed = 0;
  long undecided = 0;
  long candidates = 0;
};

struct SearchResult {
  std::vector<LeaderboardRow> leaderboard;  // ascending slack, then instance id
  std::vector<CellSummary> cells;           // grid order
  long theorem_violations = 0;
};

/// Instance k of cell (p, family) uses seed derive_seed(base, {variant, p, family, k})
/// and instance id cell_index * instances_per_cell + k.
SearchResult search(const SearchOptions& options);

/// variant,p,r,family,seed,instance_id,lhs,lhs_kind,rhs,slack,status
void write_leaderboard_csv(std::ostream& out, const std::vector<LeaderboardRow>& rows);

}  // namespace eucsec::conj

#endif
