#ifndef EUCSEC_HARNESS_RUNNER_HPP
#define EUCSEC_HARNESS_RUNNER_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eucsec/harness/experiment.hpp"
#include "eucsec/harness/report.hpp"

namespace eucsec::harness {

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitParse = 2, kExitCap = 3, kExitRuntime = 4 };

struct RunResult {
  Table table;
  json extras = json::object();  // mode-specific summaries (per-cell minima, ...)
  long instances = 0;
  long violations = 0;
};

/// Executes the sweep in memory. Rows come out in grid order regardless of the
/// thread count.
RunResult run_experiment(const ExperimentSpec& spec);

/// thm_upper / lambda_prime_lower / meyer_pajor / sphere-average table.
Table bounds_table(const std::vector<GridCell>& cells, const std::vector<double>& p_list, Field field,
                   Measure measure);

/// Rows with a fail flag: the violation column, or for conjecture rows an
/// Exact lhs below the rhs by more than the confirmation tolerance.
long count_violations(const Table& t);

struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> cap;
  std::optional<OutputFormat> format;
};

/// Loads, runs, writes <dir>/<name>.csv|.json plus <name>.manifest.json, and
/// maps outcomes to exit codes (0 ok, 1 theorem violation, 2 parse error,
/// 3 cap violation, 4 other runtime failure). Messages go to log.
int run_spec_file(const std::string& path, const RunOverrides& overrides, std::ostream& log);

/// Human-readable summary of a generated subspace.
std::string describe(const std::string& generator, const json& params, std::uint64_t seed);

}  // namespace eucsec::harness

#endif
