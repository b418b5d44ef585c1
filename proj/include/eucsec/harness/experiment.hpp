#ifndef EUCSEC_HARNESS_EXPERIMENT_HPP
#define EUCSEC_HARNESS_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eucsec/core.hpp"
#include "eucsec/generators.hpp"
#include "eucsec/subspace.hpp"

namespace eucsec::harness {

using json = nlohmann::ordered_json;

enum class Mode { Bounds, Distortion, Conjecture, Kashin, LambdaP };
const char* to_string(Mode m);
Mode parse_mode(const std::string& s);

enum class OutputFormat { Csv, Json, Both };
OutputFormat parse_format(const std::string& s);

using AnySubspace = std::variant<Subspace, ComplexSubspace>;

/// Build a subspace from a generator name and a JSON object of parameters.
/// Names: gaussian {N, d, field}, coordinate {N, d}, trig {N},
/// spherical {d, M}, character {N, S | construction: sidon|random, size, field}.
/// Throws ParseError for unknown names or missing/ill-typed parameters.
AnySubspace make_subspace(const std::string& generator, const json& params, std::uint64_t seed);

/// The frequency set a character generator call would use (for reporting).
gen::FrequencySet frequency_set_for(const json& params, std::uint64_t seed);

const std::vector<std::string>& generator_names();

struct Budgets {
  int restarts = 50;
  int enumeration_cap = 20;
  long long vertex_budget = 1LL << 22;
  int escalation_factor = 100;
  int max_vertex_hops = -1;
};

struct ExperimentSpec {
  std::string name;
  Mode mode = Mode::Distortion;

  // Generator and its parameter grid: every key maps to a list of values; the
  // sweep is the Cartesian product in key order. A "d" value may be the string
  // "all" (1..N), "half" (N/2) or "N"; cells with d > N are skipped.
  std::string generator;
  json grid = json::object();

  std::vector<double> p{1.0};
  Measure measure = Measure::Counting;
  Field field = Field::Real;
  std::uint64_t base_seed = 0;
  int seed_count = 1;
  Budgets budgets;

  // conjecture
  std::string variant = "B";
  std::vector<std::string> families;
  int instances_per_cell = 100;
  long min_size = 2;
  long max_size = 8;

  // kashin
  std::vector<double> eta;

  std::string output_dir = ".";
  OutputFormat format = OutputFormat::Both;

  std::string source_text;  // bytes of the spec file, for the manifest hash
};

/// Parses YAML (or JSON, which is a subset the parser also accepts when the
/// text starts with '{') and validates. Throws ParseError.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::string& path);

/// Raises ParseError for malformed fields and CapExceededError for caps above
/// the module maxima.
void validate(const ExperimentSpec& spec);

/// One point of the generator grid, values resolved.
struct GridCell {
  json params = json::object();
  std::string key;  // "k=v;k=v", stable text used for seed derivation
};
std::vector<GridCell> expand_grid(const json& grid);

/// Converts a "k=v" list (CLI form) to a parameter object; v is parsed as JSON
/// when possible and kept as a string otherwise.
json params_from_pairs(const std::vector<std::string>& pairs);

}  // namespace eucsec::harness

#endif
