#include "eucsec/harness/runner.hpp"

#include <chrono>
#include <iomanip>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "eucsec/bounds.hpp"
#include "eucsec/conjecture.hpp"
#include "eucsec/distortion.hpp"
#include "eucsec/generators.hpp"
#include "eucsec/parallel.hpp"
#include "eucsec/random.hpp"

namespace eucsec::harness {

namespace {

Cell opt_cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(std::monostate{}); }

std::uint64_t p_tag(double p) { return hash_string(format_double(p)); }

EvaluateOptions evaluate_options(const ExperimentSpec& spec, std::uint64_t seed) {
  EvaluateOptions eo;
  eo.enumeration_cap = spec.budgets.enumeration_cap;
  eo.vertex_budget = spec.budgets.vertex_budget;
  eo.heuristic.restarts = spec.budgets.restarts;
  eo.heuristic.max_vertex_hops = spec.budgets.max_vertex_hops;
  eo.heuristic.seed = seed;
  eo.throw_on_violation = false;
  return eo;
}

struct Job {
  std::size_t cell = 0;
  int replicate = 0;
};

std::vector<Job> jobs_for(std::size_t cells, int replicates) {
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells; ++c)
    for (int k = 0; k < replicates; ++k) jobs.push_back(Job{c, k});
  return jobs;
}

// Only generators that consume randomness get more than one replicate.
bool seeded(const std::string& generator, const json& params) {
  if (generator == "gaussian" || generator == "spherical") return true;
  if (generator == "character")
    return !params.contains("S") && params.value("construction", std::string("sidon")) == "random";
  return false;
}

std::string params_text(const json& params) {
  std::string s;
  for (const auto& [k, v] : params.items()) s += (s.empty() ? "" : " ") + k + "=" + v.dump();
  return s;
}

template <typename Scalar>
std::vector<Cell> distortion_row(const DistortionEstimate<Scalar>& est) {
  const auto& bc = est.bound_check;
  return {Cell(static_cast<long long>(est.N)),
          Cell(static_cast<long long>(est.d)),
          Cell(est.p),
          Cell(std::string(to_string(est.field))),
          Cell(std::string(to_string(est.measure))),
          Cell(est.lambda_min.value),
          Cell(std::string(to_string(est.lambda_min.kind))),
          Cell(est.lambda_max.value),
          Cell(std::string(to_string(est.lambda_max.kind))),
          Cell(est.distortion()),
          bc.applicable ? Cell(bc.thm_upper) : Cell(std::monostate{}),
          opt_cell(bc.lambda_prime_lower),
          Cell(bc.min_ok),
          Cell(bc.max_ok),
          Cell(bc.sandwich_ok),
          Cell(bc.violation)};
}

const std::vector<std::string> kDistortionColumns{
    "N",           "d",           "p",         "field",      "measure",       "lambda_min",
    "lambda_min_kind", "lambda_max", "lambda_max_kind", "distortion", "thm_upper", "lambda_prime_lower",
    "min_ok",      "max_ok",      "sandwich_ok", "violation"};

RunResult run_distortion(const ExperimentSpec& spec, bool lambda_p) {
  const auto cells = expand_grid(spec.grid);
  struct Unit {
    std::size_t cell;
    int replicate;
    double p;
  };
  std::vector<Unit> units;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const int reps = seeded(spec.generator, cells[c].params) ? spec.seed_count : 1;
    for (int k = 0; k < reps; ++k)
      for (double p : spec.p) units.push_back(Unit{c, k, p});
  }

  RunResult rr;
  rr.table.schema = lambda_p ? "lambda_p" : "distortion";
  rr.table.columns = {"generator", "params", "replicate", "seed"};
  if (lambda_p) rr.table.columns.insert(rr.table.columns.end(), {"construction", "S_size", "sidon_check"});
  rr.table.columns.insert(rr.table.columns.end(), kDistortionColumns.begin(), kDistortionColumns.end());

  rr.table.rows = parallel_map<std::vector<Cell>>(units.size(), [&](std::size_t i) {
    const Unit& u = units[i];
    const GridCell& cell = cells[u.cell];
    const std::uint64_t seed =
        derive_seed(spec.base_seed, {hash_string(spec.generator + "|" + cell.key), static_cast<std::uint64_t>(u.replicate)});
    std::vector<Cell> row{Cell(spec.generator), Cell(params_text(cell.params)),
                          Cell(static_cast<long long>(u.replicate)), Cell(std::to_string(seed))};
    if (lambda_p) {
      const auto fs = frequency_set_for(cell.params, seed);
      row.push_back(Cell(std::string(gen::to_string(fs.construction))));
      row.push_back(Cell(static_cast<long long>(fs.S.size())));
      row.push_back(Cell(gen::has_distinct_sums(fs.S)));
    }
    const auto sub = make_subspace(spec.generator, cell.params, seed);
    const auto eo = evaluate_options(spec, derive_seed(seed, {p_tag(u.p)}));
    std::vector<Cell> tail = std::visit(
        [&](const auto& e) { return distortion_row(evaluate(e, u.p, spec.measure, eo)); }, sub);
    row.insert(row.end(), tail.begin(), tail.end());
    return row;
  });
  rr.instances = static_cast<long>(units.size());
  return rr;
}

RunResult run_conjecture(const ExperimentSpec& spec) {
  conj::SearchOptions so;
  so.variant = conj::parse_variant(spec.variant);
  so.p_grid = spec.p;
  if (!spec.families.empty()) {
    so.families.clear();
    for (const auto& f : spec.families) so.families.push_back(conj::parse_family(f));
  }
  so.instances_per_cell = spec.instances_per_cell;
  so.seed = spec.base_seed;
  so.restarts = spec.budgets.restarts;
  so.escalation_factor = spec.budgets.escalation_factor;
  so.min_size = spec.min_size;
  so.max_size = spec.max_size;
  so.cap = spec.budgets.enumeration_cap;
  const auto res = conj::search(so);

  RunResult rr;
  rr.table.schema = "conjecture";
  rr.table.columns = {"variant", "p", "r", "family", "seed", "instance_id", "lhs", "lhs_kind", "rhs", "slack", "status"};
  for (const auto& row : res.leaderboard)
    rr.table.rows.push_back({Cell(std::string(conj::to_string(row.variant))), Cell(row.p), Cell(row.r),
                             Cell(std::string(conj::to_string(row.family))), Cell(std::to_string(row.seed)),
                             Cell(static_cast<long long>(row.instance_id)), Cell(row.lhs),
                             Cell(std::string(to_string(row.lhs_kind))), Cell(row.rhs), Cell(row.slack),
                             Cell(std::string(conj::to_string(row.status)))});
  json cells = json::array();
  for (const auto& c : res.cells)
    cells.push_back({{"p", c.p},
                     {"family", conj::to_string(c.family)},
                     {"min_slack", c.min_slack},
                     {"instances", c.instances},
                     {"confirmed", c.confirmed},
                     {"undecided", c.undecided},
                     {"candidates", c.candidates}});
  rr.extras["cells"] = std::move(cells);
  rr.instances = static_cast<long>(res.leaderboard.size());
  return rr;
}

RunResult run_kashin(const ExperimentSpec& spec) {
  std::vector<std::pair<long, double>> cells;
  for (const auto& n : spec.grid.at("N")) {
    if (!n.is_number_integer()) throw ParseError("kashin N values must be integers");
    for (double eta : spec.eta) cells.emplace_back(n.get<long>(), eta);
  }
  const auto jobs = jobs_for(cells.size(), spec.seed_count);
  RunResult rr;
  rr.table.schema = "kashin";
  rr.table.columns = {"N",          "eta",        "d",          "replicate", "seed", "lambda_min", "lambda_min_kind",
                      "measured_c", "c_ceiling", "within_ceiling", "violation"};
  rr.table.rows = parallel_map<std::vector<Cell>>(jobs.size(), [&](std::size_t i) {
    const auto [n, eta] = cells[jobs[i].cell];
    const std::uint64_t seed = derive_seed(
        spec.base_seed, {hash_string("kashin|N=" + std::to_string(n) + "|eta=" + format_double(eta)),
                         static_cast<std::uint64_t>(jobs[i].replicate)});
    HeuristicOptions ho;
    ho.restarts = spec.budgets.restarts;
    ho.max_vertex_hops = spec.budgets.max_vertex_hops;
    const auto ks = gen::kashin_sample(n, eta, seed, ho);
    const double ceiling = bounds::thm1_upper(n, ks.d) / std::sqrt(static_cast<double>(n));
    // Every attained ratio lies in [1, sqrt(N)], so c lies in [1/sqrt(N), 1].
    const bool violation = !(ks.measured_c > 0.0) || ks.measured_c > 1.0 + 1e-12;
    return std::vector<Cell>{Cell(static_cast<long long>(n)), Cell(eta), Cell(static_cast<long long>(ks.d)),
                             Cell(static_cast<long long>(jobs[i].replicate)), Cell(std::to_string(seed)),
                             Cell(ks.lambda_min.value), Cell(std::string(to_string(ks.lambda_min.kind))),
                             Cell(ks.measured_c), Cell(ceiling), Cell(ks.measured_c <= ceiling + 1e-12),
                             Cell(violation)};
  });
  rr.instances = static_cast<long>(jobs.size());
  return rr;
}

}  // namespace

Table bounds_table(const std::vector<GridCell>& cells, const std::vector<double>& p_list, Field field,
                   Measure measure) {
  Table t;
  t.schema = "bounds";
  t.columns = {"N",  "d", "p", "field", "measure", "thm_upper", "lambda_prime_lower", "meyer_pajor_lower",
               "sphere_average", "complex_p1_asymptote"};
  for (const auto& c : cells) {
    if (!c.params.contains("N") || !c.params.contains("d")) throw ParseError("bounds rows need N and d");
    const long n = c.params.at("N").get<long>();
    const long d = c.params.at("d").get<long>();
    for (double p : p_list) {
      const auto r = bounds::bound_report(n, d, p, field, measure);
      t.rows.push_back({Cell(static_cast<long long>(n)), Cell(static_cast<long long>(d)), Cell(p),
                        Cell(std::string(to_string(field))), Cell(std::string(to_string(measure))),
                        Cell(r.thm_upper_lambda), opt_cell(r.thm_lower_lambda_prime), Cell(r.meyer_pajor_lower),
                        opt_cell(r.sphere_average), opt_cell(r.complex_p1_asymptote)});
    }
  }
  return t;
}

long count_violations(const Table& t) {
  if (t.schema != "conjecture") return t.violations();
  std::size_t kind = 0, rhs = 0, slack = 0;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == "lhs_kind") kind = i;
    if (t.columns[i] == "rhs") rhs = i;
    if (t.columns[i] == "slack") slack = i;
  }
  long n = 0;
  for (const auto& r : t.rows) {
    if (std::get<std::string>(r[kind]) != to_string(ValueKind::Exact)) continue;
    if (std::get<double>(r[slack]) < -conj::confirm_tolerance(ValueKind::Exact, std::get<double>(r[rhs]))) ++n;
  }
  return n;
}

RunResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  RunResult rr;
  switch (spec.mode) {
    case Mode::Bounds: {
      const auto cells = expand_grid(spec.grid);
      rr.table = bounds_table(cells, spec.p, spec.field, spec.measure);
      rr.instances = static_cast<long>(rr.table.rows.size());
      break;
    }
    case Mode::Distortion:
      rr = run_distortion(spec, false);
      break;
    case Mode::LambdaP:
      if (spec.generator != "character") throw ParseError("lambda_p mode needs the character generator");
      rr = run_distortion(spec, true);
      break;
    case Mode::Conjecture:
      rr = run_conjecture(spec);
      break;
    case Mode::Kashin:
      rr = run_kashin(spec);
      break;
  }
  rr.violations = count_violations(rr.table);
  return rr;
}

int run_spec_file(const std::string& path, const RunOverrides& overrides, std::ostream& log) {
  ExperimentSpec spec;
  try {
    spec = load_spec(path);
    if (overrides.output_dir) spec.output_dir = *overrides.output_dir;
    if (overrides.seed) spec.base_seed = *overrides.seed;
    if (overrides.cap) spec.budgets.enumeration_cap = *overrides.cap;
    if (overrides.format) spec.format = *overrides.format;
    validate(spec);
  } catch (const ParseError& e) {
    log << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const CapExceededError& e) {
    log << "cap violation: " << e.what() << "\n";
    return kExitCap;
  } catch (const Error& e) {
    log << "invalid spec: " << e.what() << "\n";
    return kExitParse;
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunResult rr;
  try {
    rr = run_experiment(spec);
  } catch (const ParseError& e) {
    log << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const CapExceededError& e) {
    log << "cap violation: " << e.what() << "\n";
    return kExitCap;
  } catch (const TheoremViolation& e) {
    log << "theorem violation: " << e.what() << "\n";
    return kExitViolation;
  } catch (const DomainError& e) {
    log << "invalid parameters: " << e.what() << "\n";
    return kExitParse;
  } catch (const Error& e) {
    log << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  const fs::path base = fs::path(spec.output_dir) / spec.name;
  json outputs = json::array();
  auto write = [&](const fs::path& p, auto&& emit) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    emit(out);
    outputs.push_back(p.filename().string());
  };
  try {
    if (spec.format != OutputFormat::Json)
      write(base.string() + ".csv", [&](std::ostream& o) { write_csv(o, rr.table); });
    if (spec.format != OutputFormat::Csv)
      write(base.string() + ".json", [&](std::ostream& o) {
        json doc = table_to_json(rr.table);
        for (const auto& [k, v] : rr.extras.items()) doc[k] = v;
        o << doc.dump(2) << "\n";
      });
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(hash_string(spec.source_text)));
    json manifest{{"name", spec.name},
                  {"mode", to_string(spec.mode)},
                  {"spec_path", path},
                  {"spec_hash", hash},
                  {"code_version", EUCSEC_VERSION},
                  {"base_seed", spec.base_seed},
                  {"threads", num_threads()},
                  {"total_instances", rr.instances},
                  {"violation_count", rr.violations},
                  {"wall_time_seconds", wall},
                  {"outputs", outputs}};
    std::ofstream mout(base.string() + ".manifest.json", std::ios::binary);
    if (!mout) throw Error("cannot write manifest");
    mout << manifest.dump(2) << "\n";
  } catch (const Error& e) {
    log << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  log << spec.name << ": " << rr.instances << " instances, " << rr.violations << " violations, "
      << std::fixed << std::setprecision(2) << wall << " s\n";
  return rr.violations == 0 ? kExitOk : kExitViolation;
}

std::string describe(const std::string& generator, const json& params, std::uint64_t seed) {
  const auto sub = make_subspace(generator, params, seed);
  std::ostringstream out;
  std::visit(
      [&](const auto& e) {
        char res[32];
        std::snprintf(res, sizeof res, "%.3e", e.orthonormality_residual());
        out << "generator: " << generator << "\n"
            << "provenance: " << e.provenance.describe() << "\n"
            << "field: " << to_string(e.field()) << "\n"
            << "N=" << e.ambient_dim() << ", d=" << e.dim() << ", residual " << res << "\n";
      },
      sub);
  if (generator == "character") {
    const auto fs = frequency_set_for(params, seed);
    out << "S (" << fs.S.size() << ", " << gen::to_string(fs.construction) << "): [";
    for (std::size_t i = 0; i < fs.S.size(); ++i) out << (i ? ", " : "") << fs.S[i];
    out << "]\n"
        << "Sidon check: " << (gen::has_distinct_sums(fs.S) ? "pass" : "fail") << "\n";
  }
  return out.str();
}

}  // namespace eucsec::harness
