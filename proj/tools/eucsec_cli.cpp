// eucsec: command-line front end for the distortion laboratory.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eucsec/bounds.hpp"
#include "eucsec/conjecture.hpp"
#include "eucsec/distortion.hpp"
#include "eucsec/generators.hpp"
#include "eucsec/harness/experiment.hpp"
#include "eucsec/harness/report.hpp"
#include "eucsec/harness/runner.hpp"
#include "eucsec/matrix_io.hpp"
#include "eucsec/parallel.hpp"

using namespace eucsec;
using namespace eucsec::harness;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "csv";
  std::string out;
  int cap = kDefaultEnumerationCap;
};

// Writes text to --out when given, stdout otherwise.
void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw Error("cannot write " + g.out);
  f << text;
}

void emit_table(const Globals& g, const Table& t) {
  std::ostringstream ss;
  if (g.format == "json")
    ss << table_to_json(t).dump(2) << "\n";
  else
    write_csv(ss, t);
  emit(g, ss.str());
}

AnySubspace subspace_from(const std::string& generator, const std::vector<std::string>& params,
                          const std::string& input, Field field, std::uint64_t seed) {
  if (!input.empty()) {
    const auto m = io::load_any(input);
    Provenance prov{"file", {{"path", input}}, 0};
    if (const auto* r = std::get_if<Eigen::MatrixXd>(&m)) {
      if (field == Field::Complex) return orthonormalize(Eigen::MatrixXcd(r->cast<Complex>()), prov);
      return orthonormalize(*r, prov);
    }
    return orthonormalize(std::get<Eigen::MatrixXcd>(m), prov);
  }
  if (generator.empty()) throw ParseError("give --generator or --input");
  return make_subspace(generator, params_from_pairs(params), seed);
}

template <typename Scalar>
Table estimate_table(const DistortionEstimate<Scalar>& est) {
  Table t;
  t.schema = "distortion";
  t.columns = {"N", "d", "p", "field", "measure", "lambda_min", "lambda_min_kind", "lambda_max", "lambda_max_kind",
               "distortion", "thm_upper", "lambda_prime_lower", "violation"};
  const auto& bc = est.bound_check;
  t.rows.push_back({Cell(static_cast<long long>(est.N)), Cell(static_cast<long long>(est.d)), Cell(est.p),
                    Cell(std::string(to_string(est.field))), Cell(std::string(to_string(est.measure))),
                    Cell(est.lambda_min.value), Cell(std::string(to_string(est.lambda_min.kind))),
                    Cell(est.lambda_max.value), Cell(std::string(to_string(est.lambda_max.kind))),
                    Cell(est.distortion()), bc.applicable ? Cell(bc.thm_upper) : Cell(std::monostate{}),
                    bc.lambda_prime_lower ? Cell(*bc.lambda_prime_lower) : Cell(std::monostate{}),
                    Cell(bc.violation)});
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eucsec: almost-Euclidean sections of l_p^N"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EUCSEC_VERSION);

  Globals g;
  app.add_option("--seed", g.seed, "Base seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (default: EUCSEC_THREADS or all cores)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--out", g.out, "Output path (stdout when omitted; a directory for 'run')");
  app.add_option("--cap", g.cap, "Exhaustive enumeration cap")->check(CLI::Range(1, kMaxEnumerationCap))
      ->capture_default_str();
  app.fallthrough();

  // bounds
  auto* cb = app.add_subcommand("bounds", "Tabulate the closed-form bounds");
  std::vector<long> b_n;
  std::vector<std::string> b_d{"all"};
  std::vector<double> b_p{1.0};
  std::string b_field = "real", b_measure = "counting";
  cb->add_option("-N,--N", b_n, "Ambient dimensions")->required();
  cb->add_option("-d,--d", b_d, "Subspace dimensions, or all / half / N")->capture_default_str();
  cb->add_option("-p,--p", b_p, "Exponents in [1, 2]")->capture_default_str();
  cb->add_option("--field", b_field)->check(CLI::IsMember({"real", "complex"}))->capture_default_str();
  cb->add_option("--measure", b_measure)->check(CLI::IsMember({"counting", "normalized"}))->capture_default_str();

  // distortion
  auto* cd = app.add_subcommand("distortion", "Estimate lambda_min and lambda_max of a subspace");
  std::string d_gen, d_input, d_measure = "counting", d_field = "real";
  std::vector<std::string> d_params;
  double d_p = 1.0;
  int d_restarts = 50;
  bool d_heuristic = false;
  cd->add_option("-g,--generator", d_gen, "gaussian | coordinate | trig | spherical | character");
  cd->add_option("--param", d_params, "Generator parameter key=value (repeatable)");
  cd->add_option("-i,--input", d_input, "Basis matrix file (.csv or binary) instead of a generator");
  cd->add_option("--field", d_field, "Field for --input")->check(CLI::IsMember({"real", "complex"}));
  cd->add_option("-p,--p", d_p, "Exponent p >= 1")->capture_default_str();
  cd->add_option("--measure", d_measure)->check(CLI::IsMember({"counting", "normalized"}))->capture_default_str();
  cd->add_option("--restarts", d_restarts, "Heuristic restarts")->check(CLI::PositiveNumber)->capture_default_str();
  cd->add_flag("--heuristic", d_heuristic, "Skip the exact algorithms");

  // generate
  auto* cg = app.add_subcommand("generate", "Write a generated basis (.csv or binary by --out extension)");
  std::string g_gen;
  std::vector<std::string> g_params;
  cg->add_option("-g,--generator", g_gen)->required();
  cg->add_option("--param", g_params, "Generator parameter key=value (repeatable)");

  // conjecture
  auto* cc = app.add_subcommand("conjecture", "Evaluate one matrix or search a family grid");
  std::string c_variant = "B", c_matrix;
  std::vector<double> c_p{1.5};
  std::vector<std::string> c_families;
  int c_instances = 100, c_restarts = 20, c_escalation = 100;
  long c_min = 2, c_max = 8;
  cc->add_option("--variant", c_variant)->check(CLI::IsMember({"B", "C"}))->capture_default_str();
  cc->add_option("-p,--p", c_p, "Exponents in [1, 2]")->capture_default_str();
  cc->add_option("-m,--matrix", c_matrix, "Evaluate this matrix file instead of searching");
  cc->add_option("--families", c_families, "Matrix families, comma-separated (default: all six)")->delimiter(',');
  cc->add_option("--instances", c_instances, "Instances per cell")->check(CLI::PositiveNumber)->capture_default_str();
  cc->add_option("--restarts", c_restarts)->check(CLI::PositiveNumber)->capture_default_str();
  cc->add_option("--escalation", c_escalation, "Restart multiplier on negative slack")->capture_default_str();
  cc->add_option("--min-size", c_min)->capture_default_str();
  cc->add_option("--max-size", c_max)->capture_default_str();

  // kashin
  auto* ck = app.add_subcommand("kashin", "Sample the empirical Kashin constant c(eta)");
  long k_n = 256;
  double k_eta = 0.5;
  int k_samples = 10, k_restarts = 4, k_hops = -1;
  ck->add_option("-N,--N", k_n)->capture_default_str();
  ck->add_option("--eta", k_eta)->capture_default_str();
  ck->add_option("--samples", k_samples)->check(CLI::PositiveNumber)->capture_default_str();
  ck->add_option("--restarts", k_restarts)->check(CLI::PositiveNumber)->capture_default_str();
  ck->add_option("--max-hops", k_hops, "Vertex-exchange steps per start (-1: until no edge improves)")
      ->capture_default_str();

  // run
  auto* cr = app.add_subcommand("run", "Execute an experiment spec (YAML or JSON)");
  std::string r_spec;
  cr->add_option("spec", r_spec, "Spec file")->required()->check(CLI::ExistingFile);

  // describe
  auto* cs = app.add_subcommand("describe", "Summarize a generated subspace");
  std::string s_gen;
  std::vector<std::string> s_params;
  cs->add_option("-g,--generator", s_gen)->required();
  cs->add_option("--param", s_params, "Generator parameter key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }
  if (g.threads > 0) set_num_threads(g.threads);

  try {
    if (cb->parsed()) {
      json grid = json::object();
      grid["N"] = b_n;
      json ds = json::array();
      for (const auto& d : b_d) {
        try {
          ds.push_back(std::stol(d));
        } catch (const std::exception&) {
          ds.push_back(d);
        }
      }
      grid["d"] = ds;
      emit_table(g, bounds_table(expand_grid(grid), b_p, parse_field(b_field), parse_measure(b_measure)));
      return kExitOk;
    }
    if (cd->parsed()) {
      const auto sub = subspace_from(d_gen, d_params, d_input, parse_field(d_field), g.seed);
      EvaluateOptions eo;
      eo.enumeration_cap = g.cap;
      eo.allow_exact = !d_heuristic;
      eo.heuristic.restarts = d_restarts;
      eo.heuristic.seed = g.seed;
      eo.throw_on_violation = false;
      bool violation = false;
      std::visit(
          [&](const auto& e) {
            const auto est = evaluate(e, d_p, parse_measure(d_measure), eo);
            violation = est.bound_check.violation;
            if (g.format == "json")
              emit(g, estimate_to_json(est, e.provenance).dump(2) + "\n");
            else
              emit_table(g, estimate_table(est));
            for (const auto& n : est.bound_check.notes) std::cerr << "note: " << n << "\n";
          },
          sub);
      return violation ? kExitViolation : kExitOk;
    }
    if (cg->parsed()) {
      const auto sub = make_subspace(g_gen, params_from_pairs(g_params), g.seed);
      std::visit(
          [&](const auto& e) {
            if (g.out.empty()) {
              if constexpr (is_complex_v<typename std::decay_t<decltype(e.basis)>::Scalar>)
                throw ParseError("complex bases need --out with a non-.csv (binary) file name");
              else
                io::write_csv(std::cout, e.basis);
            } else {
              io::save_any(g.out, e.basis);
            }
          },
          sub);
      return kExitOk;
    }
    if (cc->parsed()) {
      const auto variant = conj::parse_variant(c_variant);
      if (!c_matrix.empty()) {
        const auto m = io::load_any(c_matrix);
        const auto* real = std::get_if<Eigen::MatrixXd>(&m);
        if (!real) throw ParseError("conjecture instances must be real matrices");
        Table t;
        t.schema = "conjecture-instance";
        t.columns = {"variant", "p", "r", "lhs", "lhs_kind", "rhs", "slack", "status", "escalated"};
        bool violation = false;
        for (double p : c_p) {
          conj::InstanceOptions io;
          io.restarts = c_restarts;
          io.seed = g.seed;
          io.cap = g.cap;
          io.escalation_factor = c_escalation;
          const auto inst = conj::evaluate_instance(variant, p, *real, io);
          violation = violation || inst.theorem_violation;
          t.rows.push_back({Cell(std::string(conj::to_string(variant))), Cell(p), Cell(inst.r), Cell(inst.lhs),
                            Cell(std::string(to_string(inst.lhs_kind))), Cell(inst.rhs), Cell(inst.slack),
                            Cell(std::string(conj::to_string(inst.status))), Cell(inst.escalated)});
          if (!inst.diagnostics.empty()) std::cerr << "p=" << p << ": " << inst.diagnostics << "\n";
        }
        emit_table(g, t);
        return violation ? kExitViolation : kExitOk;
      }
      conj::SearchOptions so;
      so.variant = variant;
      so.p_grid = c_p;
      if (!c_families.empty()) {
        so.families.clear();
        for (const auto& f : c_families) so.families.push_back(conj::parse_family(f));
      }
      so.instances_per_cell = c_instances;
      so.seed = g.seed;
      so.restarts = c_restarts;
      so.escalation_factor = c_escalation;
      so.min_size = c_min;
      so.max_size = c_max;
      so.cap = g.cap;
      const auto res = conj::search(so);
      std::ostringstream ss;
      if (g.format == "json") {
        json rows = json::array();
        for (const auto& r : res.leaderboard)
          rows.push_back({{"variant", conj::to_string(r.variant)}, {"p", r.p}, {"r", r.r},
                          {"family", conj::to_string(r.family)}, {"seed", r.seed}, {"instance_id", r.instance_id},
                          {"lhs", r.lhs}, {"lhs_kind", to_string(r.lhs_kind)}, {"rhs", r.rhs}, {"slack", r.slack},
                          {"status", conj::to_string(r.status)}});
        ss << json{{"leaderboard", rows}}.dump(2) << "\n";
      } else {
        conj::write_leaderboard_csv(ss, res.leaderboard);
      }
      emit(g, ss.str());
      for (const auto& c : res.cells)
        std::cerr << "p=" << c.p << " " << conj::to_string(c.family) << ": min slack " << format_double(c.min_slack)
                  << " (" << c.confirmed << " confirmed, " << c.undecided << " undecided, " << c.candidates
                  << " candidates)\n";
      return res.theorem_violations == 0 ? kExitOk : kExitViolation;
    }
    if (ck->parsed()) {
      ExperimentSpec spec;
      spec.name = "kashin";
      spec.mode = Mode::Kashin;
      spec.grid["N"] = json::array({k_n});
      spec.eta = {k_eta};
      spec.seed_count = k_samples;
      spec.base_seed = g.seed;
      spec.budgets.restarts = k_restarts;
      spec.budgets.max_vertex_hops = k_hops;
      const auto rr = run_experiment(spec);
      emit_table(g, rr.table);
      return rr.violations == 0 ? kExitOk : kExitViolation;
    }
    if (cr->parsed()) {
      RunOverrides ov;
      if (!g.out.empty()) ov.output_dir = g.out;
      if (app.count("--seed")) ov.seed = g.seed;
      if (app.count("--cap")) ov.cap = g.cap;
      if (app.count("--format")) ov.format = parse_format(g.format);
      return run_spec_file(r_spec, ov, std::cerr);
    }
    if (cs->parsed()) {
      emit(g, describe(s_gen, params_from_pairs(s_params), g.seed));
      return kExitOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const CapExceededError& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const TheoremViolation& e) {
    std::cerr << "theorem violation: " << e.what() << "\n";
    return kExitViolation;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
