#include "eucsec/harness/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "eucsec/conjecture.hpp"
#include "eucsec/opnorm.hpp"

namespace eucsec::harness {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Bounds:
      return "bounds";
    case Mode::Distortion:
      return "distortion";
    case Mode::Conjecture:
      return "conjecture";
    case Mode::Kashin:
      return "kashin";
    case Mode::LambdaP:
      return "lambda_p";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "bounds") return Mode::Bounds;
  if (s == "distortion") return Mode::Distortion;
  if (s == "conjecture") return Mode::Conjecture;
  if (s == "kashin") return Mode::Kashin;
  if (s == "lambda_p" || s == "lambdap") return Mode::LambdaP;
  throw ParseError("unknown mode '" + s + "'");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "both") return OutputFormat::Both;
  throw ParseError("unknown output format '" + s + "' (csv, json or both)");
}

namespace {

long get_long(const json& params, const char* key) {
  if (!params.contains(key)) throw ParseError(std::string("missing generator parameter '") + key + "'");
  const auto& v = params.at(key);
  if (!v.is_number_integer()) throw ParseError(std::string("parameter '") + key + "' must be an integer");
  return v.get<long>();
}

Field get_field(const json& params) {
  if (!params.contains("field")) return Field::Real;
  if (!params.at("field").is_string()) throw ParseError("parameter 'field' must be a string");
  return parse_field(params.at("field").get<std::string>());
}

std::uint64_t get_seed_override(const json& params, std::uint64_t seed) {
  if (params.contains("seed")) {
    if (!params.at("seed").is_number_unsigned() && !params.at("seed").is_number_integer())
      throw ParseError("parameter 'seed' must be a non-negative integer");
    return params.at("seed").get<std::uint64_t>();
  }
  return seed;
}

void check_known(const json& params, std::initializer_list<const char*> keys, const std::string& gen) {
  if (!params.is_object()) throw ParseError("generator parameters must be a table");
  for (const auto& [k, v] : params.items()) {
    bool ok = k == "seed";
    for (const char* key : keys) ok = ok || k == key;
    if (!ok) throw ParseError("generator '" + gen + "' has no parameter '" + k + "'");
  }
}

}  // namespace

const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names{"gaussian", "coordinate", "trig", "spherical", "character"};
  return names;
}

gen::FrequencySet frequency_set_for(const json& params, std::uint64_t seed) {
  seed = get_seed_override(params, seed);
  const long n = get_long(params, "N");
  if (params.contains("S")) {
    const auto& s = params.at("S");
    if (!s.is_array()) throw ParseError("parameter 'S' must be an integer array");
    std::vector<long> v;
    for (const auto& x : s) {
      if (!x.is_number_integer()) throw ParseError("parameter 'S' must be an integer array");
      v.push_back(x.get<long>());
    }
    return gen::make_frequency_set(n, std::move(v));
  }
  const std::string construction =
      params.contains("construction") ? params.at("construction").get<std::string>() : std::string("sidon");
  if (construction == "sidon") return gen::sidon_frequencies(n);
  if (construction == "random") {
    const long size = params.contains("size") ? get_long(params, "size")
                                              : static_cast<long>(gen::sidon_frequencies(n).S.size());
    return gen::random_frequencies(n, size, seed);
  }
  throw ParseError("unknown frequency construction '" + construction + "' (sidon or random)");
}

AnySubspace make_subspace(const std::string& generator, const json& params, std::uint64_t seed) {
  try {
    if (generator == "gaussian") {
      check_known(params, {"N", "d", "field"}, generator);
      seed = get_seed_override(params, seed);
      const long n = get_long(params, "N");
      const long d = get_long(params, "d");
      if (get_field(params) == Field::Complex) return gen::gaussian_subspace<Complex>(n, d, seed);
      return gen::gaussian_subspace<double>(n, d, seed);
    }
    if (generator == "coordinate") {
      check_known(params, {"N", "d"}, generator);
      return gen::coordinate_subspace(get_long(params, "N"), get_long(params, "d"));
    }
    if (generator == "trig") {
      check_known(params, {"N"}, generator);
      return gen::trig_subspace(get_long(params, "N"));
    }
    if (generator == "spherical") {
      check_known(params, {"d", "M"}, generator);
      seed = get_seed_override(params, seed);
      return gen::spherical_linear_subspace(get_long(params, "d"), get_long(params, "M"), seed);
    }
    if (generator == "character") {
      check_known(params, {"N", "S", "construction", "size", "field"}, generator);
      const auto fs = frequency_set_for(params, seed);
      if (get_field(params) == Field::Complex) return gen::character_subspace<Complex>(fs);
      return gen::character_subspace<double>(fs);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("generator parameters: ") + e.what());
  }
  throw ParseError("unknown generator '" + generator + "'");
}

namespace {

json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar: {
      const std::string s = node.Scalar();
      if (node.Tag() == "!") return s;  // quoted
      long long i = 0;
      if (YAML::convert<long long>::decode(node, i) && s.find_first_of(".eE") == std::string::npos) return i;
      double d = 0.0;
      if (YAML::convert<double>::decode(node, d)) return d;
      bool b = false;
      if (YAML::convert<bool>::decode(node, b)) return b;
      return s;
    }
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
  }
  return nullptr;
}

json as_list(const json& v) { return v.is_array() ? v : json::array({v}); }

std::vector<double> number_list(const json& v, const char* what) {
  std::vector<double> out;
  for (const auto& x : as_list(v)) {
    if (!x.is_number()) throw ParseError(std::string(what) + " must be numbers");
    out.push_back(x.get<double>());
  }
  if (out.empty()) throw ParseError(std::string(what) + " must be non-empty");
  return out;
}

bool filesystem_safe(const std::string& s) {
  if (s.empty() || s.size() > 128 || s == "." || s == "..") return false;
  for (unsigned char c : s)
    if (!(std::isalnum(c) || c == '-' || c == '_' || c == '.')) return false;
  return true;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type");
  }
}

ExperimentSpec from_json(const json& root) {
  if (!root.is_object()) throw ParseError("spec must be a table");
  static const std::vector<std::string> known{"name",     "mode",     "generator", "p",       "measure",
                                              "field",    "seeds",    "budgets",   "output",  "conjecture",
                                              "kashin",   "eta",      "N",         "d"};
  for (const auto& [k, v] : root.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ParseError("unknown spec field '" + k + "'");

  ExperimentSpec s;
  s.name = get_or<std::string>(root, "name", "");
  if (!root.contains("mode")) throw ParseError("spec needs a 'mode'");
  s.mode = parse_mode(get_or<std::string>(root, "mode", ""));

  if (root.contains("generator")) {
    const auto& g = root.at("generator");
    if (!g.is_object() || !g.contains("name")) throw ParseError("'generator' needs a name");
    s.generator = get_or<std::string>(g, "name", "");
    if (g.contains("params")) {
      if (!g.at("params").is_object()) throw ParseError("'generator.params' must be a table");
      for (const auto& [k, v] : g.at("params").items()) s.grid[k] = as_list(v);
    }
  }
  // Bounds mode takes N and d at top level.
  if (root.contains("N")) s.grid["N"] = as_list(root.at("N"));
  if (root.contains("d")) s.grid["d"] = as_list(root.at("d"));

  if (root.contains("p")) s.p = number_list(root.at("p"), "p values");
  if (root.contains("measure")) s.measure = parse_measure(get_or<std::string>(root, "measure", ""));
  if (root.contains("field")) s.field = parse_field(get_or<std::string>(root, "field", ""));

  if (root.contains("seeds")) {
    const auto& sd = root.at("seeds");
    if (!sd.is_object()) throw ParseError("'seeds' must be a table with base and count");
    s.base_seed = get_or<std::uint64_t>(sd, "base", 0);
    s.seed_count = get_or<int>(sd, "count", 1);
  }
  if (root.contains("budgets")) {
    const auto& b = root.at("budgets");
    if (!b.is_object()) throw ParseError("'budgets' must be a table");
    s.budgets.restarts = get_or<int>(b, "restarts", s.budgets.restarts);
    s.budgets.enumeration_cap = get_or<int>(b, "enumeration_cap", s.budgets.enumeration_cap);
    s.budgets.vertex_budget = get_or<long long>(b, "vertex_budget", s.budgets.vertex_budget);
    s.budgets.escalation_factor = get_or<int>(b, "escalation_factor", s.budgets.escalation_factor);
    s.budgets.max_vertex_hops = get_or<int>(b, "max_vertex_hops", s.budgets.max_vertex_hops);
  }
  if (root.contains("conjecture")) {
    const auto& c = root.at("conjecture");
    if (!c.is_object()) throw ParseError("'conjecture' must be a table");
    s.variant = get_or<std::string>(c, "variant", "B");
    if (c.contains("families"))
      for (const auto& f : as_list(c.at("families"))) {
        if (!f.is_string()) throw ParseError("families must be names");
        s.families.push_back(f.get<std::string>());
      }
    s.instances_per_cell = get_or<int>(c, "instances_per_cell", s.instances_per_cell);
    s.min_size = get_or<long>(c, "min_size", s.min_size);
    s.max_size = get_or<long>(c, "max_size", s.max_size);
  }
  if (root.contains("eta")) s.eta = number_list(root.at("eta"), "eta values");
  if (root.contains("kashin")) {
    const auto& k = root.at("kashin");
    if (!k.is_object()) throw ParseError("'kashin' must be a table");
    if (k.contains("eta")) s.eta = number_list(k.at("eta"), "eta values");
    if (k.contains("N")) s.grid["N"] = as_list(k.at("N"));
  }
  if (root.contains("output")) {
    const auto& o = root.at("output");
    if (!o.is_object()) throw ParseError("'output' must be a table");
    s.output_dir = get_or<std::string>(o, "dir", s.output_dir);
    s.format = parse_format(get_or<std::string>(o, "format", "both"));
  }
  return s;
}

}  // namespace

void validate(const ExperimentSpec& s) {
  if (!filesystem_safe(s.name)) throw ParseError("spec name must be non-empty and use only [A-Za-z0-9._-]");
  if (s.seed_count < 1) throw ParseError("seeds.count must be >= 1");
  if (s.budgets.restarts < 1) throw ParseError("budgets.restarts must be >= 1");
  if (s.budgets.enumeration_cap < 1) throw ParseError("budgets.enumeration_cap must be >= 1");
  if (s.budgets.enumeration_cap > kMaxEnumerationCap)
    throw CapExceededError("budgets.enumeration_cap exceeds the maximum of " + std::to_string(kMaxEnumerationCap));
  if (s.budgets.vertex_budget < 1) throw ParseError("budgets.vertex_budget must be >= 1");
  if (s.budgets.vertex_budget > (1LL << 34)) throw CapExceededError("budgets.vertex_budget exceeds 2^34");
  if (s.budgets.escalation_factor < 1) throw ParseError("budgets.escalation_factor must be >= 1");
  for (const auto& [k, v] : s.grid.items())
    if (v.empty()) throw ParseError("grid for '" + k + "' is empty");
  switch (s.mode) {
    case Mode::Bounds:
      if (!s.grid.contains("N") || !s.grid.contains("d")) throw ParseError("bounds mode needs N and d lists");
      for (double p : s.p)
        if (!(p >= 1.0 && p <= 2.0)) throw ParseError("bounds mode needs p in [1, 2]");
      break;
    case Mode::Distortion:
    case Mode::LambdaP:
      if (s.generator.empty()) throw ParseError("this mode needs a generator");
      if (std::find(generator_names().begin(), generator_names().end(), s.generator) == generator_names().end())
        throw ParseError("unknown generator '" + s.generator + "'");
      for (double p : s.p)
        if (!(p >= 1.0)) throw ParseError("p values must be >= 1");
      break;
    case Mode::Conjecture:
      conj::parse_variant(s.variant);
      for (const auto& f : s.families) conj::parse_family(f);
      for (double p : s.p)
        if (!(p >= 1.0 && p <= 2.0)) throw ParseError("conjecture p values must lie in [1, 2]");
      if (s.instances_per_cell < 1) throw ParseError("instances_per_cell must be >= 1");
      if (s.min_size < 1 || s.max_size < s.min_size) throw ParseError("bad matrix size range");
      if (s.max_size > s.budgets.enumeration_cap)
        for (double p : s.p)
          if (p == 1.0) throw CapExceededError("conjecture max_size exceeds the enumeration cap at p = 1");
      break;
    case Mode::Kashin:
      if (!s.grid.contains("N")) throw ParseError("kashin mode needs an N list");
      if (s.eta.empty()) throw ParseError("kashin mode needs eta values");
      for (double e : s.eta)
        if (!(e > 0.0 && e < 1.0)) throw ParseError("eta must lie in (0, 1)");
      break;
  }
}

ExperimentSpec parse_spec(const std::string& text) {
  json root;
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      root = json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError(std::string("JSON spec: ") + e.what());
    }
  } else {
    try {
      root = yaml_to_json(YAML::Load(text));
    } catch (const YAML::Exception& e) {
      throw ParseError(std::string("spec: ") + e.what());
    }
  }
  ExperimentSpec s = from_json(root);
  s.source_text = text;
  validate(s);
  return s;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open spec file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::vector<GridCell> expand_grid(const json& grid) {
  std::vector<GridCell> cells{GridCell{}};
  for (const auto& [key, values] : grid.items()) {
    std::vector<GridCell> next;
    for (const auto& cell : cells)
      for (const auto& v : values) {
        if (key == "d" && v.is_string()) {
          const std::string rule = v.get<std::string>();
          if (!cell.params.contains("N") || !cell.params.at("N").is_number_integer())
            throw ParseError("d rule '" + rule + "' needs N listed before d");
          const long n = cell.params.at("N").get<long>();
          std::vector<long> ds;
          if (rule == "all") {
            for (long d = 1; d <= n; ++d) ds.push_back(d);
          } else if (rule == "half") {
            ds.push_back(std::max(1L, n / 2));
          } else if (rule == "N") {
            ds.push_back(n);
          } else {
            throw ParseError("unknown d rule '" + rule + "' (all, half or N)");
          }
          for (long d : ds) {
            GridCell c = cell;
            c.params["d"] = d;
            next.push_back(std::move(c));
          }
        } else {
          GridCell c = cell;
          c.params[key] = v;
          next.push_back(std::move(c));
        }
      }
    cells = std::move(next);
  }
  std::vector<GridCell> out;
  for (auto& c : cells) {
    if (c.params.contains("N") && c.params.contains("d") && c.params.at("N").is_number_integer() &&
        c.params.at("d").is_number_integer() && c.params.at("d").get<long>() > c.params.at("N").get<long>())
      continue;
    std::string key;
    for (const auto& [k, v] : c.params.items()) key += (key.empty() ? "" : ";") + k + "=" + v.dump();
    c.key = key;
    out.push_back(std::move(c));
  }
  return out;
}

json params_from_pairs(const std::vector<std::string>& pairs) {
  json out = json::object();
  for (const auto& kv : pairs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("parameter '" + kv + "' is not of the form key=value");
    const std::string k = kv.substr(0, eq);
    const std::string v = kv.substr(eq + 1);
    try {
      out[k] = json::parse(v);
    } catch (const json::exception&) {
      out[k] = v;
    }
  }
  return out;
}

}  // namespace eucsec::harness
