#include "eucsec/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace eucsec::harness {

using ojson = nlohmann::ordered_json;

long Table::violations() const {
  long col = -1;
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == "violation") col = static_cast<long>(i);
  if (col < 0) return 0;
  long n = 0;
  for (const auto& r : rows)
    if (const bool* b = std::get_if<bool>(&r[static_cast<std::size_t>(col)]); b && *b) ++n;
  return n;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string csv_text(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
  };
  return std::visit(V{}, c);
}

ojson cell_json(const Cell& c) {
  struct V {
    ojson operator()(std::monostate) const { return nullptr; }
    ojson operator()(bool b) const { return b; }
    ojson operator()(long long v) const { return v; }
    ojson operator()(double v) const {
      if (std::isfinite(v)) return v;
      return format_double(v);
    }
    ojson operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

template <typename Scalar>
ojson vector_json(const VectorX<Scalar>& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (is_complex_v<Scalar>)
      a.push_back(ojson::array({v(i).real(), v(i).imag()}));
    else
      a.push_back(v(i));
  }
  return a;
}

}  // namespace

void write_csv(std::ostream& out, const Table& t) {
  out << "# eucsec " << t.schema << " csv-schema=" << kCsvSchemaVersion << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_text(r[i]);
    out << "\n";
  }
}

ojson table_to_json(const Table& t) {
  ojson doc;
  doc["schema"] = t.schema;
  doc["schema_version"] = kCsvSchemaVersion;
  doc["columns"] = t.columns;
  ojson rows = ojson::array();
  for (const auto& r : t.rows) {
    ojson o = ojson::object();
    for (std::size_t i = 0; i < r.size() && i < t.columns.size(); ++i) o[t.columns[i]] = cell_json(r[i]);
    rows.push_back(std::move(o));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

template <typename Scalar>
ojson estimate_to_json(const DistortionEstimate<Scalar>& est, const Provenance& prov) {
  ojson j;
  j["schema_version"] = kJsonSchemaVersion;
  j["provenance"] = {{"generator", prov.generator}, {"params", prov.params}, {"seed", prov.seed}};
  j["N"] = est.N;
  j["d"] = est.d;
  j["p"] = est.p;
  j["measure"] = to_string(est.measure);
  j["field"] = to_string(est.field);
  auto lam = [](const LambdaResult<Scalar>& l) {
    return ojson{{"value", l.value}, {"kind", to_string(l.kind)}, {"witness", vector_json<Scalar>(l.witness)}};
  };
  j["lambda_min"] = lam(est.lambda_min);
  j["lambda_max"] = lam(est.lambda_max);
  j["distortion"] = est.distortion();
  const auto& bc = est.bound_check;
  ojson b;
  b["applicable"] = bc.applicable;
  b["thm_upper"] = bc.thm_upper;
  b["lambda_prime_lower"] = bc.lambda_prime_lower ? ojson(*bc.lambda_prime_lower) : ojson(nullptr);
  b["min_ok"] = bc.min_ok;
  b["max_ok"] = bc.max_ok;
  b["sandwich_ok"] = bc.sandwich_ok;
  b["violation"] = bc.violation;
  b["notes"] = bc.notes;
  j["bound_check"] = std::move(b);
  j["vertex_stats"] = {{"candidates", est.vertex_stats.candidates}, {"degenerate", est.vertex_stats.degenerate}};
  return j;
}

template ojson estimate_to_json<double>(const DistortionEstimate<double>&, const Provenance&);
template ojson estimate_to_json<Complex>(const DistortionEstimate<Complex>&, const Provenance&);

ojson bound_report_to_json(const bounds::BoundReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); };
  return ojson{{"N", r.N},
               {"d", r.d},
               {"p", r.p},
               {"field", to_string(r.field)},
               {"measure", to_string(r.measure)},
               {"thm_upper", r.thm_upper_lambda},
               {"lambda_prime_lower", opt(r.thm_lower_lambda_prime)},
               {"meyer_pajor_lower", r.meyer_pajor_lower},
               {"sphere_average", opt(r.sphere_average)},
               {"complex_p1_asymptote", opt(r.complex_p1_asymptote)}};
}

}  // namespace eucsec::harness
