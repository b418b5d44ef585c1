#include "eucsec/core.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace eucsec {

const char* to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

const char* to_string(Measure m) { return m == Measure::Counting ? "counting" : "normalized"; }

const char* to_string(ValueKind k) {
  switch (k) {
    case ValueKind::Exact:
      return "exact";
    case ValueKind::HeuristicUpperBound:
      return "heuristic_upper";
    case ValueKind::HeuristicLowerBound:
      return "heuristic_lower";
  }
  return "?";
}

namespace {
std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}
}  // namespace

Field parse_field(const std::string& s) {
  const auto v = lower(s);
  if (v == "real") return Field::Real;
  if (v == "complex") return Field::Complex;
  throw ParseError("unknown field '" + s + "' (expected real|complex)");
}

Measure parse_measure(const std::string& s) {
  const auto v = lower(s);
  if (v == "counting") return Measure::Counting;
  if (v == "normalized") return Measure::Normalized;
  throw ParseError("unknown measure '" + s + "' (expected counting|normalized)");
}

std::string Provenance::describe() const {
  std::ostringstream os;
  os << generator << '(';
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) os << ", ";
    os << k << '=' << v;
    first = false;
  }
  os << ") seed=" << seed;
  return os.str();
}

}  // namespace eucsec
