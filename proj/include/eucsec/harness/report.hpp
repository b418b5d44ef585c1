#ifndef EUCSEC_HARNESS_REPORT_HPP
#define EUCSEC_HARNESS_REPORT_HPP

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eucsec/bounds.hpp"
#include "eucsec/distortion.hpp"

namespace eucsec::harness {

/// Frozen CSV schema version; bump when a column changes.
inline constexpr int kCsvSchemaVersion = 1;
/// Version of the JSON document layout written by estimate_to_json.
inline constexpr int kJsonSchemaVersion = 1;

using Cell = std::variant<std::monostate, bool, long long, double, std::string>;

struct Table {
  std::string schema;  // e.g. "distortion"
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Rows whose violation column is true. Tables without one have none.
  long violations() const;
};

/// First line: "# eucsec <schema> csv-schema=<version>", then the header.
/// Doubles use %.17g; booleans are true/false; empty cells stay empty.
void write_csv(std::ostream& out, const Table& t);
nlohmann::ordered_json table_to_json(const Table& t);

std::string format_double(double x);

template <typename Scalar>
nlohmann::ordered_json estimate_to_json(const DistortionEstimate<Scalar>& est, const Provenance& prov);
nlohmann::ordered_json bound_report_to_json(const bounds::BoundReport& r);

}  // namespace eucsec::harness

#endif
