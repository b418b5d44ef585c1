#ifndef EUCSEC_MATRIX_IO_HPP
#define EUCSEC_MATRIX_IO_HPP

#include <iosfwd>
#include <string>
#include <variant>

#include "eucsec/core.hpp"

/// Matrix exchange format.
///
/// Binary layout (little-endian):
///   bytes  0..3   magic "EUMX"
///   bytes  4..7   uint32 rows
///   bytes  8..11  uint32 cols
///   bytes 12..15  uint32 field tag (0 = real, 1 = complex)
///   then rows*cols entries in column-major order, each an IEEE-754 double
///   (real) or a pair of doubles re, im (complex).
///
/// CSV import: one matrix row per line, comma-separated reals; blank lines
/// and lines starting with '#' are skipped.
namespace eucsec::io {

using AnyMatrix = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

inline constexpr char kMagic[4] = {'E', 'U', 'M', 'X'};

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
void write_matrix(std::ostream& os, const Eigen::MatrixXcd& m);
AnyMatrix read_matrix(std::istream& is);

void save_matrix(const std::string& path, const AnyMatrix& m);
AnyMatrix load_matrix(const std::string& path);

Eigen::MatrixXd read_csv(std::istream& is);
void write_csv(std::ostream& os, const Eigen::MatrixXd& m);

/// Loads by extension: ".csv" through read_csv, anything else as binary.
AnyMatrix load_any(const std::string& path);
/// Same dispatch for writing; complex matrices cannot go to CSV.
void save_any(const std::string& path, const AnyMatrix& m);

}  // namespace eucsec::io

#endif
