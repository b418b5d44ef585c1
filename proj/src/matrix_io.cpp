#include "eucsec/matrix_io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace eucsec::io {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 4)) throw ParseError("matrix: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double x) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &x, sizeof bits);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  os.write(b.data(), 8);
}

double get_f64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw ParseError("matrix: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double x = 0.0;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

void write_header(std::ostream& os, Eigen::Index rows, Eigen::Index cols, std::uint32_t tag) {
  if (rows > std::numeric_limits<std::uint32_t>::max() || cols > std::numeric_limits<std::uint32_t>::max())
    throw DomainError("matrix: dimensions exceed the format limit");
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(rows));
  put_u32(os, static_cast<std::uint32_t>(cols));
  put_u32(os, tag);
}

}  // namespace

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  write_header(os, m.rows(), m.cols(), 0);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) put_f64(os, m(i, j));
}

void write_matrix(std::ostream& os, const Eigen::MatrixXcd& m) {
  write_header(os, m.rows(), m.cols(), 1);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      put_f64(os, m(i, j).real());
      put_f64(os, m(i, j).imag());
    }
}

AnyMatrix read_matrix(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ParseError("matrix: bad magic");
  const auto rows = static_cast<Eigen::Index>(get_u32(is));
  const auto cols = static_cast<Eigen::Index>(get_u32(is));
  const auto tag = get_u32(is);
  auto check = [](double x) {
    if (!std::isfinite(x)) throw NumericError("matrix: non-finite entry");
    return x;
  };
  if (tag == 0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = check(get_f64(is));
    return m;
  }
  if (tag == 1) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double re = check(get_f64(is));
        m(i, j) = Complex(re, check(get_f64(is)));
      }
    return m;
  }
  throw ParseError("matrix: unknown field tag " + std::to_string(tag));
}

void save_matrix(const std::string& path, const AnyMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  std::visit([&](const auto& mat) { write_matrix(os, mat); }, m);
}

AnyMatrix load_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "'");
  return read_matrix(is);
}

Eigen::MatrixXd read_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
      continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw ParseError("csv: cannot parse '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos)
        throw ParseError("csv: trailing characters in '" + cell + "'");
      if (!std::isfinite(v)) throw NumericError("csv: non-finite entry");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ParseError("csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("csv: no data");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
}

namespace {
bool is_csv(const std::string& path) { return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0; }
}  // namespace

AnyMatrix load_any(const std::string& path) {
  if (is_csv(path)) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open '" + path + "'");
    return read_csv(is);
  }
  return load_matrix(path);
}

void save_any(const std::string& path, const AnyMatrix& m) {
  if (!is_csv(path)) return save_matrix(path, m);
  const auto* real = std::get_if<Eigen::MatrixXd>(&m);
  if (!real) throw DomainError("complex matrices need a binary file, not '" + path + "'");
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_csv(os, *real);
}

}  // namespace eucsec::io
