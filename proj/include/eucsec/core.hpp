#ifndef EUCSEC_CORE_HPP
#define EUCSEC_CORE_HPP

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

namespace eucsec {

enum class Field { Real, Complex };

/// Counting: plain sums. Normalized: sums divided by the ambient dimension
/// before the 1/p power (the uniform probability measure on N points).
enum class Measure { Counting, Normalized };

enum class ValueKind { Exact, HeuristicUpperBound, HeuristicLowerBound };

using Complex = std::complex<double>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename Scalar>
inline constexpr bool is_complex_v = is_complex<Scalar>::value;

template <typename Scalar>
constexpr Field field_of() {
  return is_complex_v<Scalar> ? Field::Complex : Field::Real;
}

const char* to_string(Field f);
const char* to_string(Measure m);
const char* to_string(ValueKind k);
Field parse_field(const std::string& s);
Measure parse_measure(const std::string& s);

// Error hierarchy. Every failure in the library surfaces as one of these.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct RankDeficiencyError : Error {
  using Error::Error;
};
/// Exhaustive enumeration requested above its configured cap; use a
/// heuristic variant instead.
struct CapExceededError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
/// An exact computation contradicted a proven inequality. Always a bug.
struct TheoremViolation : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

/// Where a subspace came from: generator name, its parameters, and the seed.
struct Provenance {
  std::string generator;
  std::map<std::string, std::string> params;
  unsigned long long seed = 0;

  std::string describe() const;
};

}  // namespace eucsec

#endif
