#ifndef EUCSEC_RANDOM_HPP
#define EUCSEC_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include "eucsec/core.hpp"

namespace eucsec {

std::uint64_t splitmix64(std::uint64_t x);

/// Order-sensitive combination of seed material; stable across platforms.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);
std::uint64_t hash_string(std::string_view s);

/// Portable generator: mt19937_64 for bits, 53-bit uniforms, and the polar-free
/// Box-Muller transform for normals (both outputs of a pair are used). The
/// standard library distributions are implementation-defined and are not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform();  // [0, 1)
  double normal();
  std::uint64_t bits() { return engine_(); }
  std::uint64_t below(std::uint64_t n);  // uniform in [0, n)

  template <typename Scalar>
  Scalar gaussian() {
    if constexpr (is_complex_v<Scalar>) {
      const double re = normal();
      const double im = normal();
      return Scalar(re, im) / std::sqrt(2.0);
    } else {
      return normal();
    }
  }

  template <typename Scalar>
  MatrixX<Scalar> gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    MatrixX<Scalar> m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gaussian<Scalar>();
    return m;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace eucsec

#endif
