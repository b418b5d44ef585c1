#ifndef EUCSEC_GENERATORS_HPP
#define EUCSEC_GENERATORS_HPP

#include <cstdint>
#include <vector>

#include "eucsec/core.hpp"
#include "eucsec/distortion.hpp"
#include "eucsec/subspace.hpp"

namespace eucsec::gen {

enum class Construction { Explicit, Sidon, Random };
const char* to_string(Construction c);

/// Frequencies S, a strictly increasing subset of [0, N).
struct FrequencySet {
  long N = 0;
  std::vector<long> S;
  Construction construction = Construction::Explicit;
};

/// Validates and sorts; throws DomainError on duplicates or out-of-range values.
FrequencySet make_frequency_set(long N, std::vector<long> s, Construction construction = Construction::Explicit);

/// True when all sums s_i + s_j (i <= j) are distinct.
bool has_distinct_sums(const std::vector<long>& s);

/// Orthonormalized N x d matrix of i.i.d. standard Gaussians (complex: real and
/// imaginary parts N(0, 1/2)). Entries are drawn column by column from Rng.
template <typename Scalar = double>
BasicSubspace<Scalar> gaussian_subspace(long N, long d, std::uint64_t seed);

/// Span of the first d standard basis vectors.
Subspace coordinate_subspace(long N, long d);

/// Span of (sin(2 pi k / N))_k and (cos(2 pi k / N))_k; meant for the
/// normalized measure.
Subspace trig_subspace(long N);

/// Linear functionals on M random points of S^{d-1}: row k of the raw matrix
/// is the k-th point. Meant for the normalized measure.
Subspace spherical_linear_subspace(long d, long M, std::uint64_t seed);

/// Characters of Z_N with frequencies in S. Complex: columns e^{2 pi i k j / N}.
/// Real: a cos/sin pair per frequency, one column for 0 and N/2; k and N-k
/// name the same real pair and are merged.
template <typename Scalar>
BasicSubspace<Scalar> character_subspace(const FrequencySet& freqs);

/// Erdos-Turan set {2qk + (k^2 mod q) : 0 <= k < q} with q the largest prime
/// satisfying 2q^2 <= N. All pairwise sums are distinct.
FrequencySet sidon_frequencies(long N);

/// size distinct frequencies drawn uniformly from [1, N).
FrequencySet random_frequencies(long N, long size, std::uint64_t seed);

long largest_prime_at_most(long n);

/// d = N - ceil(eta N).
long kashin_dimension(long N, double eta);

struct KashinSample {
  double eta = 0.5;
  long N = 0;
  long d = 0;
  std::uint64_t seed = 0;
  Subspace subspace;
  LambdaResult<double> lambda_min;  // counting measure, heuristic
  double measured_c = 0.0;          // lambda_min / sqrt(N)
};

KashinSample kashin_sample(long N, double eta, std::uint64_t seed, const HeuristicOptions& options = {});

}  // namespace eucsec::gen

#endif
