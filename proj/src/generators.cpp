#include "eucsec/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_set>

#include "eucsec/random.hpp"

namespace eucsec::gen {

const char* to_string(Construction c) {
  switch (c) {
    case Construction::Explicit:
      return "explicit";
    case Construction::Sidon:
      return "sidon";
    case Construction::Random:
      return "random";
  }
  return "?";
}

FrequencySet make_frequency_set(long N, std::vector<long> s, Construction construction) {
  if (N < 1) throw DomainError("frequency set: N must be >= 1");
  if (s.empty()) throw DomainError("frequency set: S must be non-empty");
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw DomainError("frequency set: duplicate frequency");
  if (s.front() < 0 || s.back() >= N) throw DomainError("frequency set: frequencies must lie in [0, N)");
  return FrequencySet{N, std::move(s), construction};
}

bool has_distinct_sums(const std::vector<long>& s) {
  std::unordered_set<long> sums;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i; j < s.size(); ++j)
      if (!sums.insert(s[i] + s[j]).second) return false;
  return true;
}

template <typename Scalar>
BasicSubspace<Scalar> gaussian_subspace(long N, long d, std::uint64_t seed) {
  if (d < 1 || d > N) throw DomainError("gaussian_subspace: need 1 <= d <= N");
  Rng rng(seed);
  const MatrixX<Scalar> raw = rng.gaussian_matrix<Scalar>(N, d);
  Provenance prov{"gaussian", {{"N", std::to_string(N)}, {"d", std::to_string(d)},
                               {"field", eucsec::to_string(field_of<Scalar>())}}, seed};
  return orthonormalize(raw, std::move(prov));
}

template Subspace gaussian_subspace<double>(long, long, std::uint64_t);
template ComplexSubspace gaussian_subspace<Complex>(long, long, std::uint64_t);

Subspace coordinate_subspace(long N, long d) {
  if (d < 1 || d > N) throw DomainError("coordinate_subspace: need 1 <= d <= N");
  return Subspace{Eigen::MatrixXd::Identity(N, d),
                  Provenance{"coordinate", {{"N", std::to_string(N)}, {"d", std::to_string(d)}}, 0}};
}

Subspace trig_subspace(long N) {
  if (N < 3) throw DomainError("trig_subspace: N must be >= 3");
  Eigen::MatrixXd raw(N, 2);
  for (long k = 0; k < N; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(N);
    raw(k, 0) = std::sin(t);
    raw(k, 1) = std::cos(t);
  }
  return orthonormalize(raw, Provenance{"trig", {{"N", std::to_string(N)}}, 0});
}

Subspace spherical_linear_subspace(long d, long M, std::uint64_t seed) {
  if (d < 1 || M < d) throw DomainError("spherical_linear_subspace: need d >= 1 and M >= d");
  Rng rng(seed);
  Eigen::MatrixXd raw(M, d);
  for (long k = 0; k < M; ++k) {
    Eigen::VectorXd u(d);
    double nu = 0.0;
    while (nu == 0.0) {
      for (long j = 0; j < d; ++j) u(j) = rng.normal();
      nu = u.norm();
    }
    raw.row(k) = (u / nu).transpose();
  }
  return orthonormalize(raw, Provenance{"spherical", {{"d", std::to_string(d)}, {"M", std::to_string(M)}}, seed});
}

template <typename Scalar>
BasicSubspace<Scalar> character_subspace(const FrequencySet& freqs) {
  const long N = freqs.N;
  if (freqs.S.empty()) throw DomainError("character_subspace: empty frequency set");
  std::string listed;
  for (auto k : freqs.S) listed += (listed.empty() ? "" : " ") + std::to_string(k);
  Provenance prov{"character",
                  {{"N", std::to_string(N)}, {"S", listed}, {"construction", to_string(freqs.construction)},
                   {"field", eucsec::to_string(field_of<Scalar>())}},
                  0};
  auto angle = [N](long k, long j) {
    // reduce k*j mod N first so the argument stays small
    const long r = static_cast<long>((static_cast<long long>(k) * j) % N);
    return 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(N);
  };
  if constexpr (is_complex_v<Scalar>) {
    MatrixX<Scalar> raw(N, static_cast<Eigen::Index>(freqs.S.size()));
    for (std::size_t c = 0; c < freqs.S.size(); ++c)
      for (long j = 0; j < N; ++j)
        raw(j, static_cast<Eigen::Index>(c)) = std::polar(1.0 / std::sqrt(static_cast<double>(N)), angle(freqs.S[c], j));
    return orthonormalize(raw, std::move(prov));
  } else {
    std::vector<long> reps;
    for (auto k : freqs.S) {
      const long r = std::min(k % N, N - k % N) % N;
      if (std::find(reps.begin(), reps.end(), r) == reps.end()) reps.push_back(r);
    }
    std::vector<Eigen::VectorXd> cols;
    for (auto r : reps) {
      Eigen::VectorXd c(N);
      Eigen::VectorXd s(N);
      for (long j = 0; j < N; ++j) {
        c(j) = std::cos(angle(r, j));
        s(j) = std::sin(angle(r, j));
      }
      cols.push_back(c);
      if (r != 0 && 2 * r != N) cols.push_back(s);
    }
    Eigen::MatrixXd raw(N, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) raw.col(static_cast<Eigen::Index>(i)) = cols[i];
    return orthonormalize(raw, std::move(prov));
  }
}

template Subspace character_subspace<double>(const FrequencySet&);
template ComplexSubspace character_subspace<Complex>(const FrequencySet&);

long largest_prime_at_most(long n) {
  for (long c = n; c >= 2; --c) {
    bool prime = true;
    for (long f = 2; f * f <= c && prime; ++f) prime = c % f != 0;
    if (prime) return c;
  }
  return 0;
}

FrequencySet sidon_frequencies(long N) {
  if (N < 8) throw DomainError("sidon_frequencies: N must be >= 8");
  long m = static_cast<long>(std::sqrt(static_cast<double>(N) / 2.0));
  while (2 * (m + 1) * (m + 1) <= N) ++m;
  while (2 * m * m > N) --m;
  const long q = largest_prime_at_most(m);
  std::vector<long> s;
  for (long k = 0; k < q; ++k) {
    const long v = 2 * q * k + (k * k) % q;
    if (v < N) s.push_back(v);
  }
  return make_frequency_set(N, std::move(s), Construction::Sidon);
}

FrequencySet random_frequencies(long N, long size, std::uint64_t seed) {
  if (size < 1 || size > N - 1) throw DomainError("random_frequencies: need 1 <= size <= N-1");
  Rng rng(seed);
  // partial Fisher-Yates over 1..N-1
  std::vector<long> pool(static_cast<std::size_t>(N - 1));
  for (long i = 0; i < N - 1; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
  for (long i = 0; i < size; ++i) {
    const auto j = static_cast<long>(i + static_cast<long>(rng.below(static_cast<std::uint64_t>(N - 1 - i))));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(size));
  return make_frequency_set(N, std::move(pool), Construction::Random);
}

long kashin_dimension(long N, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("kashin: eta must lie in (0, 1)");
  const double codim = eta * static_cast<double>(N);
  if (codim < 1.0 - 1e-12) throw DomainError("kashin: need N * eta >= 1");
  const long c = static_cast<long>(std::ceil(codim - 1e-9));
  const long d = N - c;
  if (d < 1) throw DomainError("kashin: eta leaves no dimensions");
  return d;
}

KashinSample kashin_sample(long N, double eta, std::uint64_t seed, const HeuristicOptions& options) {
  KashinSample ks;
  ks.eta = eta;
  ks.N = N;
  ks.d = kashin_dimension(N, eta);
  ks.seed = seed;
  ks.subspace = gaussian_subspace<double>(N, ks.d, seed);
  HeuristicOptions opts = options;
  opts.seed = derive_seed(seed, {0x6b61});
  ks.lambda_min = lambda_heuristic(ks.subspace, 1.0, Target::Min, Measure::Counting, opts);
  ks.measured_c = ks.lambda_min.value / std::sqrt(static_cast<double>(N));
  return ks;
}

}  // namespace eucsec::gen
