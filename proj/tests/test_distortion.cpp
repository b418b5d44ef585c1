#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "eucsec/distortion.hpp"
#include "eucsec/generators.hpp"
#include "eucsec/random.hpp"
#include "oracles.hpp"

using namespace eucsec;

namespace {

Subspace random_subspace(oracle::Gen& g, long n, long d) { return orthonormalize(g.matrix(n, d)); }

Subspace permuted_and_flipped(const Subspace& e, oracle::Gen& g) {
  const long n = e.ambient_dim();
  std::vector<long> perm(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (long i = n - 1; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(g.between(0, i))]);
  Eigen::MatrixXd b(n, e.dim());
  for (long i = 0; i < n; ++i) b.row(i) = (g.normal() < 0 ? -1.0 : 1.0) * e.basis.row(perm[static_cast<std::size_t>(i)]);
  // rotate inside the subspace too
  const Eigen::MatrixXd q = g.orthonormal(e.dim(), e.dim());
  return Subspace{b * q, {}};
}

}  // namespace

TEST_CASE("lambda_max_exact equals brute-force sign enumeration") {
  oracle::Gen g(21);
  for (int t = 0; t < 40; ++t) {
    const long n = g.between(1, 12);
    const long d = g.between(1, n);
    const auto e = random_subspace(g, n, d);
    const auto r = lambda_max_exact(e);
    CHECK(r.kind == ValueKind::Exact);
    CHECK(r.value == doctest::Approx(oracle::lambda_max_l1(e.basis)).epsilon(1e-12));
    REQUIRE(r.witness.size() == n);
    CHECK(r.witness.norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(norm_ratio(r.witness, 1.0, Measure::Counting) == doctest::Approx(r.value).epsilon(1e-12));
  }
}

TEST_CASE("lambda_min_exact equals the facet-enumeration oracle") {
  oracle::Gen g(22);
  for (int t = 0; t < 60; ++t) {
    const long d = g.between(1, 3);
    const long n = d == 3 ? g.between(3, 6) : g.between(d, 9);
    const auto e = random_subspace(g, n, d);
    const auto r = lambda_min_exact(e);
    CAPTURE(n);
    CAPTURE(d);
    CHECK(r.value == doctest::Approx(oracle::lambda_min_l1(e.basis)).epsilon(1e-10));
    CHECK(norm_ratio(r.witness, 1.0, Measure::Counting) == doctest::Approx(r.value).epsilon(1e-12));
  }
}

TEST_CASE("lines and the full space") {
  oracle::Gen g(23);
  for (long n = 1; n <= 9; ++n) {
    const auto line = random_subspace(g, n, 1);
    const double l1 = line.basis.col(0).cwiseAbs().sum();
    CHECK(lambda_min_exact(line).value == doctest::Approx(l1).epsilon(1e-13));
    CHECK(lambda_max_exact(line).value == doctest::Approx(l1).epsilon(1e-13));
    const auto full = random_subspace(g, n, n);
    CHECK(lambda_min_exact(full).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lambda_max_exact(full).value == doctest::Approx(std::sqrt(static_cast<double>(n))).epsilon(1e-12));
  }
}

TEST_CASE("coordinate subspaces saturate both sides") {
  for (long n = 1; n <= 10; ++n)
    for (long d = 1; d <= n; ++d) {
      const auto e = gen::coordinate_subspace(n, d);
      VertexStats stats;
      CHECK(lambda_min_exact(e, Measure::Counting, kDefaultVertexBudget, &stats).value ==
            doctest::Approx(1.0).epsilon(1e-12));
      CHECK(lambda_max_exact(e).value == doctest::Approx(std::sqrt(static_cast<double>(d))).epsilon(1e-12));
      if (n > d && d > 1) CHECK(stats.degenerate > 0);
    }
}

TEST_CASE("exact values are invariant under coordinate permutations, sign flips and basis rotations") {
  oracle::Gen g(24);
  for (int t = 0; t < 25; ++t) {
    const long n = g.between(2, 10);
    const long d = g.between(1, n);
    const auto e = random_subspace(g, n, d);
    const auto f = permuted_and_flipped(e, g);
    CHECK(lambda_min_exact(f).value == doctest::Approx(lambda_min_exact(e).value).epsilon(1e-10));
    CHECK(lambda_max_exact(f).value == doctest::Approx(lambda_max_exact(e).value).epsilon(1e-12));
  }
}

TEST_CASE("normalized measure divides by N^{1/p-1/2}") {
  oracle::Gen g(25);
  const auto e = random_subspace(g, 9, 4);
  const double s = std::sqrt(9.0);
  CHECK(lambda_min_exact(e, Measure::Normalized).value == doctest::Approx(lambda_min_exact(e).value / s).epsilon(1e-13));
  CHECK(lambda_max_exact(e, Measure::Normalized).value == doctest::Approx(lambda_max_exact(e).value / s).epsilon(1e-13));
  HeuristicOptions o;
  o.seed = 4;
  const double sc = std::pow(9.0, 1.0 / 1.5 - 0.5);
  CHECK(lambda_heuristic(e, 1.5, Target::Max, Measure::Normalized, o).value ==
        doctest::Approx(lambda_heuristic(e, 1.5, Target::Max, Measure::Counting, o).value / sc).epsilon(1e-13));
}

TEST_CASE("vertex budget") {
  CHECK(vertex_candidates(10, 3) == 45);
  CHECK(vertex_candidates(10, 1) == 1);
  CHECK(vertex_candidates(360, 2) == 360);
  CHECK(vertex_candidates(200, 100) == std::numeric_limits<long long>::max());
  oracle::Gen g(26);
  const auto e = random_subspace(g, 12, 5);
  CHECK_THROWS_AS(lambda_min_exact(e, Measure::Counting, 100), CapExceededError);
  CHECK_THROWS_AS(lambda_max_exact(random_subspace(g, 22, 2)), CapExceededError);
  EvaluateOptions eo;
  eo.vertex_budget = 100;
  const auto est = evaluate(e, 1.0, Measure::Counting, eo);
  CHECK(est.lambda_min.kind == ValueKind::HeuristicUpperBound);
  CHECK(est.lambda_max.kind == ValueKind::Exact);
}

TEST_CASE("heuristics bracket the exact values from the correct side") {
  oracle::Gen g(27);
  int min_hits = 0, max_hits = 0, total = 0;
  for (int t = 0; t < 40; ++t) {
    const long n = g.between(3, 11);
    const long d = g.between(2, n - 1);
    const auto e = random_subspace(g, n, d);
    const double lmin = lambda_min_exact(e).value;
    const double lmax = lambda_max_exact(e).value;
    HeuristicOptions o;
    o.seed = static_cast<std::uint64_t>(t);
    const auto hmin = lambda_heuristic(e, 1.0, Target::Min, Measure::Counting, o);
    const auto hmax = lambda_heuristic(e, 1.0, Target::Max, Measure::Counting, o);
    CHECK(hmin.kind == ValueKind::HeuristicUpperBound);
    CHECK(hmax.kind == ValueKind::HeuristicLowerBound);
    CHECK(hmin.value >= lmin * (1 - 1e-12));
    CHECK(hmax.value <= lmax * (1 + 1e-12));
    CHECK(e.projection_residual(hmin.witness) < 1e-12);
    CHECK(norm_ratio(hmin.witness, 1.0, Measure::Counting) == doctest::Approx(hmin.value).epsilon(1e-12));
    min_hits += hmin.value <= lmin + 1e-9;
    max_hits += hmax.value >= lmax - 1e-9;
    ++total;
  }
  CHECK(min_hits == total);
  CHECK(max_hits == total);
}

TEST_CASE("heuristic lambda_max on hyperplanes, where single sign flips stall") {
  // d = N - 1: |B^T eps|^2 = N - <u, eps>^2, a partition problem with many near
  // ties. Same contract as the acceptance run: 50 restarts within 1e-6, at most
  // one case in 40 may need a 10x retry, and the retry must land.
  oracle::Gen g(27);
  int retried = 0;
  for (int t = 0; t < 40; ++t) {
    const long n = g.between(8, 12);
    const auto e = random_subspace(g, n, n - 1);
    const double x = oracle::lambda_max_l1(e.basis);
    HeuristicOptions o;
    o.restarts = 50;
    o.seed = static_cast<std::uint64_t>(t);
    double h = lambda_heuristic(e, 1.0, Target::Max, Measure::Counting, o).value;
    CHECK(h <= x + 1e-12);
    if (x - h > 1e-6) {
      ++retried;
      o.restarts = 500;
      h = lambda_heuristic(e, 1.0, Target::Max, Measure::Counting, o).value;
      CHECK(x - h <= 1e-6);
    }
  }
  CHECK(retried <= 1);
}

TEST_CASE("heuristics are deterministic and monotone in restarts") {
  oracle::Gen g(28);
  const auto e = random_subspace(g, 30, 12);
  for (double p : {1.0, 1.5}) {
    double prev_min = 1e300, prev_max = 0.0;
    for (int r : {1, 3, 10}) {
      HeuristicOptions o;
      o.seed = 5;
      o.restarts = r;
      const auto a = lambda_heuristic(e, p, Target::Min, Measure::Counting, o);
      const auto b = lambda_heuristic(e, p, Target::Min, Measure::Counting, o);
      CHECK(a.value == b.value);
      CHECK(a.value <= prev_min);
      prev_min = a.value;
      const auto m = lambda_heuristic(e, p, Target::Max, Measure::Counting, o);
      CHECK(m.value >= prev_max);
      prev_max = m.value;
    }
  }
}

TEST_CASE("p = 2 has no distortion") {
  oracle::Gen g(29);
  const auto e = random_subspace(g, 8, 3);
  const auto est = evaluate(e, 2.0, Measure::Counting);
  CHECK(est.lambda_min.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.lambda_max.value == doctest::Approx(1.0).epsilon(1e-12));
  Rng rng(1);
  const auto z = orthonormalize(rng.gaussian_matrix<Complex>(8, 3));
  const auto ez = evaluate(z, 2.0, Measure::Normalized);
  CHECK(ez.lambda_min.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lp with p between 1 and 2 on a line is the line's own ratio") {
  oracle::Gen g(30);
  const auto e = random_subspace(g, 7, 1);
  for (double p : {1.2, 1.7}) {
    const double want = oracle::lp(e.basis.col(0), p);
    CHECK(lambda_heuristic(e, p, Target::Min).value == doctest::Approx(want).epsilon(1e-12));
    CHECK(lambda_heuristic(e, p, Target::Max).value == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("evaluate: theorem checks on random subspaces") {
  oracle::Gen g(31);
  for (int t = 0; t < 30; ++t) {
    const long n = g.between(2, 12);
    const long d = g.between(1, n);
    const auto e = random_subspace(g, n, d);
    const auto est = evaluate(e, 1.0, Measure::Counting);
    CHECK(est.lambda_min.kind == ValueKind::Exact);
    CHECK(est.lambda_max.kind == ValueKind::Exact);
    CHECK(est.bound_check.applicable);
    CHECK(est.bound_check.min_ok);
    CHECK(est.bound_check.max_ok);
    CHECK(est.bound_check.sandwich_ok);
    CHECK_FALSE(est.bound_check.violation);
    CHECK(est.lambda_min.value <= bounds::thm1_upper(n, d) + 1e-9);
    CHECK(est.lambda_max.value >= std::sqrt(static_cast<double>(d)) - 1e-9);
    CHECK(est.distortion() >= 1.0 - 1e-12);
  }
}

TEST_CASE("evaluate: complex p = 1 stays in the sandwich and under the complex ceiling on average") {
  Rng rng(32);
  for (int t = 0; t < 5; ++t) {
    const auto z = orthonormalize(rng.gaussian_matrix<Complex>(12, 3));
    const auto est = evaluate(z, 1.0, Measure::Counting);
    CHECK(est.lambda_min.kind == ValueKind::HeuristicUpperBound);
    CHECK(est.bound_check.sandwich_ok);
    CHECK_FALSE(est.bound_check.violation);
  }
}

TEST_CASE("gaussian_l1_mean closed form matches Monte Carlo") {
  oracle::Gen g(33);
  for (int t = 0; t < 4; ++t) {
    const long n = g.between(3, 20);
    const long d = g.between(1, n);
    const auto e = random_subspace(g, n, d);
    double acc = 0.0;
    const int samples = 100000;
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd y(d);
      for (long j = 0; j < d; ++j) y(j) = g.normal();
      acc += (e.basis * y).cwiseAbs().sum();
    }
    const double closed = gaussian_l1_mean(e);
    CHECK(std::abs(acc / samples - closed) < 0.01 * closed);
    CHECK(closed <= std::sqrt(2.0 / std::numbers::pi) * std::sqrt(static_cast<double>(d * n)) * (1 + 1e-12));
  }
  Rng rng(2);
  const auto z = orthonormalize(rng.gaussian_matrix<Complex>(10, 4));
  double acc = 0.0;
  for (int s = 0; s < 100000; ++s) {
    Eigen::VectorXcd y(4);
    for (int j = 0; j < 4; ++j) y(j) = Complex(g.normal(), g.normal()) / std::sqrt(2.0);
    acc += (z.basis * y).cwiseAbs().sum();
  }
  CHECK(std::abs(acc / 100000 - gaussian_l1_mean(z)) < 0.01 * gaussian_l1_mean(z));
}

TEST_CASE("trig subspace: normalized lambda_min is sqrt(8)/pi") {
  const double target = std::sqrt(8.0) / std::numbers::pi;
  double prev_err = 1.0;
  for (long n : {90L, 180L, 360L, 720L}) {
    const auto e = gen::trig_subspace(n);
    const auto r = lambda_min_exact(e, Measure::Normalized);
    const double err = std::abs(r.value - target);
    CHECK(err < prev_err);
    prev_err = err;
    if (n == 360) CHECK(err < 2e-3);
  }
}
