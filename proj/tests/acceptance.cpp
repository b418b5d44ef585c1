// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset, and --report PATH to also write the lines to a
// file. Exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eucsec/bounds.hpp"
#include "eucsec/conjecture.hpp"
#include "eucsec/distortion.hpp"
#include "eucsec/generators.hpp"
#include "eucsec/harness/experiment.hpp"
#include "eucsec/harness/report.hpp"
#include "eucsec/harness/runner.hpp"
#include "oracles.hpp"

using namespace eucsec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome mu_moments() {
  const double target = std::sqrt(2.0 / std::numbers::pi);
  const double err1 = std::abs(bounds::gaussian_mean_norm(1, 1.0) - target);
  bool increasing = true;
  long first_bad = 0;
  double prev = 0.0;
  for (long d = 1; d <= 2000; ++d) {
    const double v = bounds::gaussian_mean_norm(d, 1.0) / std::sqrt(static_cast<double>(d));
    if (!(v > prev) && increasing) {
      increasing = false;
      first_bad = d;
    }
    prev = v;
  }
  const bool ok = err1 <= 1e-12 && increasing && prev > 0.999;
  return {ok, fmt("|mu(1,1) - sqrt(2/pi)| = %.3e, increasing = %s%s, mu_2000/sqrt(2000) = %.9f", err1,
                  increasing ? "yes" : "no", increasing ? "" : fmt(" (first break at d=%ld)", first_bad).c_str(),
                  prev)};
}

Outcome theorem1_sweep() {
  oracle::Gen g(20260101);
  long violations = 0;
  double worst_min = -1e300, worst_max = -1e300;
  for (int t = 0; t < 1000; ++t) {
    const long n = g.between(1, 14);
    const long d = g.between(1, n);
    const auto e = gen::gaussian_subspace<double>(n, d, 1000 + static_cast<std::uint64_t>(t));
    const double lmin = lambda_min_exact(e).value;
    const double lmax = lambda_max_exact(e).value;
    const double over = lmin - bounds::thm1_upper(n, d);
    const double under = std::sqrt(static_cast<double>(d)) - lmax;
    worst_min = std::max(worst_min, over);
    worst_max = std::max(worst_max, under);
    if (over > 1e-9 || under > 1e-9) ++violations;
  }
  return {violations == 0, fmt("1000 subspaces, violations = %ld, max(lambda_min - thm1) = %.3e, "
                               "max(sqrt(d) - lambda_max) = %.3e",
                               violations, worst_min, worst_max)};
}

Outcome trig_saturation() {
  const double target = std::sqrt(8.0) / std::numbers::pi;
  const double v360 = lambda_min_exact(gen::trig_subspace(360), Measure::Normalized).value;
  const double v720 = lambda_min_exact(gen::trig_subspace(720), Measure::Normalized).value;
  const double e360 = std::abs(v360 - target), e720 = std::abs(v720 - target);
  return {e360 <= 2e-3 && e720 < e360,
          fmt("N=360: %.10f (err %.3e), N=720: %.10f (err %.3e), target %.10f", v360, e360, v720, e720, target)};
}

Outcome coordinate_exactness() {
  double worst = 0.0;
  long cells = 0;
  for (long n = 1; n <= 14; ++n)
    for (long d = 1; d <= n; ++d) {
      const auto e = gen::coordinate_subspace(n, d);
      worst = std::max(worst, std::abs(lambda_min_exact(e).value - 1.0));
      worst = std::max(worst, std::abs(lambda_max_exact(e).value - std::sqrt(static_cast<double>(d))));
      ++cells;
    }
  return {worst <= 1e-10, fmt("%ld (N,d) pairs, max deviation %.3e", cells, worst)};
}

Outcome trace_lemma() {
  oracle::Gen g(5);
  long failures = 0;
  double worst = -1e300;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::MatrixXd m = g.matrix(g.between(1, 12), g.between(1, 12));
    try {
      const auto r = conj::trace_lemma_check(m);
      worst = std::max(worst, (r.trace - r.norm) / std::max(1.0, r.norm));
      if (!r.holds) ++failures;
    } catch (const TheoremViolation&) {
      ++failures;
    }
  }
  double eq = 0.0;
  for (long k = 1; k <= 12; ++k) {
    const auto r = conj::trace_lemma_check(Eigen::MatrixXd::Identity(k, k));
    eq = std::max(eq, std::abs(r.norm - r.trace));
  }
  return {failures == 0 && eq <= 1e-9,
          fmt("1000 T, failures = %ld, max relative (tr - norm) = %.3e, identity |norm - tr| = %.3e", failures, worst,
              eq)};
}

Outcome hs_vs_21() {
  oracle::Gen g(6);
  long failures = 0;
  double min_gap = 1e300;
  for (int t = 0; t < 1000; ++t) {
    try {
      const auto r = conj::hs_vs_21_check(g.matrix(8, 8));
      min_gap = std::min(min_gap, r.norm21 - r.hs);
      if (!r.holds) ++failures;
    } catch (const TheoremViolation&) {
      ++failures;
    }
  }
  return {failures == 0, fmt("1000 8x8, failures = %ld, min(|T|_21 - |T|_HS) = %.6f", failures, min_gap)};
}

Outcome gaussian_mean_identity() {
  oracle::Gen g(7);
  double worst = 0.0;
  bool ceiling_ok = true;
  for (int s = 0; s < 20; ++s) {
    const long n = g.between(2, 40);
    const long d = g.between(1, n);
    const Subspace e = orthonormalize(g.matrix(n, d));
    const double closed = gaussian_l1_mean(e);
    const double ceiling = std::sqrt(2.0 / std::numbers::pi) * std::sqrt(static_cast<double>(d * n));
    if (closed > ceiling * (1.0 + 1e-12)) ceiling_ok = false;
    double sum = 0.0;
    Eigen::VectorXd x(d);
    for (int k = 0; k < 100000; ++k) {
      for (long i = 0; i < d; ++i) x(i) = g.normal();
      sum += (e.basis * x).cwiseAbs().sum();
    }
    worst = std::max(worst, std::abs(sum / 100000.0 - closed) / closed);
  }
  return {worst < 0.01 && ceiling_ok,
          fmt("20 subspaces, max relative MC error %.4f%%, ceiling respected = %s", 100.0 * worst,
              ceiling_ok ? "yes" : "no")};
}

Outcome heuristic_fidelity() {
  oracle::Gen g(8);
  const int cells = 200;
  int retried = 0, failed = 0;
  double worst_max = 0.0, worst_min = 0.0;
  for (int c = 0; c < cells; ++c) {
    const long n = g.between(2, 12);
    const long d = g.between(1, n);
    const Subspace e = orthonormalize(g.matrix(n, d));
    const double xmax = lambda_max_exact(e).value;
    const double xmin = lambda_min_exact(e).value;

    auto attempt = [&](int scale) {
      HeuristicOptions o;
      o.seed = static_cast<std::uint64_t>(c);
      o.restarts = 50 * scale;
      const double hmax = lambda_heuristic(e, 1.0, Target::Max, Measure::Counting, o).value;
      o.restarts = 200 * scale;
      const double hmin = lambda_heuristic(e, 1.0, Target::Min, Measure::Counting, o).value;
      return std::pair{std::abs(hmax - xmax), std::abs(hmin - xmin)};
    };
    auto [dmax, dmin] = attempt(1);
    if (dmax > 1e-6 || dmin > 1e-4) {
      ++retried;
      std::tie(dmax, dmin) = attempt(10);
      if (dmax > 1e-6 || dmin > 1e-4) ++failed;
    }
    worst_max = std::max(worst_max, dmax);
    worst_min = std::max(worst_min, dmin);
  }
  return {failed == 0 && retried * 100 <= cells,
          fmt("%d subspaces, retried %d, failed after retry %d, max |dmax| = %.3e, max |dmin| = %.3e", cells, retried,
              failed, worst_max, worst_min)};
}

Outcome conjecture_sweep() {
  std::string detail;
  bool ok = true;
  for (auto variant : {conj::Variant::B, conj::Variant::C}) {
    conj::SearchOptions o;
    o.variant = variant;
    o.p_grid = {1.0, 1.25, 1.5, 1.75};
    o.instances_per_cell = 500;
    o.seed = 2026;
    const auto a = conj::search(o);
    const auto b = conj::search(o);
    std::ostringstream sa, sb;
    conj::write_leaderboard_csv(sa, a.leaderboard);
    conj::write_leaderboard_csv(sb, b.leaderboard);
    const bool deterministic = sa.str() == sb.str();

    double min_exact = 1e300, min_other = 1e300;
    for (const auto& c : a.cells) {
      double& slot = c.p == 1.0 ? min_exact : min_other;
      slot = std::min(slot, c.min_slack);
    }
    const bool v_ok = deterministic && min_exact >= -1e-9 && a.theorem_violations == 0;
    ok = ok && v_ok;
    detail += fmt("%s: %zu instances, min slack p=1 %.3e, p>1 %.3e, deterministic %s; ", conj::to_string(variant),
                  a.leaderboard.size(), min_exact, min_other, deterministic ? "yes" : "no");
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome kashin_property() {
  const std::string spec_text =
      "name: acceptance-kashin\n"
      "mode: kashin\n"
      "kashin: {N: 256, eta: 0.5}\n"
      "seeds: {base: 10, count: 100}\n"
      "budgets: {restarts: 1, max_vertex_hops: 100}\n";
  const auto spec = harness::parse_spec(spec_text);
  harness::validate(spec);
  const auto r1 = harness::run_experiment(spec);
  const auto r2 = harness::run_experiment(spec);
  std::ostringstream s1, s2;
  harness::write_csv(s1, r1.table);
  harness::write_csv(s2, r2.table);

  const double ceiling = bounds::thm1_upper(256, 128) / 16.0;
  const auto col = std::find(r1.table.columns.begin(), r1.table.columns.end(), "measured_c") - r1.table.columns.begin();
  double lo = 1e300, hi = -1e300;
  long outside = 0;
  for (const auto& row : r1.table.rows) {
    const double c = std::get<double>(row[static_cast<std::size_t>(col)]);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    if (!(c > 0.0) || c > ceiling) ++outside;
  }
  const bool identical = s1.str() == s2.str();
  return {r1.table.rows.size() == 100 && outside == 0 && identical,
          fmt("%zu samples, measured_c in [%.6f, %.6f], ceiling %.6f, outside %ld, rerun byte-identical %s",
              r1.table.rows.size(), lo, hi, ceiling, outside, identical ? "yes" : "no")};
}

// Chi mean of order 2d from m_2 = sqrt(pi/2) and m_{k+2} = m_k (k+1)/k.
double chi_mean_even(long d) {
  long double m = std::sqrt(std::numbers::pi_v<long double> / 2.0L);
  for (long j = 1; j < d; ++j) m *= (2.0L * j + 1.0L) / (2.0L * j);
  return static_cast<double>(m);
}

Outcome complex_surface() {
  double worst = 0.0;
  long cells = 0;
  for (long n : {1L, 2L, 7L, 64L, 1000L, 4096L, 100000L})
    for (long d : {1L, 2L, 3L, 10L, 50L, 500L, 4096L, 100000L}) {
      if (d > n) continue;
      const double expect = std::sqrt(std::numbers::pi) / 2.0 * std::sqrt(static_cast<double>(n)) *
                            std::sqrt(2.0 * static_cast<double>(d)) / chi_mean_even(d);
      const double got = bounds::thm2_upper(n, d, 1.0, Field::Complex);
      worst = std::max(worst, std::abs(got - expect) / expect);
      ++cells;
    }
  return {worst <= 1e-12, fmt("%ld (N,d) pairs, max relative deviation %.3e", cells, worst)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "mu-moments", 1.0, mu_moments},
      {2, "exact bound sweep", 300.0, theorem1_sweep},
      {3, "trig saturation", 10.0, trig_saturation},
      {4, "coordinate exactness", 0.0, coordinate_exactness},
      {5, "trace lemma", 120.0, trace_lemma},
      {6, "HS vs 2->1", 0.0, hs_vs_21},
      {7, "gaussian mean identity", 0.0, gaussian_mean_identity},
      {8, "heuristic fidelity", 0.0, heuristic_fidelity},
      {9, "conjecture evidence sweep", 1800.0, conjecture_sweep},
      {10, "kashin property", 0.0, kashin_property},
      {11, "complex bound surface", 0.0, complex_surface},
  };
  std::set<int> selected;
  std::string report_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--report" && i + 1 < argc)
      report_path = argv[++i];
    else if (const int id = std::atoi(argv[i]); id >= 1 && id <= static_cast<int>(all.size()))
      selected.insert(id);
    else {
      std::fprintf(stderr, "unknown argument '%s' (expected 1-%zu or --report PATH)\n", argv[i], all.size());
      return 2;
    }
  }
  std::ofstream report;
  if (!report_path.empty()) report.open(report_path);

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_seconds <= 0.0 || secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    const std::string line = fmt("criterion %2d %-26s %s  (%.2fs%s) ", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                                 in_time ? "" : fmt(", limit %.0fs", c.limit_seconds).c_str()) +
                             o.detail;
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    if (report) report << line << "\n" << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
