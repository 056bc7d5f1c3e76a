// One line per acceptance criterion. Pass criterion numbers to run a subset.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "Highs.h"
#include "polarize/hierarchy.hpp"
#include "polarize/lp.hpp"
#include "polarize/moments.hpp"
#include "polarize/nmf.hpp"

using namespace polarize;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

HierarchySpec plus(int n) { return HierarchySpec{n, Variant::Plus, PolarizationKind::Identity, ConstraintFamily::FacetExtensions}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> lattice(int points, double hi = 1.0) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(hi * i / (points - 1));
  return out;
}

Verdict variable_count() {
  const auto t0 = Clock::now();
  const Problem p = nested_rectangles_problem(0.5, 0.5);
  const std::uint64_t expected[] = {90, 2475, 36300};
  bool ok = true;
  std::string got;
  for (int n = 1; n <= 3; ++n) {
    const std::uint64_t c = count_indices(n, p.spaces);
    const std::uint64_t formula = multichoose(10, static_cast<std::uint64_t>(n)) * multichoose(9, static_cast<std::uint64_t>(n));
    ok = ok && c == expected[n - 1] && c == formula && MomentIndexer(n, p.spaces).size() == static_cast<std::int64_t>(c);
    got += (n > 1 ? "/" : "") + std::to_string(c);
  }
  const double t = seconds_since(t0);
  return {ok && t < 1.0, fmt("variable count %s in %.3f s", got.c_str(), t)};
}

Verdict feasible_side() {
  // 5x5 grid on [0, 0.4]^2, where (1+a)(1+b) <= 1.96
  const auto t0 = Clock::now();
  const auto axis = lattice(5, 0.4);
  int checked = 0, feasible = 0, infeasible = 0;
  auto run = [&](double a, double b, int n) {
    const RegionRecord r = check_point(a, b, plus(n));
    ++checked;
    feasible += r.status == SolveStatus::Feasible;
    infeasible += r.status == SolveStatus::Infeasible;
    if (r.status != SolveStatus::Feasible || n == 3) {
      std::printf("#   (%g, %g) n=%d: %s, %.1f s\n", a, b, n, std::string(to_string(r.status)).c_str(), r.solve_seconds);
    }
  };
  bool inside = true;
  for (double a : axis) {
    for (double b : axis) {
      inside = inside && analytic_feasible(a, b);
      run(a, b, 2);
    }
  }
  for (double a : {axis.front(), axis.back()}) {
    for (double b : {axis.front(), axis.back()}) run(a, b, 3);
  }
  const double t = seconds_since(t0);
  return {inside && feasible == checked && t <= 1800.0,
          fmt("%d/%d feasible (25 at n=2, 4 corners at n=3), %d infeasible, %.1f s", feasible, checked, infeasible, t)};
}

Verdict corner_infeasible() {
  const auto t0 = Clock::now();
  const Problem p = nested_rectangles_problem(1.0, 1.0);
  const LinearProgram lp = build_lp(p, plus(3));
  const SolveOutcome out = solve(lp);
  const bool verified = out.certificate && verify_certificate(lp, *out.certificate);
  const double t = seconds_since(t0);
  return {out.status == SolveStatus::Infeasible && verified && t <= 600.0,
          fmt("(1,1) n=3 plus: %s, certificate %s, %.1f s", std::string(to_string(out.status)).c_str(),
              verified ? "verified" : "missing", t)};
}

Verdict soundness_sweep() {
  const auto t0 = Clock::now();
  ScanOptions o;
  o.grid = 16;
  ScanReport report;
  const auto records = scan_region(plus(2), o, &report);
  int infeasible = 0, bad = 0, unknown = 0;
  for (const auto& r : records) {
    if (r.status == SolveStatus::Unknown) ++unknown;
    if (r.status != SolveStatus::Infeasible) continue;
    ++infeasible;
    if (!((1 + r.a) * (1 + r.b) > 2 + 1e-9)) ++bad;
  }
  return {bad == 0, fmt("n=2 grid 16: %zu records, %d infeasible, %d unknown, %d inside the analytic region, %.1f s",
                        records.size(), infeasible, unknown, bad, seconds_since(t0))};
}

// Infeasible set of `narrow` contained in that of `wide` on an 8x8 grid.
// `wide` is only consulted where `narrow` is infeasible; the set relation
// does not depend on the other points.
Verdict inclusion(const HierarchySpec& narrow, const HierarchySpec& wide, const char* label) {
  const auto t0 = Clock::now();
  int narrow_infeasible = 0, unknown = 0, violations = 0;
  for (double a : lattice(8)) {
    for (double b : lattice(8)) {
      const SolveStatus s = check_point(a, b, narrow).status;
      if (s == SolveStatus::Unknown) ++unknown;
      if (s != SolveStatus::Infeasible) continue;
      ++narrow_infeasible;
      const SolveStatus w = check_point(a, b, wide).status;
      if (w != SolveStatus::Infeasible) {
        ++violations;
        std::printf("#   (%g, %g): %s\n", a, b, std::string(to_string(w)).c_str());
      }
    }
  }
  return {violations == 0 && unknown == 0,
          fmt("%s: %d of 64 points infeasible on the smaller side, %d unknown, %d violations, %.1f s", label,
              narrow_infeasible, unknown, violations, seconds_since(t0))};
}

Verdict level_nesting() {
  HierarchySpec n2 = plus(2);
  return inclusion(n2, plus(3), "infeasible(n=2) within infeasible(n=3)");
}

Verdict variant_dominance() {
  const HierarchySpec pol{3, Variant::Polarized, PolarizationKind::Identity, ConstraintFamily::FacetExtensions};
  return inclusion(pol, plus(3), "infeasible(polarized id, n=3) within infeasible(plus, n=3)");
}

Verdict lift_oracle() {
  const Problem p = nested_rectangles_problem(0.0, 0.0);
  // U uniform (4x3), V with an all-ones first row (3x4): U V = all 1/4
  PolytopePoint u{std::vector<double>(9, 0.25)};
  PolytopePoint v{std::vector<double>(8, 0.0)};
  for (int k = 0; k < 4; ++k) v.coordinates[static_cast<std::size_t>(k)] = 1.0;
  const std::vector<PolytopePoint> pts{u, v};
  const LinearProgram lp = build_lp(p, plus(3));
  const double residual = max_violation(lp, lift_product_point(p, pts, 3));
  return {residual < 1e-9, fmt("M(0,0) n=3 plus: %zu rows, max residual %.3g", lp.num_rows(), residual)};
}

Verdict small_oracle() {
  const Problem id = nmf_problem(NonnegMatrix::from(2, 2, {1, 0, 0, 1}), 1);
  const SolveStatus s = solve(build_lp(id, plus(1))).status;
  const Problem half = nmf_problem(NonnegMatrix::from(2, 2, {0.5, 0.5, 0.5, 0.5}), 1);
  bool all = true;
  for (int n = 1; n <= 3; ++n) all = all && solve(build_lp(half, plus(n))).status == SolveStatus::Feasible;
  return {s == SolveStatus::Infeasible && all,
          fmt("identity rank 1 n=1: %s; constant rank 1 n=1..3: %s", std::string(to_string(s)).c_str(),
              all ? "feasible" : "not all feasible")};
}

Verdict export_round_trip() {
  // (1,1) at n=3, the identity 2x2 rank-1 LP at n=1 and n=2, and seeded
  // random rectangle points at n=1 and n=2
  struct Sample {
    std::string label;
    LinearProgram lp;
  };
  std::vector<Sample> samples;
  samples.push_back({"M(1,1) n=3", build_lp(nested_rectangles_problem(1, 1), plus(3))});
  const Problem id = nmf_problem(NonnegMatrix::from(2, 2, {1, 0, 0, 1}), 1);
  samples.push_back({"identity k=1 n=1", build_lp(id, plus(1))});
  samples.push_back({"identity k=1 n=2", build_lp(id, plus(2))});
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (samples.size() < 10) {
    const double a = u(rng), b = u(rng);
    const int n = 1 + static_cast<int>(samples.size() % 2);
    samples.push_back({fmt("M(%.3f,%.3f) n=%d", a, b, n), build_lp(nested_rectangles_problem(a, b), plus(n))});
  }
  const auto dir = std::filesystem::temp_directory_path() / "polarize_acceptance";
  std::filesystem::create_directories(dir);
  int agree = 0, feasible = 0, infeasible = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    const SolveStatus mine = solve(s.lp).status;
    const auto path = dir / ("sample" + std::to_string(k) + ".mps");
    export_lp(s.lp, ExportFormat::FreeMps, path);
    Highs highs;
    highs.setOptionValue("output_flag", false);
    highs.setOptionValue("time_limit", 600.0);
    SolveStatus theirs = SolveStatus::Unknown;
    if (highs.readModel(path.string()) != HighsStatus::kError) {
      highs.run();
      const auto m = highs.getModelStatus();
      if (m == HighsModelStatus::kOptimal) theirs = SolveStatus::Feasible;
      if (m == HighsModelStatus::kInfeasible) theirs = SolveStatus::Infeasible;
    }
    std::filesystem::remove(path);
    const bool same = mine == theirs && mine != SolveStatus::Unknown;
    agree += same;
    feasible += mine == SolveStatus::Feasible;
    infeasible += mine == SolveStatus::Infeasible;
    if (!same) {
      std::printf("#   %s: internal %s, file %s\n", s.label.c_str(), std::string(to_string(mine)).c_str(),
                  std::string(to_string(theirs)).c_str());
    }
  }
  std::filesystem::remove(dir);
  return {agree == 10, fmt("%d/10 exported LPs agree (%d feasible, %d infeasible)", agree, feasible, infeasible)};
}

Verdict property_suite() {
  const Problem p = nested_rectangles_problem(0.5, 0.5);
  const auto& spaces = p.spaces;
  std::mt19937_64 rng(99);

  int perm_fail = 0;
  for (int t = 0; t < 1000; ++t) {
    const int level = 1 + static_cast<int>(rng() % 3);
    std::vector<Letter> w;
    for (int s = 0; s < 2; ++s) {
      const int k = static_cast<int>(rng() % static_cast<unsigned>(level + 1));
      for (int i = 0; i < k; ++i) {
        w.push_back(Letter::coordinate(s, static_cast<int>(rng() % static_cast<unsigned>(spaces[static_cast<std::size_t>(s)].free_dim()))));
      }
      w.push_back(Letter::unit(s));
    }
    auto shuffled = w;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    perm_fail += !(canonical_index(level, w, spaces) == canonical_index(level, shuffled, spaces));
  }

  int count_fail = 0;
  for (int d1 = 0; d1 <= 9; ++d1) {
    for (int d2 = 0; d2 <= 9; ++d2) {
      std::vector<StateSpace> sp;
      // 2 x c stochastic spaces have c free coordinates
      if (d1 > 0) sp.push_back(make_left_stochastic_space(2, d1, "a"));
      if (d2 > 0) sp.push_back(make_left_stochastic_space(2, d2, "b"));
      if (sp.empty()) continue;
      for (int n = 0; n <= 3; ++n) count_fail += enumerate_indices(n, sp).size() != count_indices(n, sp);
    }
  }

  const bool pi_ok = check_pi_soundness(PolarizationKind::Identity, 16, 100) &&
                     check_pi_soundness(PolarizationKind::HilbertSchmidt, 16, 100) &&
                     check_pi_soundness(PolarizationKind::MatrixProduct, 16, 100, 1, std::make_pair(4, 4));

  const LinearProgram lp = build_lp(nmf_problem(NonnegMatrix::from(2, 2, {1, 0, 0, 1}), 1), plus(2));
  const SolveOutcome out = solve(lp);
  int accepted = 0;
  bool base_ok = out.certificate && verify_certificate(lp, *out.certificate);
  std::normal_distribution<double> noise(0.0, 1e-3);
  for (int t = 0; base_ok && t < 100; ++t) {
    FarkasRay r = *out.certificate;
    for (double& v : r.rows) v += noise(rng);
    for (double& v : r.bounds) v += noise(rng);
    accepted += verify_certificate(lp, r, 1e-7);
  }
  return {perm_fail == 0 && count_fail == 0 && pi_ok && base_ok && accepted == 0,
          fmt("permutation invariance %d/1000 failures, count/enumerate %d mismatches, pi soundness %s, "
              "perturbed rays accepted %d/100",
              perm_fail, count_fail, pi_ok ? "ok" : "failed", accepted)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"variable count", variable_count},       {"feasible side", feasible_side},
      {"corner infeasibility", corner_infeasible}, {"soundness sweep", soundness_sweep},
      {"level nesting", level_nesting},         {"variant dominance", variant_dominance},
      {"lift oracle", lift_oracle},             {"small-instance oracle", small_oracle},
      {"export round-trip", export_round_trip}, {"property suite", property_suite},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int number = static_cast<int>(k) + 1;
    if (!selected.empty() && selected.count(number) == 0) continue;
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %2d %-22s %s  %s\n", number, criteria[k].first, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
