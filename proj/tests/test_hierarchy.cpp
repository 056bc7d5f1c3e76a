#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "polarize/error.hpp"
#include "polarize/hierarchy.hpp"
#include "polarize/nmf.hpp"
#include "support.hpp"

using namespace polarize;

namespace {

HierarchySpec plus(int n, ConstraintFamily family = ConstraintFamily::FacetExtensions) {
  return HierarchySpec{n, Variant::Plus, PolarizationKind::Identity, family};
}
HierarchySpec polarized(int n, PolarizationKind pi = PolarizationKind::Identity) {
  return HierarchySpec{n, Variant::Polarized, pi, ConstraintFamily::FacetExtensions};
}

int column_named(const LinearProgram& lp, const std::string& name) {
  const auto& names = lp.variable_names();
  const auto it = std::find(names.begin(), names.end(), name);
  REQUIRE(it != names.end());
  return static_cast<int>(it - names.begin());
}

void check_identical(const LinearProgram& a, const LinearProgram& b) {
  CHECK(a.variable_names() == b.variable_names());
  CHECK(a.lower() == b.lower());
  CHECK(a.upper() == b.upper());
  CHECK(a.grades() == b.grades());
  REQUIRE(a.num_rows() == b.num_rows());
  CHECK(std::ranges::equal(a.row_start(), b.row_start()));
  CHECK(std::ranges::equal(a.columns(), b.columns()));
  CHECK(std::ranges::equal(a.values(), b.values()));
  bool same_rows = true;
  for (std::size_t r = 0; r < a.num_rows(); ++r) {
    const auto x = a.row(r);
    const auto y = b.row(r);
    same_rows = same_rows && x.relation == y.relation && x.rhs == y.rhs && x.kind == y.kind;
  }
  CHECK(same_rows);
  CHECK(std::ranges::equal(a.objective_columns(), b.objective_columns()));
  CHECK(std::ranges::equal(a.objective_values(), b.objective_values()));
  CHECK(a.objective_constant() == b.objective_constant());
}

using NamedRow = std::tuple<Relation, double, std::vector<std::pair<std::string, double>>>;

std::set<NamedRow> named_rows(const LinearProgram& lp) {
  std::set<NamedRow> out;
  const auto& names = lp.variable_names();
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const auto row = lp.row(r);
    std::vector<std::pair<std::string, double>> entries;
    for (std::size_t k = 0; k < row.columns.size(); ++k) {
      entries.emplace_back(names[static_cast<std::size_t>(row.columns[k])], row.values[k]);
    }
    std::sort(entries.begin(), entries.end());
    out.emplace(row.relation, row.rhs, std::move(entries));
  }
  return out;
}

}  // namespace

TEST_CASE("nested rectangles plus LP at n=3 has 36300 variables") {
  const LinearProgram lp = build_lp(nested_rectangles_problem(0.5, 0.5), plus(3));
  CHECK(lp.num_variables() == 36300);
  CHECK(lp.count_rows(RowKind::ConstraintMap) > 0);
  CHECK(lp.count_rows(RowKind::Polarized) == 0);
  CHECK(lp.lower()[0] == 1.0);
  CHECK(lp.upper()[0] == 1.0);
  CHECK(lp.grades()[0] == 0);
  CHECK(*std::max_element(lp.grades().begin(), lp.grades().end()) == 6);
}

TEST_CASE("identity 2x2 at rank 1 has contradictory equalities at n=1") {
  const Problem p = testing::identity_rank1();
  const LinearProgram lp = build_lp(p, plus(1));
  const int l11 = column_named(lp, canonical_name(MomentIndex{1, {{0}, {}}}, p.spaces));
  bool forced_one = false;
  bool forced_zero = false;
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const auto row = lp.row(r);
    if (row.kind != RowKind::ConstraintMap || row.relation != Relation::Equal) continue;
    const std::vector<int> cols(row.columns.begin(), row.columns.end());
    const std::vector<double> vals(row.values.begin(), row.values.end());
    // y[L11] - y[] = 0 and y[L11] = 0
    if (cols == std::vector<int>{0, l11} && vals == std::vector<double>{-1.0, 1.0}) forced_one = true;
    if (cols == std::vector<int>{l11} && vals == std::vector<double>{1.0}) forced_zero = true;
  }
  CHECK(forced_one);
  CHECK(forced_zero);
  CHECK(solve(lp).status == SolveStatus::Infeasible);
}

TEST_CASE("empty constraint map is feasible with optimum 0") {
  Problem p;
  p.spaces = {testing::segment()};
  p.constraint_map = AffineMap(0);
  const SolveOutcome out = solve(build_lp(p, plus(1)));
  CHECK(out.status == SolveStatus::Feasible);
  REQUIRE(out.objective_value);
  CHECK(*out.objective_value == 0.0);
}

TEST_CASE("polarized row counts") {
  const Problem p = nested_rectangles_problem(0.5, 0.5);
  CHECK(build_lp(p, polarized(3)).count_rows(RowKind::Polarized) == 256);
  CHECK(build_lp(p, polarized(2, PolarizationKind::HilbertSchmidt)).count_rows(RowKind::Polarized) == 1);
  CHECK(build_lp(p, polarized(2, PolarizationKind::MatrixProduct)).count_rows(RowKind::Polarized) == 16);
}

TEST_CASE("spec errors") {
  const Problem p = nested_rectangles_problem(0.5, 0.5);
  CHECK_THROWS_WITH_AS(build_lp(p, polarized(1)), doctest::Contains("LevelTooLow"), Error);
  CHECK_THROWS_WITH_AS(build_lp(p, plus(0)), doctest::Contains("LevelTooLow"), Error);
  Problem unshaped = testing::segment_product();
  unshaped.constraint_map = AffineMap(2);
  unshaped.constraint_map.add_term(0, 1.0, {Letter::coordinate(0, 0)});
  unshaped.constraint_map.add_term(1, 1.0, {Letter::coordinate(1, 0)});
  CHECK_THROWS_WITH_AS(build_lp(unshaped, polarized(2, PolarizationKind::MatrixProduct)),
                       doctest::Contains("ShapeRequired"), Error);
}

TEST_CASE("lift_product_point examples") {
  const Problem p = nested_rectangles_problem(0.0, 0.0);
  const auto points = testing::uniform_factorization();
  const LinearProgram lp = build_lp(p, plus(2));
  const auto y = lift_product_point(p, points, 2);
  CHECK(y.size() == lp.num_variables());
  CHECK(max_violation(lp, y) < 1e-12);

  CHECK(lift_product_point(p, points, 0) == std::vector<double>{1.0});

  Problem seg;
  seg.spaces = {testing::segment()};
  seg.constraint_map = AffineMap(0);
  const PolytopePoint half{{0.5}};
  const auto lifted = lift_product_point(seg, {&half, 1}, 2);
  CHECK(lifted == std::vector<double>{1.0, 0.5, 0.25});
  CHECK_THROWS_AS(lift_product_point(p, {points.data(), 1}, 2), Error);
}

TEST_CASE("lifted feasible points satisfy every relaxation") {
  // all values dyadic, so the lift and the rows are exact in binary
  const Problem nested = nested_rectangles_problem(0.0, 0.0);
  const auto pts = testing::uniform_factorization();
  const Problem constant = testing::constant_rank1();
  const std::vector<PolytopePoint> cpts{PolytopePoint{{0.5}}, PolytopePoint{}};
  const Problem segprod = testing::segment_product();
  const std::vector<PolytopePoint> spts{PolytopePoint{{0.5}}, PolytopePoint{{0.5}}};

  struct Case {
    const Problem* problem;
    const std::vector<PolytopePoint>* points;
  };
  for (const Case c : {Case{&nested, &pts}, Case{&constant, &cpts}, Case{&segprod, &spts}}) {
    for (int n = 1; n <= 3; ++n) {
      CAPTURE(n);
      const auto y = lift_product_point(*c.problem, *c.points, n);
      CHECK(max_violation(build_lp(*c.problem, plus(n)), y) < 1e-12);
      if (n <= 2) CHECK(max_violation(build_lp(*c.problem, plus(n, ConstraintFamily::FacetProducts)), y) < 1e-12);
      if (n >= 2) {
        CHECK(max_violation(build_lp(*c.problem, polarized(n)), y) < 1e-12);
        CHECK(max_violation(build_lp(*c.problem, polarized(n, PolarizationKind::HilbertSchmidt)), y) < 1e-12);
        if (c.problem->constraint_map.shape()) {
          CHECK(max_violation(build_lp(*c.problem, polarized(n, PolarizationKind::MatrixProduct)), y) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("reference builder produces the same LP") {
  std::vector<std::pair<Problem, HierarchySpec>> cases;
  for (int n = 1; n <= 3; ++n) cases.emplace_back(nested_rectangles_problem(0.3, 0.7), plus(n));
  cases.emplace_back(nested_rectangles_problem(1.0, 0.25), polarized(2));
  cases.emplace_back(nested_rectangles_problem(1.0, 0.25), polarized(3));
  cases.emplace_back(nested_rectangles_problem(0.5, 0.5), polarized(2, PolarizationKind::HilbertSchmidt));
  cases.emplace_back(nested_rectangles_problem(0.5, 0.5), polarized(2, PolarizationKind::MatrixProduct));
  cases.emplace_back(nested_rectangles_problem(0.5, 0.5), plus(2, ConstraintFamily::FacetProducts));
  cases.emplace_back(testing::identity_rank1(), plus(3, ConstraintFamily::FacetProducts));
  cases.emplace_back(testing::segment_product(), plus(3));
  for (const auto& [problem, spec] : cases) {
    CAPTURE(spec.level);
    check_identical(build_lp(problem, spec), reference::build_lp(problem, spec));
  }
}

TEST_CASE("parallel and serial max_violation agree") {
  const LinearProgram lp = build_lp(nested_rectangles_problem(0.2, 0.9), plus(3));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> x(lp.num_variables());
    for (double& v : x) v = u(rng);
    CHECK(max_violation(lp, x) == reference::max_violation(lp, x));
  }
}

TEST_CASE("level n-1 rows reappear at level n") {
  for (const auto& p : {nested_rectangles_problem(0.6, 0.1), testing::segment_product()}) {
    for (int n = 2; n <= 3; ++n) {
      for (Variant v : {Variant::Plus, Variant::Polarized}) {
        if (v == Variant::Polarized && n < 3) continue;
        HierarchySpec spec{n, v, PolarizationKind::Identity, ConstraintFamily::FacetExtensions};
        HierarchySpec lower = spec;
        lower.level = n - 1;
        const LinearProgram hi = build_lp(p, spec);
        const LinearProgram lo = build_lp(p, lower);
        const auto hi_rows = named_rows(hi);
        std::size_t missing = 0;
        for (const auto& row : named_rows(lo)) missing += hi_rows.count(row) == 0 ? 1 : 0;
        CAPTURE(n);
        CHECK(missing == 0);
        // bounds of shared variables agree
        std::map<std::string, std::pair<double, double>> bounds;
        for (std::size_t j = 0; j < hi.num_variables(); ++j) bounds[hi.variable_names()[j]] = {hi.lower()[j], hi.upper()[j]};
        for (std::size_t j = 0; j < lo.num_variables(); ++j) {
          CHECK(bounds.at(lo.variable_names()[j]) == std::make_pair(lo.lower()[j], lo.upper()[j]));
        }
      }
    }
  }
}

TEST_CASE("plus solutions satisfy the polarized equalities") {
  struct Case {
    Problem problem;
    int level;
  };
  std::vector<Case> cases;
  cases.push_back({nested_rectangles_problem(0.0, 0.0), 2});
  cases.push_back({nested_rectangles_problem(0.3, 0.6), 2});
  cases.push_back({nested_rectangles_problem(1.0, 1.0), 2});
  cases.push_back({testing::constant_rank1(), 3});
  cases.push_back({testing::segment_product(), 3});
  for (const auto& c : cases) {
    const SolveOutcome out = solve(build_lp(c.problem, plus(c.level)));
    REQUIRE(out.status == SolveStatus::Feasible);
    CHECK(max_violation(build_lp(c.problem, polarized(c.level)), *out.point) < 1e-7);
  }
}

TEST_CASE("full facet products refine the lite family") {
  const Problem id = testing::identity_rank1();
  for (int n = 1; n <= 2; ++n) {
    const SolveStatus lite = solve(build_lp(id, plus(n))).status;
    const SolveStatus full = solve(build_lp(id, plus(n, ConstraintFamily::FacetProducts))).status;
    CHECK(lite == SolveStatus::Infeasible);
    CHECK(full == SolveStatus::Infeasible);
  }
  for (double a : {0.0, 0.5, 1.0}) {
    for (double b : {0.0, 0.5, 1.0}) {
      const Problem p = nested_rectangles_problem(a, b);
      const SolveStatus lite = solve(build_lp(p, plus(1))).status;
      const SolveStatus full = solve(build_lp(p, plus(1, ConstraintFamily::FacetProducts))).status;
      CHECK(lite != SolveStatus::Unknown);
      CHECK(full != SolveStatus::Unknown);
      if (lite == SolveStatus::Infeasible) CHECK(full == SolveStatus::Infeasible);
    }
  }
  // every lite row is also present in the full family once both are built
  const Problem p = testing::segment_product();
  const auto full_rows = named_rows(build_lp(p, plus(2, ConstraintFamily::FacetProducts)));
  for (const auto& row : named_rows(build_lp(p, plus(2)))) {
    if (std::get<0>(row) == Relation::GreaterEqual) CHECK(full_rows.count(row) == 1);
  }
}

TEST_CASE("objective value is nondecreasing in the level") {
  const Problem p = testing::segment_product();
  double previous = -kInfinity;
  for (int n = 1; n <= 3; ++n) {
    const SolveOutcome out = solve(build_lp(p, plus(n)));
    REQUIRE(out.status == SolveStatus::Feasible);
    REQUIRE(out.objective_value);
    CAPTURE(n);
    CHECK(*out.objective_value >= previous - 1e-7);
    CHECK(*out.objective_value <= 1.0 + 1e-7);
    previous = *out.objective_value;
  }
  CHECK(previous >= 0.5 - 1e-7);
}

TEST_CASE("polarization images and soundness sampling") {
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{0.0, 1.0};
  CHECK(polarization_image(PolarizationKind::Identity, 2)(a, b) == std::vector<double>{1.0, 2.0, 2.0, 5.0});
  CHECK(polarization_image(PolarizationKind::HilbertSchmidt, 2)(a, b) == std::vector<double>{6.0});
  CHECK(polarization_image(PolarizationKind::MatrixProduct, 2, std::make_pair(1, 2))(a, b) ==
        std::vector<double>{1.0, 2.0, 2.0, 5.0});
  CHECK(polarization_image(PolarizationKind::MatrixProduct, 2, std::make_pair(2, 1))(a, b) ==
        std::vector<double>{6.0});
  CHECK_THROWS_AS(polarization_image(PolarizationKind::MatrixProduct, 3), Error);

  CHECK(check_pi_soundness(PolarizationKind::Identity, 5, 100));
  CHECK(check_pi_soundness(PolarizationKind::HilbertSchmidt, 16, 100));
  CHECK(check_pi_soundness(PolarizationKind::MatrixProduct, 16, 100, 1, std::make_pair(4, 4)));
  CHECK(check_pi_soundness(PolarizationKind::MatrixProduct, 16, 100));
  const PolarizationImage broken = [](std::span<const double>, std::span<const double>) {
    return std::vector<double>(4, 0.0);
  };
  CHECK_FALSE(check_pi_soundness(broken, 4, 100));
  CHECK_THROWS_AS(check_pi_soundness(PolarizationKind::Identity, 4, 0), Error);
}
