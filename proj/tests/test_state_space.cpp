#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "polarize/error.hpp"
#include "polarize/state_space.hpp"
#include "support.hpp"

using namespace polarize;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

// Vertices by brute force: every choice of free_dim facets held tight,
// solved by Gaussian elimination, kept when feasible.
std::vector<std::vector<double>> vertices(const StateSpace& s) {
  const int d = s.free_dim();
  const auto& facets = s.facets();
  const int m = static_cast<int>(facets.size());
  std::vector<std::vector<double>> out;
  std::vector<int> pick(static_cast<std::size_t>(d));
  auto solve_pick = [&]() {
    std::vector<std::vector<double>> a(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d + 1), 0.0));
    for (int r = 0; r < d; ++r) {
      const auto& g = facets[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
      for (const auto& [i, v] : g.coefficients) a[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] = v;
      a[static_cast<std::size_t>(r)][static_cast<std::size_t>(d)] = -g.constant;
    }
    for (int c = 0; c < d; ++c) {
      int p = c;
      for (int r = c; r < d; ++r) {
        if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) > std::abs(a[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)])) p = r;
      }
      if (std::abs(a[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)]) < 1e-12) return;
      std::swap(a[static_cast<std::size_t>(p)], a[static_cast<std::size_t>(c)]);
      for (int r = 0; r < d; ++r) {
        if (r == c) continue;
        const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] / a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        for (int k = c; k <= d; ++k) a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -= f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
      }
    }
    PolytopePoint x;
    for (int c = 0; c < d; ++c) x.coordinates.push_back(a[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)] / a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)]);
    if (!s.contains(x)) return;
    for (const auto& v : out) {
      bool same = true;
      for (int c = 0; c < d; ++c) same = same && std::abs(v[static_cast<std::size_t>(c)] - x.coordinates[static_cast<std::size_t>(c)]) < 1e-9;
      if (same) return;
    }
    out.push_back(x.coordinates);
  };
  auto rec = [&](auto&& self, int depth, int from) -> void {
    if (depth == d) {
      solve_pick();
      return;
    }
    for (int f = from; f < m; ++f) {
      pick[static_cast<std::size_t>(depth)] = f;
      self(self, depth + 1, f + 1);
    }
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace

TEST_CASE("segment space is valid") {
  const StateSpace s = testing::segment();
  CHECK(s.free_dim() == 1);
  CHECK(s.alphabet_size() == 2);
  CHECK(s.coordinate_range(0).lo == doctest::Approx(0.0));
  CHECK(s.coordinate_range(0).hi == doctest::Approx(1.0));
  CHECK(s.contains(s.probe_point()));
}

TEST_CASE("half-line is unbounded") {
  CHECK(kind_of([] { make_polytope_space("h", 1, {FacetFunctional{0.0, {{0, 1.0}}}}, {"x"}); }) ==
        ErrorKind::UnboundedSpace);
}

TEST_CASE("contradictory facets give an empty space") {
  CHECK(kind_of([] {
          make_polytope_space("e", 1, {FacetFunctional{-2.0, {{0, 1.0}}}, FacetFunctional{1.0, {{0, -1.0}}}}, {"x"});
        }) == ErrorKind::EmptySpace);
}

TEST_CASE("letter names must match free_dim") {
  CHECK(kind_of([] {
          make_polytope_space("s", 1, {FacetFunctional{0.0, {{0, 1.0}}}, FacetFunctional{1.0, {{0, -1.0}}}}, {});
        }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] {
          make_polytope_space("s", 2,
                              {FacetFunctional{0.0, {{0, 1.0}}}, FacetFunctional{1.0, {{0, -1.0}}},
                               FacetFunctional{0.0, {{1, 1.0}}}, FacetFunctional{1.0, {{1, -1.0}}}},
                              {"x", "x"});
        }) == ErrorKind::InvalidArgument);
}

TEST_CASE("left-stochastic space dimensions") {
  const StateSpace u = make_left_stochastic_space(4, 3, "U");
  CHECK(u.free_dim() == 9);
  CHECK(u.alphabet_size() == 10);
  CHECK(u.facets().size() == 12);
  const StateSpace v = make_left_stochastic_space(3, 4, "V");
  CHECK(v.free_dim() == 8);
  CHECK(v.alphabet_size() == 9);
  CHECK(v.facets().size() == 12);
  const StateSpace p = make_left_stochastic_space(1, 2);
  CHECK(p.free_dim() == 0);
  CHECK(p.contains(PolytopePoint{}));
  CHECK(u.letter_names().front() == "U11");
  CHECK(u.letter_names().back() == "U33");
  CHECK(stochastic_letter_name("V", 3, 4, 1, 2) == "V23");
  CHECK(stochastic_letter_name("W", 12, 2, 10, 1) == "W11_2");
}

TEST_CASE("evaluate_facets") {
  CHECK(evaluate_facets(testing::segment(), PolytopePoint{{0.5}}) == std::vector<double>{0.5, 0.5});

  const StateSpace u = make_left_stochastic_space(4, 3, "U");
  const auto uniform = evaluate_facets(u, PolytopePoint{std::vector<double>(9, 0.25)});
  REQUIRE(uniform.size() == 12);
  for (double g : uniform) CHECK(g == doctest::Approx(0.25));

  std::vector<double> x(9, 0.0);
  x[0] = 2.0;
  const auto bad = evaluate_facets(u, PolytopePoint{x});
  CHECK(std::find(bad.begin(), bad.end(), -1.0) != bad.end());
  CHECK_FALSE(u.contains(PolytopePoint{x}));
  CHECK_THROWS_AS(evaluate_facets(u, PolytopePoint{{1.0}}), Error);
}

TEST_CASE("stochastic polytopes: probe, ranges and 0/1 vertices") {
  for (int r = 1; r <= 6; ++r) {
    for (int c = 1; r * c <= 6; ++c) {
      CAPTURE(r);
      CAPTURE(c);
      const StateSpace s = make_left_stochastic_space(r, c);
      CHECK(s.facets().size() == static_cast<std::size_t>(r * c));
      CHECK(s.free_dim() == (r - 1) * c);
      for (double g : evaluate_facets(s, s.probe_point())) CHECK(g >= 0.0);
      for (int i = 0; i < s.free_dim(); ++i) {
        CHECK(s.coordinate_range(i).lo == doctest::Approx(0.0));
        CHECK(s.coordinate_range(i).hi <= 1.0 + 1e-9);
      }
      const auto vs = vertices(s);
      // one vertex per choice of the unit entry in each column
      std::size_t expected = 1;
      for (int j = 0; j < c; ++j) expected *= static_cast<std::size_t>(r);
      CHECK(vs.size() == expected);
      for (const auto& v : vs) {
        for (int j = 0; j < c; ++j) {
          double sum = 0.0;
          for (int i = 0; i + 1 < r; ++i) {
            const double e = v[static_cast<std::size_t>(i * c + j)];
            CHECK((std::abs(e) < 1e-9 || std::abs(e - 1.0) < 1e-9));
            sum += e;
          }
          const double last = 1.0 - sum;
          CHECK((std::abs(last) < 1e-9 || std::abs(last - 1.0) < 1e-9));
        }
      }
    }
  }
}
