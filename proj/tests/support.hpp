#pragma once

#include <string>
#include <vector>

#include "polarize/hierarchy.hpp"
#include "polarize/nmf.hpp"
#include "polarize/state_space.hpp"

namespace testing {

using namespace polarize;

// [0, 1] in one coordinate named `letter`
inline StateSpace segment(const std::string& name = "seg", const std::string& letter = "x") {
  return make_polytope_space(name, 1, {FacetFunctional{0.0, {{0, 1.0}}}, FacetFunctional{1.0, {{0, -1.0}}}},
                             {letter});
}

// x * z = 1/4 over two segments, minimizing x + z (optimum 1 at x = z = 1/2)
inline Problem segment_product() {
  Problem p;
  p.spaces = {segment("A", "x"), segment("B", "z")};
  p.constraint_map = AffineMap(1);
  p.constraint_map.add_term(0, 1.0, {Letter::coordinate(0, 0), Letter::coordinate(1, 0)});
  p.constraint_map.add_term(0, -0.25, {});
  p.objective.add_term(0, 1.0, {Letter::coordinate(0, 0)});
  p.objective.add_term(0, 1.0, {Letter::coordinate(1, 0)});
  return p;
}

inline Problem identity_rank1() { return nmf_problem(NonnegMatrix::from(2, 2, {1, 0, 0, 1}), 1); }
inline Problem constant_rank1() { return nmf_problem(NonnegMatrix::from(2, 2, {0.5, 0.5, 0.5, 0.5}), 1); }

// Free coordinates of a rows x cols stochastic matrix given in full, row-major.
inline PolytopePoint stochastic_point(int rows, int cols, const std::vector<double>& full) {
  PolytopePoint p;
  for (int i = 0; i + 1 < rows; ++i) {
    for (int j = 0; j < cols; ++j) p.coordinates.push_back(full[static_cast<std::size_t>(i * cols + j)]);
  }
  return p;
}

// Rank-3 factorization of M(0,0): U uniform, V with an all-ones first row.
inline std::vector<PolytopePoint> uniform_factorization() {
  std::vector<double> u(12, 0.25);
  std::vector<double> v(12, 0.0);
  for (int k = 0; k < 4; ++k) v[static_cast<std::size_t>(k)] = 1.0;
  return {stochastic_point(4, 3, u), stochastic_point(3, 4, v)};
}

}  // namespace testing
