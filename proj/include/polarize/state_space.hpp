#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace polarize {

/// Affine function g(x) = constant + sum_i coefficients[i] * x_i that is
/// nonnegative on the state space. Coefficients are kept sorted by index.
struct FacetFunctional {
  double constant = 0.0;
  std::vector<std::pair<int, double>> coefficients;

  double evaluate(std::span<const double> x) const;
  bool is_zero() const;
};

struct PolytopePoint {
  std::vector<double> coordinates;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SpaceOptions {
  double tolerance = 1e-9;
};

/// Compact polytope {x : g(x) >= 0 for every facet g} over `free_dim`
/// coordinates. Letters of the alphabet are the coordinates plus the
/// implicit unit letter, so alphabet_size() == free_dim() + 1.
///
/// Instances only come out of the make_* constructors, which have already
/// proven the polytope nonempty and bounded; they never change afterwards.
class StateSpace {
 public:
  const std::string& name() const { return name_; }
  int free_dim() const { return static_cast<int>(letter_names_.size()); }
  int alphabet_size() const { return free_dim() + 1; }
  const std::vector<FacetFunctional>& facets() const { return facets_; }
  const std::vector<std::string>& letter_names() const { return letter_names_; }
  std::optional<int> find_letter(std::string_view name) const;

  /// Range of coordinate i over the polytope, from the validation solves.
  const Interval& coordinate_range(int i) const { return ranges_[static_cast<std::size_t>(i)]; }
  /// A point found feasible during validation.
  const PolytopePoint& probe_point() const { return probe_; }
  double tolerance() const { return tolerance_; }

  bool contains(const PolytopePoint& point) const;

 private:
  friend StateSpace make_polytope_space(std::string, int, std::vector<FacetFunctional>,
                                        std::vector<std::string>, const SpaceOptions&);
  StateSpace() = default;

  std::string name_;
  std::vector<FacetFunctional> facets_;
  std::vector<std::string> letter_names_;
  std::vector<Interval> ranges_;
  PolytopePoint probe_;
  double tolerance_ = 1e-9;
};

/// Validates and builds a polytope state space. Throws DimensionMismatch,
/// UnboundedSpace or EmptySpace.
StateSpace make_polytope_space(std::string name, int free_dim, std::vector<FacetFunctional> facets,
                               std::vector<std::string> letter_names,
                               const SpaceOptions& options = {});

/// Column-stochastic rows x cols matrices with the last row eliminated.
/// Free coordinates are X(i,j) for i < rows-1, stored row-major, and named
/// prefix+i+j with 1-based indices (prefix+i+"_"+j when an index exceeds 9).
/// Facets: X(i,j) >= 0 for every free entry, then 1 - sum_i X(i,j) >= 0 for
/// every column j.
StateSpace make_left_stochastic_space(int rows, int cols, const std::string& prefix = "X");

/// Name of entry (i, j), 0-based, in a stochastic space built with `prefix`.
std::string stochastic_letter_name(const std::string& prefix, int rows, int cols, int i, int j);

/// g(point) for every facet, in declaration order.
std::vector<double> evaluate_facets(const StateSpace& space, const PolytopePoint& point);

}  // namespace polarize
