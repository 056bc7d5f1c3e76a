#include "polarize/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "polarize/error.hpp"
#include "polarize/lp.hpp"

namespace polarize {

double FacetFunctional::evaluate(std::span<const double> x) const {
  double v = constant;
  for (const auto& [i, c] : coefficients) v += c * x[static_cast<std::size_t>(i)];
  return v;
}

bool FacetFunctional::is_zero() const {
  return constant == 0.0 &&
         std::all_of(coefficients.begin(), coefficients.end(), [](const auto& t) { return t.second == 0.0; });
}

std::optional<int> StateSpace::find_letter(std::string_view name) const {
  for (std::size_t i = 0; i < letter_names_.size(); ++i) {
    if (letter_names_[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

bool StateSpace::contains(const PolytopePoint& point) const {
  const auto values = evaluate_facets(*this, point);
  return std::all_of(values.begin(), values.end(), [this](double v) { return v >= -tolerance_; });
}

namespace {

void normalize(FacetFunctional& g, int free_dim) {
  auto& c = g.coefficients;
  std::sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> merged;
  for (const auto& [i, v] : c) {
    if (i < 0 || i >= free_dim) {
      throw Error(ErrorKind::DimensionMismatch,
                  "facet coefficient index " + std::to_string(i) + " outside free_dim " +
                      std::to_string(free_dim));
    }
    if (!merged.empty() && merged.back().first == i) {
      merged.back().second += v;
    } else {
      merged.emplace_back(i, v);
    }
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
  c = std::move(merged);
}

LinearProgram facet_system(int free_dim, const std::vector<FacetFunctional>& facets) {
  LinearProgram lp;
  for (int i = 0; i < free_dim; ++i) lp.add_variable("x" + std::to_string(i), -kInfinity, kInfinity);
  std::vector<int> cols;
  std::vector<double> vals;
  for (const auto& g : facets) {
    cols.clear();
    vals.clear();
    for (const auto& [i, v] : g.coefficients) {
      cols.push_back(i);
      vals.push_back(v);
    }
    lp.add_row(cols, vals, Relation::GreaterEqual, -g.constant, RowKind::Facet);
  }
  return lp;
}

}  // namespace

StateSpace make_polytope_space(std::string name, int free_dim, std::vector<FacetFunctional> facets,
                               std::vector<std::string> letter_names, const SpaceOptions& options) {
  if (free_dim < 0) throw Error(ErrorKind::DimensionMismatch, "free_dim must be nonnegative");
  if (letter_names.size() != static_cast<std::size_t>(free_dim)) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(free_dim) + " letter names, got " +
                    std::to_string(letter_names.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : letter_names) {
    if (l.empty() || !seen.insert(l).second) {
      throw Error(ErrorKind::InvalidArgument, "letter names must be nonempty and distinct: '" + l + "'");
    }
    if (l.find_first_of(" \t\n+;[]") != std::string::npos) {
      throw Error(ErrorKind::InvalidArgument, "letter name '" + l + "' contains a reserved character");
    }
  }
  for (auto& g : facets) {
    normalize(g, free_dim);
    if (g.is_zero()) throw Error(ErrorKind::InvalidArgument, "facet functional is identically zero");
  }

  StateSpace space;
  space.name_ = std::move(name);
  space.letter_names_ = std::move(letter_names);
  space.tolerance_ = options.tolerance;

  if (free_dim == 0) {
    for (const auto& g : facets) {
      if (g.constant < -options.tolerance) throw Error(ErrorKind::EmptySpace, space.name_ + ": constant facet is negative");
    }
    space.facets_ = std::move(facets);
    return space;
  }

  LinearProgram lp = facet_system(free_dim, facets);
  const SolveOutcome probe = solve(lp);
  if (probe.status == SolveStatus::Infeasible) {
    throw Error(ErrorKind::EmptySpace, space.name_ + ": facet system is infeasible");
  }
  if (probe.status != SolveStatus::Feasible) {
    throw Error(ErrorKind::BackendFailure, space.name_ + ": feasibility probe failed: " + probe.diagnostic);
  }
  space.probe_.coordinates = *probe.point;

  space.ranges_.resize(static_cast<std::size_t>(free_dim));
  for (int i = 0; i < free_dim; ++i) {
    for (double sense : {1.0, -1.0}) {
      const int col = i;
      const double coef = sense;
      lp.set_objective(std::span<const int>(&col, 1), std::span<const double>(&coef, 1));
      const SolveOutcome out = solve(lp);
      if (out.unbounded) {
        throw Error(ErrorKind::UnboundedSpace,
                    space.name_ + ": coordinate '" + space.letter_names_[static_cast<std::size_t>(i)] +
                        "' is unbounded");
      }
      if (out.status != SolveStatus::Feasible) {
        throw Error(ErrorKind::BackendFailure, space.name_ + ": range solve failed: " + out.diagnostic);
      }
      const double v = (*out.point)[static_cast<std::size_t>(i)];
      (sense > 0 ? space.ranges_[static_cast<std::size_t>(i)].lo : space.ranges_[static_cast<std::size_t>(i)].hi) = v;
    }
  }
  space.facets_ = std::move(facets);
  return space;
}

std::string stochastic_letter_name(const std::string& prefix, int rows, int cols, int i, int j) {
  if (rows > 9 || cols > 9) return prefix + std::to_string(i + 1) + "_" + std::to_string(j + 1);
  return prefix + std::to_string(i + 1) + std::to_string(j + 1);
}

StateSpace make_left_stochastic_space(int rows, int cols, const std::string& prefix) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorKind::InvalidShape,
                "stochastic space needs rows >= 1 and cols >= 1, got " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
  const int free_rows = rows - 1;
  std::vector<std::string> names;
  std::vector<FacetFunctional> facets;
  for (int i = 0; i < free_rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      names.push_back(stochastic_letter_name(prefix, rows, cols, i, j));
      facets.push_back(FacetFunctional{0.0, {{i * cols + j, 1.0}}});
    }
  }
  for (int j = 0; j < cols; ++j) {
    FacetFunctional g{1.0, {}};
    for (int i = 0; i < free_rows; ++i) g.coefficients.emplace_back(i * cols + j, -1.0);
    facets.push_back(std::move(g));
  }
  return make_polytope_space(prefix + "_stoch_" + std::to_string(rows) + "x" + std::to_string(cols),
                             free_rows * cols, std::move(facets), std::move(names));
}

std::vector<double> evaluate_facets(const StateSpace& space, const PolytopePoint& point) {
  if (point.coordinates.size() != static_cast<std::size_t>(space.free_dim())) {
    throw Error(ErrorKind::DimensionMismatch,
                "point has " + std::to_string(point.coordinates.size()) + " coordinates, space '" +
                    space.name() + "' has " + std::to_string(space.free_dim()));
  }
  std::vector<double> out;
  out.reserve(space.facets().size());
  for (const auto& g : space.facets()) out.push_back(g.evaluate(point.coordinates));
  return out;
}

}  // namespace polarize
