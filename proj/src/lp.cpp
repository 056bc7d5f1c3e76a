#include "polarize/lp.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "polarize/error.hpp"

namespace polarize {

bool RowBlock::add(std::vector<std::pair<int, double>>& entries, Relation rel, double rhs_value,
                   RowKind row_kind) {
  std::stable_sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t before = column.size();
  for (std::size_t i = 0; i < entries.size();) {
    const int col = entries[i].first;
    double sum = 0.0;
    for (; i < entries.size() && entries[i].first == col; ++i) sum += entries[i].second;
    if (sum != 0.0) {
      column.push_back(col);
      value.push_back(sum);
    }
  }
  if (column.size() == before) return false;
  start.push_back(column.size());
  relation.push_back(rel);
  rhs.push_back(rhs_value);
  kind.push_back(row_kind);
  return true;
}

int LinearProgram::add_variable(std::string name, double lower, double upper, int grade) {
  names_.push_back(std::move(name));
  grade_.push_back(grade);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return static_cast<int>(names_.size() - 1);
}

void LinearProgram::add_row(std::span<const int> columns, std::span<const double> values,
                            Relation relation, double rhs, RowKind kind) {
  if (columns.size() != values.size()) {
    throw Error(ErrorKind::DimensionMismatch, "row has mismatched column/value lengths");
  }
  column_.insert(column_.end(), columns.begin(), columns.end());
  value_.insert(value_.end(), values.begin(), values.end());
  start_.push_back(column_.size());
  relation_.push_back(relation);
  rhs_.push_back(rhs);
  kind_.push_back(kind);
}

void LinearProgram::append(const RowBlock& block) {
  const std::size_t offset = column_.size();
  column_.insert(column_.end(), block.column.begin(), block.column.end());
  value_.insert(value_.end(), block.value.begin(), block.value.end());
  for (std::size_t r = 1; r < block.start.size(); ++r) start_.push_back(offset + block.start[r]);
  relation_.insert(relation_.end(), block.relation.begin(), block.relation.end());
  rhs_.insert(rhs_.end(), block.rhs.begin(), block.rhs.end());
  kind_.insert(kind_.end(), block.kind.begin(), block.kind.end());
}

void LinearProgram::set_objective(std::span<const int> columns, std::span<const double> values,
                                  double constant) {
  if (columns.size() != values.size()) {
    throw Error(ErrorKind::DimensionMismatch, "objective has mismatched column/value lengths");
  }
  objective_column_.assign(columns.begin(), columns.end());
  objective_value_.assign(values.begin(), values.end());
  objective_constant_ = constant;
}

LinearProgram::RowView LinearProgram::row(std::size_t i) const {
  const std::size_t b = start_[i];
  const std::size_t e = start_[i + 1];
  return RowView{std::span<const int>(column_).subspan(b, e - b),
                 std::span<const double>(value_).subspan(b, e - b), relation_[i], rhs_[i],
                 kind_[i]};
}

std::size_t LinearProgram::count_rows(RowKind kind) const {
  return static_cast<std::size_t>(std::count(kind_.begin(), kind_.end(), kind));
}

void LinearProgram::validate() const {
  std::unordered_set<std::string_view> seen;
  seen.reserve(names_.size());
  for (const auto& name : names_) {
    if (name.empty() || !seen.insert(name).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate or empty variable name '" + name + "'");
    }
    if (name.find_first_of(" \t\n") != std::string::npos) {
      throw Error(ErrorKind::InvalidArgument, "variable name contains whitespace: '" + name + "'");
    }
  }
  const auto n = static_cast<int>(names_.size());
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (!(lower_[j] <= upper_[j])) {
      throw Error(ErrorKind::InvalidArgument, "empty bound interval for '" + names_[j] + "'");
    }
  }
  auto check = [n](int c) {
    if (c < 0 || c >= n) {
      throw Error(ErrorKind::InvalidArgument, "row references undeclared column " + std::to_string(c));
    }
  };
  for (int c : column_) check(c);
  for (int c : objective_column_) check(c);
}

double LinearProgram::objective_at(std::span<const double> x) const {
  double v = objective_constant_;
  for (std::size_t k = 0; k < objective_column_.size(); ++k) {
    v += objective_value_[k] * x[objective_column_[k]];
  }
  return v;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

double row_violation(const LinearProgram::RowView& row, std::span<const double> x) {
  double activity = 0.0;
  for (std::size_t k = 0; k < row.columns.size(); ++k) activity += row.values[k] * x[row.columns[k]];
  switch (row.relation) {
    case Relation::LessEqual: return std::max(0.0, activity - row.rhs);
    case Relation::GreaterEqual: return std::max(0.0, row.rhs - activity);
    case Relation::Equal: return std::abs(activity - row.rhs);
  }
  return 0.0;
}

double bound_violation(const LinearProgram& lp, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    worst = std::max({worst, lp.lower()[j] - x[j], x[j] - lp.upper()[j]});
  }
  return worst;
}

void check_point_size(const LinearProgram& lp, std::span<const double> x) {
  if (x.size() != lp.num_variables()) {
    throw Error(ErrorKind::DimensionMismatch,
                "point has " + std::to_string(x.size()) + " entries, LP has " +
                    std::to_string(lp.num_variables()) + " variables");
  }
}

}  // namespace

double max_violation(const LinearProgram& lp, std::span<const double> x) {
  check_point_size(lp, x);
  const auto rows = static_cast<std::int64_t>(lp.num_rows());
  double worst = bound_violation(lp, x);
#pragma omp parallel for reduction(max : worst) schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) {
    worst = std::max(worst, row_violation(lp.row(static_cast<std::size_t>(r)), x));
  }
  return worst;
}

namespace reference {
double max_violation(const LinearProgram& lp, std::span<const double> x) {
  check_point_size(lp, x);
  double worst = bound_violation(lp, x);
  for (std::size_t r = 0; r < lp.num_rows(); ++r) worst = std::max(worst, row_violation(lp.row(r), x));
  return worst;
}
}  // namespace reference

FarkasRay complete_ray(const LinearProgram& lp, std::span<const double> row_multipliers) {
  if (row_multipliers.size() != lp.num_rows()) {
    throw Error(ErrorKind::DimensionMismatch, "row multiplier count differs from row count");
  }
  FarkasRay ray;
  ray.rows.assign(row_multipliers.begin(), row_multipliers.end());
  std::vector<double> aggregate(lp.num_variables(), 0.0);
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const auto row = lp.row(r);
    double& y = ray.rows[r];
    if ((row.relation == Relation::GreaterEqual && y < 0.0) ||
        (row.relation == Relation::LessEqual && y > 0.0)) {
      y = 0.0;
    }
    if (y == 0.0) continue;
    for (std::size_t k = 0; k < row.columns.size(); ++k) aggregate[row.columns[k]] += y * row.values[k];
  }
  ray.bounds.resize(lp.num_variables());
  for (std::size_t j = 0; j < aggregate.size(); ++j) ray.bounds[j] = -aggregate[j];
  return ray;
}

bool verify_certificate(const LinearProgram& lp, const FarkasRay& ray, double tol) {
  if (ray.rows.size() != lp.num_rows() || ray.bounds.size() != lp.num_variables()) {
    throw Error(ErrorKind::DimensionMismatch, "certificate dimension does not match the LP");
  }
  double scale = 0.0;
  for (double v : ray.rows) scale = std::max(scale, std::abs(v));
  for (double v : ray.bounds) scale = std::max(scale, std::abs(v));
  if (!(scale > 0.0) || !std::isfinite(scale)) return false;

  std::vector<double> aggregate(lp.num_variables(), 0.0);
  double rhs = 0.0;
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const double y = ray.rows[r] / scale;
    if (y == 0.0) continue;
    const auto row = lp.row(r);
    const bool wrong_sign = (row.relation == Relation::GreaterEqual && y < 0.0) ||
                            (row.relation == Relation::LessEqual && y > 0.0);
    if (wrong_sign) {
      if (std::abs(y) > tol) return false;
      // Negligible wrongly signed multipliers are dropped; their share of the
      // aggregate shows up as residual below.
      continue;
    }
    rhs += y * row.rhs;
    for (std::size_t k = 0; k < row.columns.size(); ++k) aggregate[row.columns[k]] += y * row.values[k];
  }
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    const double z = ray.bounds[j] / scale;
    if (z == 0.0) continue;
    const double bound = z > 0.0 ? lp.lower()[j] : lp.upper()[j];
    if (!std::isfinite(bound)) {
      if (std::abs(z) > tol) return false;
    } else {
      rhs += z * bound;
    }
    aggregate[j] += z;
  }
  // Whatever residual remains is charged against the right-hand side using
  // the variable box, so a passing ray is a contradiction for every x in it.
  double slack = 0.0;
  for (std::size_t j = 0; j < aggregate.size(); ++j) {
    const double a = aggregate[j];
    if (std::abs(a) > tol) return false;
    if (a == 0.0) continue;
    const double reach = std::max(std::abs(lp.lower()[j]), std::abs(lp.upper()[j]));
    if (!std::isfinite(reach)) return false;
    slack += std::abs(a) * reach;
  }
  return rhs - slack > tol;
}

}  // namespace polarize
