#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>

#include "Highs.h"
#include "polarize/error.hpp"
#include "polarize/lp.hpp"

namespace polarize {

namespace {

struct Attempt {
  std::string solver;  // HiGHS "solver" option value
  bool crossover = false;
  double time_share = 1.0;  // fraction of the remaining budget; < 1 leaves room for the next attempt
  double time_cap = kInfinity;
};

struct Adapter {
  std::string name;
  std::vector<Attempt> attempts;
};

const std::vector<Adapter>& adapters() {
  // "highs" starts with a short interior point run (fastest on the small
  // and mid-sized rectangle LPs), then dual simplex, then PDLP, whose
  // points are only accepted after the row check in solve(). On the large
  // feasible rectangle LPs PDLP is an order of magnitude faster than IPX,
  // which gets the rest of the budget last.
  static const std::vector<Adapter> list = {
      {"highs",
       {{"ipm", false, 1.0, 10.0},
        {"simplex", false, 1.0, 20.0},
        {"pdlp", false, 1.0, 60.0},
        {"ipm", false, 1.0},
        {"ipm", true, 1.0}}},
      {"highs-simplex", {{"simplex", false, 1.0}}},
      {"highs-ipm", {{"ipm", false, 1.0}, {"ipm", true, 1.0}}},
      {"highs-pdlp", {{"pdlp", false, 1.0}}},
  };
  return list;
}

const Adapter& select_adapter(const SolveOptions& options) {
  std::string name = options.backend;
  if (name.empty()) {
    if (const char* env = std::getenv("POLARIZE_SOLVER"); env != nullptr && *env != '\0') name = env;
  }
  if (name.empty()) name = "highs";
  for (const auto& a : adapters()) {
    if (a.name == name) return a;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown LP backend '" + name + "'");
}

double to_highs(double v) {
  if (v == kInfinity) return kHighsInf;
  if (v == -kInfinity) return -kHighsInf;
  return v;
}

HighsLp to_highs_lp(const LinearProgram& lp, bool with_objective) {
  HighsLp h;
  h.num_col_ = static_cast<HighsInt>(lp.num_variables());
  h.num_row_ = static_cast<HighsInt>(lp.num_rows());
  h.sense_ = ObjSense::kMinimize;
  h.col_cost_.assign(lp.num_variables(), 0.0);
  h.offset_ = 0.0;
  if (with_objective) {
    const auto cols = lp.objective_columns();
    const auto vals = lp.objective_values();
    for (std::size_t k = 0; k < cols.size(); ++k) h.col_cost_[cols[k]] += vals[k];
    h.offset_ = lp.objective_constant();
  }
  h.col_lower_.resize(lp.num_variables());
  h.col_upper_.resize(lp.num_variables());
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    h.col_lower_[j] = to_highs(lp.lower()[j]);
    h.col_upper_[j] = to_highs(lp.upper()[j]);
  }
  h.row_lower_.resize(lp.num_rows());
  h.row_upper_.resize(lp.num_rows());
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const auto row = lp.row(r);
    h.row_lower_[r] = row.relation == Relation::LessEqual ? -kHighsInf : row.rhs;
    h.row_upper_[r] = row.relation == Relation::GreaterEqual ? kHighsInf : row.rhs;
  }
  h.a_matrix_.format_ = MatrixFormat::kRowwise;
  h.a_matrix_.num_col_ = h.num_col_;
  h.a_matrix_.num_row_ = h.num_row_;
  h.a_matrix_.start_.assign(lp.row_start().begin(), lp.row_start().end());
  h.a_matrix_.index_.assign(lp.columns().begin(), lp.columns().end());
  h.a_matrix_.value_.assign(lp.values().begin(), lp.values().end());
  return h;
}

void configure(Highs& highs, const Attempt& attempt, double seconds) {
  highs.setOptionValue("output_flag", false);
  // One thread per instance: concurrency is handled by the callers, and the
  // HiGHS scheduler must see the same thread count in every instance.
  highs.setOptionValue("threads", 1);
  highs.setOptionValue("solver", attempt.solver);
  highs.setOptionValue("run_crossover", attempt.crossover ? "on" : "off");
  if (std::isfinite(seconds)) highs.setOptionValue("time_limit", std::max(seconds, 0.1));
}

using Clock = std::chrono::steady_clock;

class Deadline {
 public:
  explicit Deadline(double seconds) : start_(Clock::now()), budget_(seconds) {}
  double remaining() const {
    if (!std::isfinite(budget_)) return kInfinity;
    return budget_ - std::chrono::duration<double>(Clock::now() - start_).count();
  }
  double budget_for(const Attempt& a) const {
    return std::min(a.time_cap, remaining() * a.time_share);
  }

 private:
  Clock::time_point start_;
  double budget_;
};

std::optional<FarkasRay> ray_from_multipliers(const LinearProgram& lp,
                                              const std::vector<double>& multipliers, double tol) {
  if (multipliers.size() != lp.num_rows()) return std::nullopt;
  for (double sign : {1.0, -1.0}) {
    std::vector<double> y(multipliers.size());
    std::transform(multipliers.begin(), multipliers.end(), y.begin(),
                   [sign](double v) { return sign * v; });
    FarkasRay ray = complete_ray(lp, y);
    if (verify_certificate(lp, ray, tol)) return ray;
  }
  return std::nullopt;
}

HighsModelStatus run_for_ray(const HighsLp& model, const Deadline& deadline, std::vector<double>& multipliers) {
  Highs highs;
  configure(highs, Attempt{"simplex", false, 1.0}, deadline.remaining());
  // Presolve would have to be undone to recover a ray.
  highs.setOptionValue("presolve", "off");
  if (highs.passModel(model) == HighsStatus::kError) return HighsModelStatus::kModelError;
  highs.run();
  const HighsModelStatus status = highs.getModelStatus();
  if (status == HighsModelStatus::kInfeasible) {
    bool has_ray = false;
    multipliers.assign(static_cast<std::size_t>(model.num_row_), 0.0);
    if (highs.getDualRay(has_ray, multipliers.data()) != HighsStatus::kOk || !has_ray) multipliers.clear();
  }
  return status;
}

/// Ray of the whole LP from dual simplex without presolve.
std::optional<FarkasRay> dual_ray_certificate(const LinearProgram& lp, const Deadline& deadline, double tol,
                                              std::string& diagnostic) {
  if (deadline.remaining() <= 0.0) return std::nullopt;
  std::vector<double> y;
  const HighsModelStatus status = run_for_ray(to_highs_lp(lp, false), deadline, y);
  if (status != HighsModelStatus::kInfeasible || y.empty()) {
    diagnostic += "full dual ray: " + Highs().modelStatusToString(status) + "; ";
    return std::nullopt;
  }
  if (auto ray = ray_from_multipliers(lp, y, tol)) return ray;
  diagnostic += "full dual ray did not verify; ";
  return std::nullopt;
}

/// Rays of sub-LPs. For each grade g below the maximum, keep only the rows
/// whose variables all have grade <= g; a ray of such a sub-LP is a ray of
/// the full LP once padded with zeros. Hierarchy LPs are usually refuted by
/// low-grade rows already, and those sub-LPs are far smaller.
std::optional<FarkasRay> graded_certificate(const LinearProgram& lp, const Deadline& deadline, double tol,
                                            std::string& diagnostic) {
  const auto& grade = lp.grades();
  if (grade.empty()) return std::nullopt;
  const int top = *std::max_element(grade.begin(), grade.end());
  std::vector<int> row_grade(lp.num_rows(), 0);
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    for (int c : lp.row(r).columns) row_grade[r] = std::max(row_grade[r], grade[static_cast<std::size_t>(c)]);
  }
  for (int g = 0; g < top; ++g) {
    if (deadline.remaining() <= 0.0) break;
    std::vector<int> col_map(lp.num_variables(), -1);
    LinearProgram sub;
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < lp.num_variables(); ++j) {
      if (grade[j] <= g) col_map[j] = sub.add_variable(lp.variable_names()[j], lp.lower()[j], lp.upper()[j]);
    }
    std::vector<int> cols;
    for (std::size_t r = 0; r < lp.num_rows(); ++r) {
      if (row_grade[r] > g) continue;
      const auto row = lp.row(r);
      cols.clear();
      for (int c : row.columns) cols.push_back(col_map[static_cast<std::size_t>(c)]);
      sub.add_row(cols, row.values, row.relation, row.rhs);
      kept.push_back(r);
    }
    if (kept.empty()) continue;
    std::vector<double> y;
    const HighsModelStatus status = run_for_ray(to_highs_lp(sub, false), deadline, y);
    if (status == HighsModelStatus::kOptimal) continue;
    if (status != HighsModelStatus::kInfeasible || y.empty()) {
      diagnostic += "grade " + std::to_string(g) + " sub-LP: " + Highs().modelStatusToString(status) + "; ";
      break;
    }
    std::vector<double> full(lp.num_rows(), 0.0);
    for (std::size_t k = 0; k < kept.size(); ++k) full[kept[k]] = y[k];
    if (auto ray = ray_from_multipliers(lp, full, tol)) return ray;
    diagnostic += "grade " + std::to_string(g) + " ray did not verify; ";
  }
  return std::nullopt;
}

/// Certificate from the elastic LP min sum(s) with one slack per row. Its
/// optimal row duals are exactly the Farkas multipliers of the original LP,
/// with the optimal value as the certified margin.
std::optional<FarkasRay> elastic_certificate(const LinearProgram& lp, const Adapter& adapter,
                                             const Deadline& deadline, double tol,
                                             std::string& diagnostic) {
  HighsLp h = to_highs_lp(lp, false);
  std::vector<double> cost, lower, upper;
  std::vector<HighsInt> starts, index;
  std::vector<double> values;
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const Relation rel = lp.row(r).relation;
    auto add = [&](double coef) {
      starts.push_back(static_cast<HighsInt>(index.size()));
      index.push_back(static_cast<HighsInt>(r));
      values.push_back(coef);
      cost.push_back(1.0);
      lower.push_back(0.0);
      upper.push_back(kHighsInf);
    };
    if (rel != Relation::LessEqual) add(1.0);
    if (rel != Relation::GreaterEqual) add(-1.0);
  }
  for (const auto& attempt : adapter.attempts) {
    const double seconds = deadline.budget_for(attempt);
    if (seconds <= 0.0) break;
    Highs highs;
    configure(highs, attempt, seconds);
    if (highs.passModel(h) == HighsStatus::kError) break;
    if (highs.addCols(static_cast<HighsInt>(cost.size()), cost.data(), lower.data(), upper.data(),
                      static_cast<HighsInt>(index.size()), starts.data(), index.data(),
                      values.data()) == HighsStatus::kError) {
      break;
    }
    highs.run();
    if (highs.getModelStatus() != HighsModelStatus::kOptimal) continue;
    const auto& sol = highs.getSolution();
    if (!sol.dual_valid) continue;
    if (auto ray = ray_from_multipliers(lp, sol.row_dual, tol)) return ray;
    diagnostic += "elastic duals (" + attempt.solver + ") did not verify; ";
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> available_backends() {
  std::vector<std::string> names;
  for (const auto& a : adapters()) names.push_back(a.name);
  return names;
}

SolveOutcome solve(const LinearProgram& lp, const SolveOptions& options) {
  lp.validate();
  const Adapter& adapter = select_adapter(options);
  const Deadline deadline(options.time_limit_seconds);
  SolveOutcome out;
  out.backend = adapter.name;
  const HighsLp model = to_highs_lp(lp, true);

  bool infeasible_claimed = false;
  for (const auto& attempt : adapter.attempts) {
    const double seconds = deadline.budget_for(attempt);
    if (seconds <= 0.0) {
      out.diagnostic += "time limit reached; ";
      break;
    }
    Highs highs;
    configure(highs, attempt, seconds);
    if (highs.passModel(model) == HighsStatus::kError) {
      throw Error(ErrorKind::BackendFailure, "HiGHS rejected the model");
    }
    highs.run();
    const HighsModelStatus status = highs.getModelStatus();
    const std::string tag = attempt.solver + (attempt.crossover ? "+crossover" : "");

    if (status == HighsModelStatus::kOptimal) {
      std::vector<double> x = highs.getSolution().col_value;
      const double violation = max_violation(lp, x);
      if (violation <= options.feas_tol) {
        out.status = SolveStatus::Feasible;
        out.max_violation = violation;
        out.objective_value = lp.objective_at(x);
        out.point = std::move(x);
        return out;
      }
      out.diagnostic += tag + ": point violates rows by " + std::to_string(violation) + "; ";
      continue;
    }
    const bool zero_objective = std::all_of(lp.objective_values().begin(), lp.objective_values().end(),
                                            [](double v) { return v == 0.0; });
    if (status == HighsModelStatus::kUnboundedOrInfeasible && zero_objective) {
      // nothing to be unbounded
      infeasible_claimed = true;
      break;
    }
    if (status == HighsModelStatus::kUnbounded || status == HighsModelStatus::kUnboundedOrInfeasible) {
      // Decide feasibility with a zero objective; only a verified point
      // turns this into an unbounded verdict.
      SolveOptions zero = options;
      zero.backend = adapter.name;
      zero.time_limit_seconds = deadline.remaining();
      LinearProgram feasibility = lp;
      feasibility.set_objective({}, {}, 0.0);
      SolveOutcome inner = solve(feasibility, zero);
      if (inner.status == SolveStatus::Feasible && status == HighsModelStatus::kUnbounded) {
        inner.unbounded = true;
        inner.objective_value = -kInfinity;
      } else if (inner.status == SolveStatus::Feasible) {
        inner.status = SolveStatus::Unknown;
        inner.diagnostic += "backend reported unbounded-or-infeasible on a feasible LP; ";
      }
      inner.backend = adapter.name;
      inner.diagnostic = out.diagnostic + inner.diagnostic;
      return inner;
    }
    if (status == HighsModelStatus::kInfeasible) {
      infeasible_claimed = true;
      break;
    }
    out.diagnostic += tag + ": " + highs.modelStatusToString(status) + "; ";
  }

  if (infeasible_claimed) {
    std::optional<FarkasRay> ray = graded_certificate(lp, deadline, options.feas_tol, out.diagnostic);
    if (!ray) ray = dual_ray_certificate(lp, deadline, options.feas_tol, out.diagnostic);
    if (!ray) ray = elastic_certificate(lp, adapter, deadline, options.feas_tol, out.diagnostic);
    if (ray) {
      out.status = SolveStatus::Infeasible;
      out.certificate = std::move(*ray);
      return out;
    }
    out.diagnostic += "infeasibility claimed but no certificate verified; ";
  }
  out.status = SolveStatus::Unknown;
  return out;
}

}  // namespace polarize
