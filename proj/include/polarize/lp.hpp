#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace polarize {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

/// Which constraint family produced a row. Only used for diagnostics and
/// for counting rows in tests; solvers ignore it.
enum class RowKind : std::uint8_t { Generic, Facet, ConstraintMap, Polarized };

/// A batch of rows in compressed sparse row form. Builders fill blocks
/// independently (one per worker) and append them in a fixed order.
struct RowBlock {
  std::vector<std::size_t> start{0};
  std::vector<int> column;
  std::vector<double> value;
  std::vector<Relation> relation;
  std::vector<double> rhs;
  std::vector<RowKind> kind;

  std::size_t size() const { return relation.size(); }

  /// Appends one row. Entries are sorted by column, duplicates are summed
  /// and exact zeros dropped. Returns false (and appends nothing) when the
  /// row is empty after merging.
  bool add(std::vector<std::pair<int, double>>& entries, Relation rel, double rhs,
           RowKind kind);
};

/// Solver-agnostic LP: minimize c·x + c0 subject to rows and variable bounds.
class LinearProgram {
 public:
  struct RowView {
    std::span<const int> columns;
    std::span<const double> values;
    Relation relation;
    double rhs;
    RowKind kind;
  };

  /// `grade` orders variables for the certificate search in solve(): rows
  /// touching only low-grade variables form sub-LPs tried first. The
  /// hierarchy builders use the number of letters in the word.
  int add_variable(std::string name, double lower, double upper, int grade = 0);
  void add_row(std::span<const int> columns, std::span<const double> values,
               Relation relation, double rhs, RowKind kind = RowKind::Generic);
  void append(const RowBlock& block);
  void set_objective(std::span<const int> columns, std::span<const double> values,
                     double constant = 0.0);

  std::size_t num_variables() const { return names_.size(); }
  std::size_t num_rows() const { return relation_.size(); }
  std::size_t num_nonzeros() const { return column_.size(); }

  RowView row(std::size_t i) const;
  const std::vector<std::string>& variable_names() const { return names_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<int>& grades() const { return grade_; }
  std::span<const int> objective_columns() const { return objective_column_; }
  std::span<const double> objective_values() const { return objective_value_; }
  double objective_constant() const { return objective_constant_; }

  std::span<const std::size_t> row_start() const { return start_; }
  std::span<const int> columns() const { return column_; }
  std::span<const double> values() const { return value_; }

  std::size_t count_rows(RowKind kind) const;

  /// Throws InvalidArgument when names collide, a row references an
  /// undeclared variable, or a bound interval is empty.
  void validate() const;

  double objective_at(std::span<const double> x) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<int> grade_;
  std::vector<std::size_t> start_{0};
  std::vector<int> column_;
  std::vector<double> value_;
  std::vector<Relation> relation_;
  std::vector<double> rhs_;
  std::vector<RowKind> kind_;
  std::vector<int> objective_column_;
  std::vector<double> objective_value_;
  double objective_constant_ = 0.0;
};

enum class SolveStatus { Feasible, Infeasible, Unknown };

std::string_view to_string(SolveStatus status);

/// Farkas witness of infeasibility. `rows[r]` multiplies constraint r
/// (nonnegative for >=, nonpositive for <=, free for =). `bounds[j] > 0`
/// multiplies the lower bound x_j >= lo_j, `bounds[j] < 0` the upper bound
/// x_j <= hi_j. A valid ray aggregates to the zero row with a positive
/// right-hand side, i.e. the contradiction 0 >= positive.
struct FarkasRay {
  std::vector<double> rows;
  std::vector<double> bounds;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Unknown;
  std::optional<std::vector<double>> point;
  std::optional<double> objective_value;
  std::optional<FarkasRay> certificate;
  /// Set when the objective is unbounded below over a feasible region.
  bool unbounded = false;
  double max_violation = 0.0;
  std::string backend;
  std::string diagnostic;
};

struct SolveOptions {
  double feas_tol = 1e-7;
  /// Adapter name; empty means $POLARIZE_SOLVER, falling back to "highs".
  std::string backend;
  double time_limit_seconds = kInfinity;
};

/// Names accepted by SolveOptions::backend / POLARIZE_SOLVER.
std::vector<std::string> available_backends();

/// Solves with the selected backend and post-validates the verdict:
/// feasible points are re-checked row by row, infeasibility is only
/// reported with a certificate that passes verify_certificate. Anything
/// that fails validation comes back as Unknown.
SolveOutcome solve(const LinearProgram& lp, const SolveOptions& options = {});

/// Largest violation of any row or bound by x (0 when x is feasible).
double max_violation(const LinearProgram& lp, std::span<const double> x);

/// True iff `ray` is a Farkas certificate for `lp` within `tol`. The ray is
/// rescaled to unit max-norm before checking, so its overall scale does not
/// matter. Throws DimensionMismatch on wrongly sized rays.
bool verify_certificate(const LinearProgram& lp, const FarkasRay& ray, double tol = 1e-7);

/// Completes row multipliers to a full ray by choosing the bound multipliers
/// that cancel the aggregated row exactly. Wrongly signed row multipliers
/// are clipped to zero.
FarkasRay complete_ray(const LinearProgram& lp, std::span<const double> row_multipliers);

enum class ExportFormat { FreeMps, LpText };

void write_lp(const LinearProgram& lp, ExportFormat format, std::ostream& out);
void export_lp(const LinearProgram& lp, ExportFormat format, const std::filesystem::path& path);

/// Name used for variables in LP-text files, where '+', '[' and ']' are
/// not legal identifier characters.
std::string lp_text_name(std::string_view name);

namespace reference {
/// Single-threaded row-by-row version of max_violation.
double max_violation(const LinearProgram& lp, std::span<const double> x);
}  // namespace reference

}  // namespace polarize
