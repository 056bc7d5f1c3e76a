#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "polarize/hierarchy.hpp"
#include "polarize/lp.hpp"

namespace polarize {

/// Dense row-major matrix with nonnegative entries.
struct NonnegMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> entries;

  /// Throws InvalidShape on a size mismatch, DomainError on a negative or
  /// non-finite entry.
  static NonnegMatrix from(int rows, int cols, std::vector<double> entries);

  double at(int i, int j) const { return entries[static_cast<std::size_t>(i * cols + j)]; }
};

struct StochasticForm {
  NonnegMatrix matrix;         // A * diag(scaling), columns sum to 1
  std::vector<double> scaling;  // 1 / column sum
};

/// Throws ZeroColumn or ZeroRow.
StochasticForm normalize_to_stochastic(const NonnegMatrix& a);

/// Rank-k factorization problem L * R = normalized(A) with L (rows x k)
/// and R (k x cols) both left-stochastic; the last row of each is
/// eliminated. Output (i, j) of the constraint map is entry (i, j) of
/// L R - A, row-major, with output shape (rows, cols).
Problem nmf_problem(const NonnegMatrix& a, int k, const std::string& left_prefix = "L",
                    const std::string& right_prefix = "R");

struct NestedRectanglesInstance {
  double a = 0.0;
  double b = 0.0;
  NonnegMatrix m;
};

/// The 4x4 slack-type matrix of the square [-1,1]^2 around the rectangle
/// [-a,a] x [-b,b]. Throws DomainError outside [0,1]^2.
NestedRectanglesInstance nested_rectangles_matrix(double a, double b);

/// nmf_problem(M(a,b), 3) with factor letters U and V.
Problem nested_rectangles_problem(double a, double b);

/// (1+a)(1+b) <= 2: a triangle fits between the two rectangles.
bool analytic_feasible(double a, double b);

struct RegionRecord {
  double a = 0.0;
  double b = 0.0;
  int level = 0;
  std::string variant;
  std::string pi;
  std::string family;
  SolveStatus status = SolveStatus::Unknown;
  double solve_seconds = 0.0;
};

struct PointCheck {
  RegionRecord record;
  SolveOutcome outcome;
};

/// Builds and solves the requested relaxation at (a, b).
PointCheck evaluate_point(double a, double b, const HierarchySpec& spec, const SolveOptions& options = {});
RegionRecord check_point(double a, double b, const HierarchySpec& spec, const SolveOptions& options = {});

struct ScanOptions {
  int grid = 64;
  double bisect_tol = 1e-3;
  int workers = 0;  // 0: OpenMP default
  SolveOptions solve;
};

struct ScanReport {
  /// a-values whose coarse column was not feasible-then-infeasible in b.
  std::vector<double> nonmonotone_columns;
  std::size_t probes = 0;
};

/// Classifies the grid x grid lattice on [0,1]^2, then bisects over b at
/// every feasible/infeasible transition of each a-column. Records come
/// back sorted by (a, b).
std::vector<RegionRecord> scan_region(const HierarchySpec& spec, const ScanOptions& options,
                                      ScanReport* report = nullptr);

void write_region_csv(const std::vector<RegionRecord>& records, std::ostream& out);
void write_region_csv(const std::vector<RegionRecord>& records, const std::filesystem::path& path);

}  // namespace polarize
