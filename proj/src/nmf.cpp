#include "polarize/nmf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "polarize/error.hpp"

namespace polarize {

NonnegMatrix NonnegMatrix::from(int rows, int cols, std::vector<double> entries) {
  if (rows < 1 || cols < 1 || entries.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw Error(ErrorKind::InvalidShape, "matrix of " + std::to_string(entries.size()) + " entries is not " +
                                             std::to_string(rows) + "x" + std::to_string(cols));
  }
  for (double v : entries) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::DomainError, "matrix entries must be finite and >= 0");
  }
  return NonnegMatrix{rows, cols, std::move(entries)};
}

StochasticForm normalize_to_stochastic(const NonnegMatrix& a) {
  for (int i = 0; i < a.rows; ++i) {
    bool zero = true;
    for (int j = 0; j < a.cols; ++j) zero = zero && a.at(i, j) == 0.0;
    if (zero) throw Error(ErrorKind::ZeroRow, "row " + std::to_string(i) + " is identically zero");
  }
  StochasticForm out{a, std::vector<double>(static_cast<std::size_t>(a.cols))};
  for (int j = 0; j < a.cols; ++j) {
    double sum = 0.0;
    for (int i = 0; i < a.rows; ++i) sum += a.at(i, j);
    if (sum == 0.0) throw Error(ErrorKind::ZeroColumn, "column " + std::to_string(j) + " is identically zero");
    out.scaling[static_cast<std::size_t>(j)] = 1.0 / sum;
    for (int i = 0; i < a.rows; ++i) {
      out.matrix.entries[static_cast<std::size_t>(i * a.cols + j)] = a.at(i, j) / sum;
    }
  }
  return out;
}

namespace {

// An entry of a left-stochastic factor as an affine expression in its free
// coordinates; coord -1 is the constant.
using Affine = std::vector<std::pair<int, double>>;

Affine stochastic_entry(int rows, int cols, int i, int j) {
  if (i < rows - 1) return {{i * cols + j, 1.0}};
  Affine e{{-1, 1.0}};
  for (int r = 0; r < rows - 1; ++r) e.emplace_back(r * cols + j, -1.0);
  return e;
}

}  // namespace

Problem nmf_problem(const NonnegMatrix& a, int k, const std::string& left_prefix, const std::string& right_prefix) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "rank must be at least 1");
  const StochasticForm norm = normalize_to_stochastic(a);
  Problem p;
  p.spaces.push_back(make_left_stochastic_space(a.rows, k, left_prefix));
  p.spaces.push_back(make_left_stochastic_space(k, a.cols, right_prefix));
  p.constraint_map = AffineMap(a.rows * a.cols, std::make_pair(a.rows, a.cols));
  auto letter = [](int space, int coord) {
    return coord < 0 ? std::vector<Letter>{} : std::vector<Letter>{Letter::coordinate(space, coord)};
  };
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) {
      const int out = i * a.cols + j;
      for (int l = 0; l < k; ++l) {
        for (const auto& [cl, vl] : stochastic_entry(a.rows, k, i, l)) {
          for (const auto& [cr, vr] : stochastic_entry(k, a.cols, l, j)) {
            auto letters = letter(0, cl);
            const auto right = letter(1, cr);
            letters.insert(letters.end(), right.begin(), right.end());
            p.constraint_map.add_term(out, vl * vr, std::move(letters));
          }
        }
      }
      p.constraint_map.add_term(out, -norm.matrix.at(i, j), {});
    }
  }
  p.constraint_map.simplify();
  return p;
}

NestedRectanglesInstance nested_rectangles_matrix(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) {
    throw Error(ErrorKind::DomainError, "(a, b) must lie in [0,1]^2");
  }
  const double q = 0.25;
  std::vector<double> e = {
      q * (1 - a), q * (1 + a), q * (1 - b), q * (1 + b),  //
      q * (1 + a), q * (1 - a), q * (1 - b), q * (1 + b),  //
      q * (1 + a), q * (1 - a), q * (1 + b), q * (1 - b),  //
      q * (1 - a), q * (1 + a), q * (1 + b), q * (1 - b),
  };
  return NestedRectanglesInstance{a, b, NonnegMatrix{4, 4, std::move(e)}};
}

Problem nested_rectangles_problem(double a, double b) {
  return nmf_problem(nested_rectangles_matrix(a, b).m, 3, "U", "V");
}

bool analytic_feasible(double a, double b) { return (1.0 + a) * (1.0 + b) <= 2.0; }

PointCheck evaluate_point(double a, double b, const HierarchySpec& spec, const SolveOptions& options) {
  const Problem problem = nested_rectangles_problem(a, b);
  const LinearProgram lp = build_lp(problem, spec);
  const auto t0 = std::chrono::steady_clock::now();
  PointCheck out;
  out.outcome = solve(lp, options);
  const auto t1 = std::chrono::steady_clock::now();
  out.record = RegionRecord{a,
                            b,
                            spec.level,
                            std::string(to_string(spec.variant)),
                            std::string(to_string(spec.pi)),
                            std::string(to_string(spec.family)),
                            out.outcome.status,
                            std::chrono::duration<double>(t1 - t0).count()};
  return out;
}

RegionRecord check_point(double a, double b, const HierarchySpec& spec, const SolveOptions& options) {
  return evaluate_point(a, b, spec, options).record;
}

namespace {

std::vector<RegionRecord> scan_column(double a, const HierarchySpec& spec, const ScanOptions& options,
                                      bool& monotone) {
  std::vector<RegionRecord> out;
  const int g = options.grid;
  for (int j = 0; j < g; ++j) {
    const double b = static_cast<double>(j) / (g - 1);
    out.push_back(check_point(a, b, spec, options.solve));
  }
  // feasible...feasible infeasible...infeasible, unknowns aside
  monotone = true;
  bool seen_infeasible = false;
  for (const auto& r : out) {
    if (r.status == SolveStatus::Infeasible) seen_infeasible = true;
    if (r.status == SolveStatus::Feasible && seen_infeasible) monotone = false;
  }

  // Bisect every definite transition between neighbours. In a monotone
  // column that is one interval; otherwise each one is refined.
  const std::size_t coarse = out.size();
  for (std::size_t j = 0; j + 1 < coarse; ++j) {
    const SolveStatus s0 = out[j].status;
    const SolveStatus s1 = out[j + 1].status;
    if (s0 == SolveStatus::Unknown || s1 == SolveStatus::Unknown || s0 == s1) continue;
    double lo = out[j].b;
    double hi = out[j + 1].b;
    while (hi - lo > options.bisect_tol) {
      const double mid = 0.5 * (lo + hi);
      RegionRecord r = check_point(a, mid, spec, options.solve);
      const SolveStatus s = r.status;
      out.push_back(std::move(r));
      if (s == SolveStatus::Unknown) break;
      if (s == s0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<RegionRecord> scan_region(const HierarchySpec& spec, const ScanOptions& options, ScanReport* report) {
  if (options.grid < 2) throw Error(ErrorKind::InvalidArgument, "grid must be at least 2");
  if (!(options.bisect_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "bisect_tol must be positive");
  const int g = options.grid;
  std::vector<std::vector<RegionRecord>> columns(static_cast<std::size_t>(g));
  std::vector<char> monotone(static_cast<std::size_t>(g), 1);
#ifdef _OPENMP
  const int threads = options.workers > 0 ? options.workers : omp_get_max_threads();
#endif
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < g; ++i) {
    try {
      bool mono = true;
      columns[static_cast<std::size_t>(i)] = scan_column(static_cast<double>(i) / (g - 1), spec, options, mono);
      monotone[static_cast<std::size_t>(i)] = mono ? 1 : 0;
    } catch (...) {
#pragma omp critical(scan_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RegionRecord> records;
  for (int i = 0; i < g; ++i) {
    auto& col = columns[static_cast<std::size_t>(i)];
    if (report != nullptr) {
      report->probes += col.size();
      if (!monotone[static_cast<std::size_t>(i)]) report->nonmonotone_columns.push_back(static_cast<double>(i) / (g - 1));
    }
    records.insert(records.end(), col.begin(), col.end());
  }
  std::stable_sort(records.begin(), records.end(), [](const RegionRecord& x, const RegionRecord& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return records;
}

void write_region_csv(const std::vector<RegionRecord>& records, std::ostream& out) {
  out << "a,b,level,variant,pi,family,status,solve_seconds\n";
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", r.a, r.b);
    out << buf << r.level << ',' << r.variant << ',' << r.pi << ',' << r.family << ',' << to_string(r.status) << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.solve_seconds);
    out << buf << '\n';
  }
}

void write_region_csv(const std::vector<RegionRecord>& records, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::IOError, "cannot open " + path.string() + " for writing");
  write_region_csv(records, file);
  file.flush();
  if (!file) throw Error(ErrorKind::IOError, "write to " + path.string() + " failed");
}

}  // namespace polarize
