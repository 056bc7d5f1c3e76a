// polarize: build and solve hierarchy relaxations from the command line.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "polarize/error.hpp"
#include "polarize/hierarchy.hpp"
#include "polarize/io.hpp"
#include "polarize/lp.hpp"
#include "polarize/moments.hpp"
#include "polarize/nmf.hpp"

namespace {

using nlohmann::json;
using namespace polarize;

constexpr int kExitFeasible = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitUnknown = 3;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;
constexpr int kExitIO = 74;

struct RunConfig {
  std::string subcommand;
  int level = 3;
  std::string variant = "plus";
  std::string pi = "id";
  std::string family = "lite";
  std::optional<double> a;
  std::optional<double> b;
  std::string problem_path;
  std::string matrix_path;
  int rank = 3;
  int grid = 64;
  double bisect_tol = 1e-3;
  double feas_tol = 1e-7;
  double time_limit = 0.0;  // 0: none
  std::string format = "mps";
  std::string out_path;
  int workers = 0;
  std::uint64_t seed = 1;
  int pi_samples = 100;
  std::string solver;

  HierarchySpec spec() const {
    HierarchySpec s;
    s.level = level;
    s.variant = variant == "plus" ? Variant::Plus : Variant::Polarized;
    s.pi = pi == "id" ? PolarizationKind::Identity
           : pi == "hs" ? PolarizationKind::HilbertSchmidt
                        : PolarizationKind::MatrixProduct;
    s.family = family == "lite" ? ConstraintFamily::FacetExtensions : ConstraintFamily::FacetProducts;
    return s;
  }

  SolveOptions solve_options() const {
    SolveOptions o;
    o.feas_tol = feas_tol;
    o.backend = solver;
    if (time_limit > 0.0) o.time_limit_seconds = time_limit;
    return o;
  }

  std::string instance() const {
    if (!problem_path.empty()) return "problem";
    if (!matrix_path.empty()) return "matrix";
    return "nested-rectangles";
  }

  json to_json() const {
    const char* env = std::getenv("POLARIZE_SOLVER");
    std::string backend = solver;
    if (backend.empty()) backend = env != nullptr && *env != '\0' ? env : "highs";
    json j = {{"subcommand", subcommand},
              {"instance", instance()},
              {"n", level},
              {"variant", variant},
              {"pi", pi},
              {"family", family},
              {"feas_tol", feas_tol},
              {"workers", workers},
              {"seed", seed},
              {"solver", backend}};
    j["a"] = a ? json(*a) : json(nullptr);
    j["b"] = b ? json(*b) : json(nullptr);
    j["problem"] = problem_path.empty() ? json(nullptr) : json(problem_path);
    j["matrix"] = matrix_path.empty() ? json(nullptr) : json(matrix_path);
    j["rank"] = rank;
    j["grid"] = grid;
    j["bisect_tol"] = bisect_tol;
    j["time_limit"] = time_limit > 0.0 ? json(time_limit) : json(nullptr);
    j["format"] = format;
    j["out"] = out_path.empty() ? json(nullptr) : json(out_path);
    return j;
  }
};

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return kExitFeasible;
    case SolveStatus::Infeasible: return kExitInfeasible;
    case SolveStatus::Unknown: return kExitUnknown;
  }
  return kExitUnknown;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::IOError: return kExitIO;
    case ErrorKind::BackendFailure:
    case ErrorKind::CapacityError: return kExitInternal;
    default: return kExitUsage;
  }
}

Problem load_problem(const RunConfig& cfg) {
  if (!cfg.problem_path.empty()) return read_problem(cfg.problem_path);
  if (!cfg.matrix_path.empty()) return nmf_problem(read_matrix(cfg.matrix_path), cfg.rank);
  return nested_rectangles_problem(cfg.a.value_or(0.0), cfg.b.value_or(0.0));
}

// Π soundness is a property of the map, so the sample check runs before
// any polarized solve.
void check_pi(const RunConfig& cfg, const Problem& problem) {
  if (cfg.variant != "polarized") return;
  const HierarchySpec spec = cfg.spec();
  const auto& f = problem.constraint_map;
  if (!check_pi_soundness(spec.pi, f.output_dim(), cfg.pi_samples, cfg.seed, f.shape())) {
    throw Error(ErrorKind::InvalidArgument, "polarization map failed the soundness sample check");
  }
}

json outcome_json(const SolveOutcome& o) {
  json j = {{"status", std::string(to_string(o.status))},
            {"backend", o.backend},
            {"max_violation", o.max_violation},
            {"certificate_verified", o.certificate.has_value()}};
  j["objective"] = o.objective_value ? json(*o.objective_value) : json(nullptr);
  if (!o.diagnostic.empty()) j["diagnostic"] = o.diagnostic;
  return j;
}

int run_check(const RunConfig& cfg) {
  if (cfg.instance() == "nested-rectangles") {
    if (!cfg.a || !cfg.b) throw CLI::ValidationError("check", "--a and --b are required without --problem/--matrix");
    check_pi(cfg, nested_rectangles_problem(*cfg.a, *cfg.b));
    const PointCheck pc = evaluate_point(*cfg.a, *cfg.b, cfg.spec(), cfg.solve_options());
    const RegionRecord& r = pc.record;
    json j = {{"a", r.a},           {"b", r.b},   {"level", r.level},   {"variant", r.variant},
              {"pi", r.pi},         {"family", r.family}, {"status", std::string(to_string(r.status))},
              {"solve_seconds", r.solve_seconds}};
    j["certificate_verified"] = pc.outcome.certificate.has_value();
    j["backend"] = pc.outcome.backend;
    if (!pc.outcome.diagnostic.empty()) j["diagnostic"] = pc.outcome.diagnostic;
    std::cout << j.dump() << '\n';
    return exit_code_for(r.status);
  }
  const Problem problem = load_problem(cfg);
  check_pi(cfg, problem);
  const LinearProgram lp = build_lp(problem, cfg.spec());
  const SolveOutcome o = solve(lp, cfg.solve_options());
  json j = outcome_json(o);
  j["level"] = cfg.level;
  j["variant"] = cfg.variant;
  j["pi"] = cfg.pi;
  j["family"] = cfg.family;
  std::cout << j.dump() << '\n';
  return exit_code_for(o.status);
}

int run_nmf(const RunConfig& cfg) {
  if (cfg.matrix_path.empty()) throw CLI::ValidationError("nmf", "--matrix is required");
  const NonnegMatrix m = read_matrix(cfg.matrix_path);
  const Problem problem = nmf_problem(m, cfg.rank);
  check_pi(cfg, problem);
  const LinearProgram lp = build_lp(problem, cfg.spec());
  const SolveOutcome o = solve(lp, cfg.solve_options());
  json j = outcome_json(o);
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["rank"] = cfg.rank;
  j["level"] = cfg.level;
  j["variant"] = cfg.variant;
  j["pi"] = cfg.pi;
  j["family"] = cfg.family;
  // infeasible certifies nonnegative rank > k
  j["verdict"] = o.status == SolveStatus::Infeasible ? "rank_exceeds" : o.status == SolveStatus::Feasible
                                                                           ? "undetermined"
                                                                           : "unknown";
  std::cout << j.dump() << '\n';
  return exit_code_for(o.status);
}

int run_scan(const RunConfig& cfg) {
  ScanOptions opts;
  opts.grid = cfg.grid;
  opts.bisect_tol = cfg.bisect_tol;
  opts.workers = cfg.workers;
  opts.solve = cfg.solve_options();
  if (cfg.variant == "polarized") check_pi(cfg, nested_rectangles_problem(0.0, 0.0));
  ScanReport report;
  const auto records = scan_region(cfg.spec(), opts, &report);
  if (cfg.out_path.empty()) {
    write_region_csv(records, std::cout);
  } else {
    write_region_csv(records, cfg.out_path);
  }
  json summary = {{"records", records.size()}, {"probes", report.probes}};
  summary["nonmonotone_columns"] = report.nonmonotone_columns;
  std::cerr << "# scan " << summary.dump() << '\n';
  return 0;
}

int run_export(const RunConfig& cfg) {
  const Problem problem = load_problem(cfg);
  const LinearProgram lp = build_lp(problem, cfg.spec());
  const ExportFormat fmt = cfg.format == "lp" ? ExportFormat::LpText : ExportFormat::FreeMps;
  if (cfg.out_path.empty() || cfg.out_path == "-") {
    write_lp(lp, fmt, std::cout);
  } else {
    export_lp(lp, fmt, cfg.out_path);
  }
  json j = {{"variables", lp.num_variables()}, {"rows", lp.num_rows()}, {"nonzeros", lp.num_nonzeros()}};
  std::cerr << "# export " << j.dump() << '\n';
  return 0;
}

int run_count(const RunConfig& cfg) {
  // Counting never solves anything; the nested instance's spaces are
  // built directly so the count stays instant.
  std::vector<StateSpace> spaces;
  if (cfg.instance() == "nested-rectangles") {
    spaces.push_back(make_left_stochastic_space(4, 3, "U"));
    spaces.push_back(make_left_stochastic_space(3, 4, "V"));
  } else {
    spaces = load_problem(cfg).spaces;
  }
  std::cout << count_indices(cfg.level, spaces) << '\n';
  return 0;
}

void add_spec_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--n", cfg.level, "hierarchy level")->check(CLI::Range(1, 64));
  sub->add_option("--variant", cfg.variant, "plus | polarized")->check(CLI::IsMember({"plus", "polarized"}));
  sub->add_option("--pi", cfg.pi, "polarization map: id | hs | matrix")->check(CLI::IsMember({"id", "hs", "matrix"}));
  sub->add_option("--family", cfg.family, "facet constraints: lite | full")->check(CLI::IsMember({"lite", "full"}));
  sub->add_option("--seed", cfg.seed, "seed for the polarization soundness samples");
}

void add_instance_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--a", cfg.a, "inner rectangle half-width")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--b", cfg.b, "inner rectangle half-height")->check(CLI::Range(0.0, 1.0));
  auto* problem = sub->add_option("--problem", cfg.problem_path, "problem JSON file");
  auto* matrix = sub->add_option("--matrix", cfg.matrix_path, "matrix JSON file");
  problem->excludes(matrix);
  sub->add_option("--rank", cfg.rank, "factorization rank for --matrix")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Polarization-hierarchy LP relaxations and nonnegative-rank certificates"};
  app.require_subcommand(1);
  app.add_option("--feas-tol", cfg.feas_tol, "feasibility and certificate tolerance")->check(CLI::PositiveNumber);
  app.add_option("--time-limit", cfg.time_limit, "seconds per solve (0: unlimited)")->check(CLI::NonNegativeNumber);
  app.add_option("--solver", cfg.solver, "LP backend (default: $POLARIZE_SOLVER or highs)");

  auto* check = app.add_subcommand("check", "solve one relaxation; exit 0 feasible, 2 infeasible, 3 unknown");
  add_spec_options(check, cfg);
  add_instance_options(check, cfg);

  auto* scan = app.add_subcommand("scan", "classify the (a, b) square for the nested rectangles");
  add_spec_options(scan, cfg);
  scan->add_option("--grid", cfg.grid, "grid points per axis")->check(CLI::Range(2, 100000));
  scan->add_option("--bisect-tol", cfg.bisect_tol, "bisection width in b")->check(CLI::PositiveNumber);
  scan->add_option("--out", cfg.out_path, "CSV destination (default stdout)");
  scan->add_option("--workers", cfg.workers, "parallel a-columns (0: all cores)")->check(CLI::NonNegativeNumber);

  auto* nmf = app.add_subcommand("nmf", "rank-k certificate for a nonnegative matrix");
  add_spec_options(nmf, cfg);
  nmf->add_option("--matrix", cfg.matrix_path, "matrix JSON file")->required();
  nmf->add_option("--rank", cfg.rank, "factorization rank")->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("export", "write the LP without solving");
  add_spec_options(exp, cfg);
  add_instance_options(exp, cfg);
  exp->add_option("--format", cfg.format, "mps | lp")->check(CLI::IsMember({"mps", "lp"}));
  exp->add_option("--out", cfg.out_path, "destination (default stdout)");

  auto* count = app.add_subcommand("count", "number of moment variables");
  count->add_option("--n", cfg.level, "hierarchy level")->check(CLI::Range(0, 64));
  add_instance_options(count, cfg);

  try {
    app.parse(argc, argv);
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.subcommand != "count" && cfg.variant == "polarized" && cfg.level < 2) {
      throw CLI::ValidationError("--n", "the polarized variant needs n >= 2");
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  std::cerr << "# config " << cfg.to_json().dump() << '\n';
  try {
    if (cfg.subcommand == "check") return run_check(cfg);
    if (cfg.subcommand == "scan") return run_scan(cfg);
    if (cfg.subcommand == "nmf") return run_nmf(cfg);
    if (cfg.subcommand == "export") return run_export(cfg);
    return run_count(cfg);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
