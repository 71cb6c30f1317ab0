#include "cli/cli.hpp"

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "fitsink/barrier.hpp"
#include "fitsink/fc_solver.hpp"
#include "fitsink/gauge.hpp"
#include "fitsink/io.hpp"
#include "fitsink/nestedness.hpp"
#include "fitsink/sk_solver.hpp"

namespace fitsink::cli {
namespace {

struct InputFlags {
  std::string path;
  double rca_threshold = 1.0;
  bool force_rca = false;
  bool force_presence = false;
  std::optional<int> year;
};

struct SolverFlags {
  std::string algorithm = "fc";
  std::string schedule;  // empty: each solver's default
  std::string gauge = "normalization";
  double gauge_target = 1.0;
  double tolerance = 1e-13;
  Index max_iterations = 100000;
  bool log_domain = false;
};

// Thrown for flag combinations CLI11 cannot express; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Diagnostics {
 public:
  explicit Diagnostics(std::ostream& err) : err_(err) {
    color_ = &err == &std::cerr && ::isatty(STDERR_FILENO) != 0 && std::getenv("NO_COLOR") == nullptr;
  }

  void warning(const std::string& message) { emit("warning", "\033[33m", message); }
  void error(const std::string& message) { emit("error", "\033[31m", message); }

 private:
  void emit(const char* tag, const char* ansi, const std::string& message) {
    if (color_) {
      err_ << ansi << tag << ":\033[0m " << message << "\n";
    } else {
      err_ << tag << ": " << message << "\n";
    }
  }

  std::ostream& err_;
  bool color_ = false;
};

void add_input_flags(CLI::App* cmd, InputFlags& f) {
  cmd->add_option("--input", f.path, "Flow CSV (country,product,value[,year])")
      ->required()
      ->check(CLI::ExistingFile);
  auto* threshold =
      cmd->add_option("--rca-threshold", f.rca_threshold, "RCA binarization threshold")
          ->capture_default_str();
  auto* rca = cmd->add_flag("--rca", f.force_rca, "Always binarize by RCA");
  auto* presence =
      cmd->add_flag("--presence", f.force_presence, "Binarize by value > 0 instead of RCA");
  presence->excludes(rca)->excludes(threshold);
  cmd->add_option("--year", f.year, "Select one year of a multi-year flow file");
}

void add_solver_flags(CLI::App* cmd, SolverFlags& f, bool with_algorithm) {
  if (with_algorithm) {
    cmd->add_option("--algorithm", f.algorithm, "Solver")
        ->check(CLI::IsMember({"fc", "sk"}))
        ->capture_default_str();
    cmd->add_flag("--log-domain", f.log_domain, "Log-domain Sinkhorn-Knopp (sk only)");
  }
  cmd->add_option("--schedule", f.schedule,
                  "Update schedule (default: jacobi for fc, gauss-seidel for sk)")
      ->check(CLI::IsMember({"jacobi", "gauss-seidel"}));
  cmd->add_option("--gauge", f.gauge,
                  "normalization | dummy | reference-row:LABEL | reference-col:LABEL")
      ->capture_default_str();
  cmd->add_option("--gauge-target", f.gauge_target, "Value pinned by the gauge")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--tol", f.tolerance, "Convergence tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iter", f.max_iterations, "Iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

Schedule schedule_of(const std::string& name) {
  return name == "gauss-seidel" ? Schedule::gauss_seidel : Schedule::jacobi;
}

FCOptions fc_options(const SolverFlags& f) {
  FCOptions o;
  if (!f.schedule.empty()) o.schedule = schedule_of(f.schedule);
  o.value_tolerance = f.tolerance;
  o.max_iterations = f.max_iterations;
  return o;
}

SKOptions sk_options(const SolverFlags& f) {
  SKOptions o;
  o.tolerance = f.tolerance;
  o.max_iterations = f.max_iterations;
  o.log_domain = f.log_domain;
  if (!f.schedule.empty()) o.schedule = schedule_of(f.schedule);
  return o;
}

GaugeSpec gauge_of(const SolverFlags& f) {
  try {
    return parse_gauge(f.gauge, f.gauge_target);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

BipartiteMatrix load_matrix(const InputFlags& f, Diagnostics& diag) {
  FlowTable flows = parse_flows_file(f.path);
  if (flows.duplicate_count > 0) {
    diag.warning(std::to_string(flows.duplicate_count) + " duplicate rows in '" + f.path +
                 "', last value kept");
  }
  if (f.year) {
    flows = select_year(flows, *f.year);
  } else if (flow_years(flows).size() > 1) {
    throw Error(ErrorCode::InvalidArgument, "'" + f.path + "' spans several years; pass --year");
  }
  const Binarization mode = f.force_presence ? Binarization::presence
                            : f.force_rca    ? Binarization::rca
                                             : Binarization::automatic;
  auto result = binarize(flows, mode, f.rca_threshold);
  for (const auto& label : result.removed_rows) diag.warning("dropped empty country '" + label + "'");
  for (const auto& label : result.removed_cols) diag.warning("dropped empty product '" + label + "'");
  return std::move(result.matrix);
}

FCResult solve_fc(const BipartiteMatrix& matrix, const SolverFlags& f) {
  const FCOptions options = fc_options(f);
  return apply_gauge(fc_solve(matrix, options), matrix, gauge_of(f), options);
}

void emit(const std::string& text, const std::string& output, std::ostream& out) {
  if (output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(output, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot write '" + output + "'");
  file << text;
  if (!file) throw Error(ErrorCode::IoError, "write failed for '" + output + "'");
}

// Warnings for collapsing scores; returns the exit code for the solve.
int check_fc(const FCResult& r, Diagnostics& diag) {
  for (Index k : r.zero_limit_rows) diag.warning("fitness of '" + r.row_labels[k] + "' tends to zero");
  if (r.converged) return kExitOk;
  diag.error("NotConverged: Fitness-Complexity stopped after " + std::to_string(r.iterations) +
             " iterations (residual " + std::to_string(r.residual) + ")");
  return kExitDomainError;
}

int check_sk(const ScalingSolution& s, Diagnostics& diag) {
  if (s.converged) return kExitOk;
  diag.error(std::string("NotConverged: Sinkhorn-Knopp stopped after ") +
             std::to_string(s.iterations) + " iterations (marginal residual " +
             std::to_string(s.marginal_residual) + ")" +
             (s.total_support_suspect ? "; TotalSupportSuspect: pattern lacks total support" : ""));
  return kExitDomainError;
}

int worst(int a, int b) { return std::max(a, b); }

int run_parsed(CLI::App& app, const InputFlags& input, const SolverFlags& solver,
               const std::string& output, const std::string& svg, const PathwayParams& params,
               const std::vector<std::string>& inputs, const std::string& income_path,
               const std::vector<std::size_t>& generate_shape, double noise, std::uint64_t seed,
               std::ostream& out, Diagnostics& diag) {
  const auto* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();

  if (name == "generate") {
    const auto matrix = generate_nested(generate_shape[0], generate_shape[1], noise, seed);
    emit(serialize_flows(matrix_to_flows(matrix)), output, out);
    return kExitOk;
  }

  if (name == "trajectories") {
    const GaugeSpec gauge = gauge_of(solver);
    std::vector<std::future<YearResult>> jobs;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      FlowTable flows = parse_flows_file(inputs[k]);
      const auto years = flow_years(flows);
      if (years.size() > 1) {
        throw Error(ErrorCode::InvalidArgument, "'" + inputs[k] + "' spans several years");
      }
      int year = static_cast<int>(k);
      if (years.empty()) {
        diag.warning("'" + inputs[k] + "' has no year column; using position " + std::to_string(k));
      } else {
        year = years.front();
      }
      InputFlags per_file = input;
      jobs.push_back(std::async(std::launch::async, [=, flows = std::move(flows)] {
        const Binarization mode = per_file.force_presence ? Binarization::presence
                                  : per_file.force_rca    ? Binarization::rca
                                                          : Binarization::automatic;
        auto matrix = binarize(flows, mode, per_file.rca_threshold).matrix;
        const FCOptions options = fc_options(solver);
        return YearResult{year, apply_gauge(fc_solve(matrix, options), matrix, gauge, options)};
      }));
    }
    std::vector<YearResult> yearly;
    int code = kExitOk;
    for (auto& job : jobs) {
      yearly.push_back(job.get());
      code = worst(code, check_fc(yearly.back().result, diag));
    }
    std::optional<IncomeTable> income;
    if (!income_path.empty()) income = parse_income_file(income_path);
    emit(trajectory_csv(trajectories(yearly, income ? &*income : nullptr)), output, out);
    return code;
  }

  const BipartiteMatrix matrix = load_matrix(input, diag);

  if (name == "fit") {
    if (solver.algorithm == "sk") {
      if (gauge_of(solver).kind != GaugeKind::normalization) {
        throw UsageError("--gauge applies to --algorithm fc only");
      }
      const auto solution = sk_solve(ScalingProblem::from_bipartite(matrix), sk_options(solver));
      emit(serialize_result(solution), output, out);
      return check_sk(solution, diag);
    }
    if (solver.log_domain) throw UsageError("--log-domain applies to --algorithm sk only");
    const auto result = solve_fc(matrix, solver);
    emit(serialize_result(result), output, out);
    return check_fc(result, diag);
  }

  if (name == "compare") {
    const auto fc = solve_fc(matrix, solver);
    const auto sk = sk_solve(ScalingProblem::from_bipartite(matrix), sk_options(solver));
    emit(serialize_result(equivalence_report(fc, sk), fc.gauge), output, out);
    return worst(check_fc(fc, diag), check_sk(sk, diag));
  }

  if (name == "barrier") {
    const auto fc = solve_fc(matrix, solver);
    const auto problem = ScalingProblem::from_bipartite(matrix);
    const auto sk = sk_solve(problem, sk_options(solver));
    const auto point = PotentialPoint::from_logs(sk.log_u, sk.log_v);
    BarrierSummary summary{barrier_line(matrix, fc.fitness, fc.complexity),
                           stability_report(problem, point), barrier_value(problem, point)};
    emit(serialize_result(summary, fc.gauge), output, out);
    if (summary.stability->not_stationary) diag.warning("NotStationary: gradient above 1e-8");
    return worst(check_fc(fc, diag), check_sk(sk, diag));
  }

  if (name == "reorder") {
    const auto fc = solve_fc(matrix, solver);
    const auto ordered = reorder(matrix, fc.fitness, fc.complexity);
    // Zero-limit scores have no finite ratio Q/F, so the line is left out.
    std::optional<BarrierLine> line;
    if (fc.zero_limit_rows.empty() && (fc.fitness.array() > 0.0).all() &&
        (fc.complexity.array() > 0.0).all()) {
      line = barrier_line(matrix, fc.fitness, fc.complexity);
    }
    write_matrix_svg(ordered, line, svg);
    emit(serialize_result(ordered, fc.gauge), output, out);
    return check_fc(fc, diag);
  }

  if (name == "classify") {
    const auto fc = solve_fc(matrix, solver);
    emit(serialize_result(classify_pathways(matrix, fc.fitness, fc.complexity, params), fc.gauge),
         output, out);
    return check_fc(fc, diag);
  }

  throw UsageError("unknown subcommand '" + name + "'");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Diagnostics diag(err);
  CLI::App app{"Fitness-Complexity and Sinkhorn-Knopp analysis of country-product matrices",
               "fitsink"};
  app.require_subcommand(1);

  InputFlags input;
  SolverFlags solver;
  std::string output;
  std::string svg;
  PathwayParams params;
  std::vector<std::string> inputs;
  std::string income_path;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;

  auto* fit = app.add_subcommand("fit", "Solve Fitness-Complexity or Sinkhorn-Knopp");
  add_input_flags(fit, input);
  add_solver_flags(fit, solver, true);
  fit->add_option("--output", output, "Result JSON path (default stdout)");

  auto* compare = app.add_subcommand("compare", "Equivalence report between FC and SK");
  add_input_flags(compare, input);
  add_solver_flags(compare, solver, false);
  compare->add_option("--output", output, "Result JSON path (default stdout)");

  auto* barrier = app.add_subcommand("barrier", "Barrier line and stability certificate");
  add_input_flags(barrier, input);
  add_solver_flags(barrier, solver, false);
  barrier->add_option("--output", output, "Result JSON path (default stdout)");

  auto* reorder_cmd = app.add_subcommand("reorder", "Reordered matrix as JSON and SVG");
  add_input_flags(reorder_cmd, input);
  add_solver_flags(reorder_cmd, solver, false);
  reorder_cmd->add_option("--svg", svg, "SVG output path")->required();
  reorder_cmd->add_option("--output", output, "Result JSON path (default stdout)");

  auto* classify = app.add_subcommand("classify", "Learner / Exploiter / Explorer labels");
  add_input_flags(classify, input);
  add_solver_flags(classify, solver, false);
  classify->add_option("--near-band", params.near_band, "Near-line band as a fraction of t* F")
      ->capture_default_str();
  classify->add_option("--gap-threshold", params.gap_threshold, "Frontier-gap threshold (log)")
      ->capture_default_str();
  classify->add_option("--density-cutoff", params.density_cutoff, "Minimum near-line density")
      ->capture_default_str();
  classify->add_option("--output", output, "Result JSON path (default stdout)");

  auto* traj = app.add_subcommand("trajectories", "Per-year ln F table under a common gauge");
  traj->add_option("--inputs", inputs, "One flow CSV per year")
      ->required()
      ->check(CLI::ExistingFile);
  solver.gauge = "dummy";
  add_solver_flags(traj, solver, false);
  traj->add_option("--income", income_path, "CSV country,year,income")->check(CLI::ExistingFile);
  traj->add_option("--rca-threshold", input.rca_threshold, "RCA binarization threshold");
  traj->add_option("--output", output, "CSV path (default stdout)");

  auto* generate = app.add_subcommand("generate", "Nested test matrix as flow CSV");
  generate->add_option("--rows", rows, "Countries")->required()->check(CLI::PositiveNumber);
  generate->add_option("--cols", cols, "Products")->required()->check(CLI::PositiveNumber);
  generate->add_option("--noise", noise, "Flip probability scale")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  generate->add_option("--seed", seed, "Random seed")->capture_default_str();
  generate->add_option("--output", output, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsageError;
  }
  // The trajectories default gauge is dummy; everything else defaults to
  // normalization unless --gauge was given.
  const auto* gauge_flag = app.get_subcommands().front()->get_option_no_throw("--gauge");
  if (!traj->parsed() && gauge_flag != nullptr && gauge_flag->count() == 0) {
    solver.gauge = "normalization";
  }

  try {
    return run_parsed(app, input, solver, output, svg, params, inputs, income_path, {rows, cols},
                      noise, seed, out, diag);
  } catch (const UsageError& e) {
    diag.error(e.what());
    return kExitUsageError;
  } catch (const Error& e) {
    diag.error(e.what());
    return kExitDomainError;
  } catch (const std::exception& e) {
    diag.error(e.what());
    return kExitDomainError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("fitsink");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fitsink::cli
