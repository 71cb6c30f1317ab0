// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli/cli.hpp"
#include "fitsink/barrier.hpp"
#include "fitsink/fc_solver.hpp"
#include "fitsink/gauge.hpp"
#include "fitsink/io.hpp"
#include "fitsink/nestedness.hpp"
#include "fitsink/sk_solver.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace fitsink;
using namespace fitsink::test;

namespace {

constexpr std::uint64_t kInstanceSeed = 2024;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      if (pass) detail.str("");
      pass = false;
      detail << what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// M* followed by the random total-support family.
std::vector<BipartiteMatrix> instances() {
  std::vector<BipartiteMatrix> out{mstar()};
  for (auto& m : random_total_support(20, kInstanceSeed, 8, 6)) out.push_back(std::move(m));
  return out;
}

double spread(const Eigen::VectorXd& x) {
  return (x.maxCoeff() - x.minCoeff()) / std::max(1.0, x.cwiseAbs().maxCoeff());
}

double max_rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return ((a - b).array().abs() / b.array().abs()).maxCoeff();
}

Verdict equivalence() {
  Verdict v;
  const auto start = Clock::now();
  double worst_gap = 0.0;
  int index = 0;
  int constant = 0;
  for (const auto& m : instances()) {
    const auto fc = fc_solve(m);
    const auto sk = sk_solve(ScalingProblem::from_bipartite(m));
    const auto report = equivalence_report(fc, sk);
    if (report.constant_input) {
      // Both orderings are a single tie, so no correlation is defined.
      ++constant;
      v.require(spread(fc.fitness) <= 1e-12 && spread(sk.log_u) <= 1e-12,
                "instance " + std::to_string(index) + " flagged constant but scores vary");
    } else {
      v.require(report.spearman_F_vs_inv_u == 1.0,
                "instance " + std::to_string(index) + " spearman != 1");
    }
    v.require(report.max_relative_gap_after_gauge <= 1e-6,
              "instance " + std::to_string(index) + " gap above 1e-6");
    worst_gap = std::max(worst_gap, report.max_relative_gap_after_gauge);
    ++index;
  }
  const double elapsed = seconds_since(start);
  v.require(elapsed < 5.0, "runtime " + std::to_string(elapsed) + " s");
  if (v.pass) v.detail << index << " instances (" << constant << " constant), worst gap " << worst_gap << ", " << elapsed << " s";
  return v;
}

Verdict exact_fixed_point() {
  Verdict v;
  const auto fc = fc_solve(mstar());
  const double f_err = (fc.fitness - kFStar).lpNorm<Eigen::Infinity>();
  const double q_err = (fc.complexity - kQStar).lpNorm<Eigen::Infinity>();
  const auto problem = ScalingProblem::from_bipartite(mstar());
  const auto sk = sk_solve(problem);
  const double b_err = (scaled_matrix(problem, sk.u, sk.v).matrix - mstar_scaled()).lpNorm<Eigen::Infinity>();
  v.require(fc.converged && f_err <= 1e-10 && q_err <= 1e-10, "FC fixed point off");
  v.require(sk.converged && b_err <= 1e-10, "scaled matrix off");
  if (v.pass) v.detail << "F err " << f_err << ", Q err " << q_err << ", B err " << b_err;
  return v;
}

Verdict barrier_certificate() {
  Verdict v;
  const auto problem = ScalingProblem::from_bipartite(mstar());
  const auto sk = sk_solve(problem);
  const auto point = PotentialPoint::from_logs(sk.log_u, sk.log_v);
  const double value_err = std::abs(barrier_value(problem, point) - (3 + 4 * std::log(2.0)));
  const auto r = stability_report(problem, point);
  v.require(value_err <= 1e-10, "barrier value off by " + std::to_string(value_err));
  v.require(r.gradient_norm < 1e-10, "gradient not small");
  v.require(r.min_eigenvalue >= -1e-10, "negative eigenvalue");
  v.require(r.null_direction_residual < 1e-10, "null direction residual");
  v.require(r.diagonally_dominant, "not diagonally dominant");
  if (v.pass) {
    v.detail << "value err " << value_err << ", |grad| " << r.gradient_norm << ", min eig "
             << r.min_eigenvalue << ", |Hw| " << r.null_direction_residual;
  }
  return v;
}

Verdict gradient_check() {
  Verdict v;
  std::mt19937_64 rng(kInstanceSeed);
  std::uniform_real_distribution<double> coordinate(-1.0, 1.0);
  double worst = 0.0;
  for (std::uint64_t k = 1; k <= 3; ++k) {
    const auto p = random_positive_problem(2 + k, 5 - k, kInstanceSeed + k);
    const auto value = [&](const Eigen::VectorXd& phi) {
      return barrier_value(p, PotentialPoint(phi, p.rows()));
    };
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd phi(p.rows() + p.cols());
      for (auto& x : phi) x = coordinate(rng);
      const Eigen::VectorXd analytic = barrier_gradient(p, PotentialPoint(phi, p.rows()));
      const Eigen::VectorXd numeric = oracle::central_gradient(value, phi, 1e-6);
      const double rel = (analytic - numeric).lpNorm<Eigen::Infinity>() /
                         std::max(1.0, analytic.lpNorm<Eigen::Infinity>());
      worst = std::max(worst, rel);
    }
  }
  v.require(worst <= 1e-6, "relative error " + std::to_string(worst));
  if (v.pass) v.detail << "30 points, worst relative error " << worst;
  return v;
}

Verdict scale_invariance() {
  Verdict v;
  std::mt19937_64 rng(kInstanceSeed);
  std::uniform_real_distribution<double> coordinate(-1.0, 1.0);
  std::vector<ScalingProblem> problems{ScalingProblem::from_bipartite(mstar())};
  for (std::uint64_t k = 1; k <= 3; ++k) problems.push_back(random_positive_problem(3, 4, k));
  double worst_value = 0.0;
  for (const auto& p : problems) {
    Eigen::VectorXd phi(p.rows() + p.cols());
    for (auto& x : phi) x = coordinate(rng);
    const PotentialPoint point(phi, p.rows());
    const double base = barrier_value(p, point);
    for (double alpha : {1e-3, 1.0, 1e3}) {
      worst_value = std::max(worst_value, std::abs(barrier_value(p, point.rescaled(alpha)) - base) / std::abs(base));
    }
  }
  v.require(worst_value <= 1e-12, "barrier value moved by " + std::to_string(worst_value));

  auto all = instances();
  all.erase(all.begin() + 11, all.end());
  int index = 0;
  std::vector<int> broken;
  for (const auto& m : all) {
    const auto base = fc_solve(m);
    const auto f_rank = rank_vector(base.fitness, base.row_labels, true);
    const auto q_rank = rank_vector(base.complexity, base.col_labels, true);
    for (const auto& text : {std::string("normalization"), std::string("dummy"),
                             "reference-row:" + m.row_labels().front(),
                             "reference-col:" + m.col_labels().front()}) {
      const auto g = apply_gauge(base, m, parse_gauge(text));
      if (rank_vector(g.fitness, g.row_labels, true) != f_rank ||
          rank_vector(g.complexity, g.col_labels, true) != q_rank) {
        broken.push_back(index);
        v.require(false, "instance " + std::to_string(index) + " ranks differ under " + text);
      }
    }
    ++index;
  }
  if (v.pass) v.detail << "value drift " << worst_value << ", ranks equal on 11 instances x 4 gauges";
  return v;
}

Verdict barrier_line_check() {
  Verdict v;
  int index = 0;
  for (const auto& m : instances()) {
    const auto r = fc_solve(m);
    if (!r.converged) continue;
    const auto line = barrier_line(m, r.fitness, r.complexity);
    for (Index c = 0; c < m.rows(); ++c) {
      for (Index p = 0; p < m.cols(); ++p) {
        const auto ci = static_cast<Eigen::Index>(c);
        const auto pi = static_cast<Eigen::Index>(p);
        if (m.at(c, p) && r.complexity(pi) / r.fitness(ci) > line.threshold) {
          v.require(false, "cell above the line in instance " + std::to_string(index));
        }
      }
    }
    v.require(!line.attained_at.empty(), "line not attained in instance " + std::to_string(index));
    if (index == 0) {
      v.require(std::abs(line.threshold - 1.25) <= 1e-10, "M* threshold " + std::to_string(line.threshold));
    }
    ++index;
  }
  if (v.pass) v.detail << index << " converged instances, M* t* = 1.25";
  return v;
}

Verdict schedule_robustness() {
  Verdict v;
  const double tol = FCOptions{}.value_tolerance;
  double worst = 0.0;
  double worst_chain = 0.0;
  int index = 0;
  for (const auto& m : instances()) {
    FCOptions gs;
    gs.schedule = Schedule::gauss_seidel;
    const auto a = fc_solve(m);
    const auto b = fc_solve(m, gs);
    v.require(a.converged && b.converged, "instance " + std::to_string(index) + " did not converge");
    worst = std::max({worst, max_rel(a.fitness, b.fitness), max_rel(a.complexity, b.complexity)});
    worst_chain = std::max(worst_chain, a.chain_gap);
    ++index;
  }
  v.require(worst <= 10 * tol, "schedules differ by " + std::to_string(worst));
  v.require(worst_chain <= 10 * tol, "even/odd chains differ by " + std::to_string(worst_chain));
  if (v.pass) v.detail << "max schedule gap " << worst << ", max chain gap " << worst_chain;
  return v;
}

Verdict degenerate_detection() {
  Verdict v;
  const auto start = Clock::now();
  const auto m = degenerate_2x2();
  const auto fc = fc_solve(m);
  const auto sk = sk_solve(ScalingProblem::from_bipartite(m));
  const auto report = validate(m);
  const double elapsed = seconds_since(start);
  v.require(fc.zero_limit_rows == std::vector<Index>{1}, "second row not flagged");
  v.require(sk.total_support_suspect && !sk.converged, "SK did not report TotalSupportSuspect");
  v.require(!report.has_total_support, "validate reports total support");
  v.require(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
  if (v.pass) v.detail << "FC " << fc.iterations << " it, SK " << sk.iterations << " it, " << elapsed << " s";
  return v;
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  return cli::run(args, out, err);
}

Verdict pipeline_round_trip() {
  Verdict v;
  TempDir dir;
  const auto csv = dir.file("generated.csv").string();
  v.require(cli({"generate", "--rows", "12", "--cols", "9", "--noise", "0.3", "--seed", "7",
                 "--output", csv}) == 0,
            "generate failed");
  const auto parsed = binarize(parse_flows_file(csv), Binarization::automatic).matrix;
  v.require(parsed == drop_empty(generate_nested(12, 9, 0.3, 7)).matrix, "parsed matrix differs");

  FlowTable uniform;
  for (const auto& c : parsed.row_labels()) {
    for (const auto& p : parsed.col_labels()) uniform.records.push_back({c, p, 3.5, std::nullopt});
  }
  v.require(rca_binarize(uniform).matrix.entries() ==
                Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(parsed.rows()),
                                      static_cast<Eigen::Index>(parsed.cols())),
            "uniform flows not all ones");

  const auto json_path = dir.file("fit.json").string();
  cli({"fit", "--input", csv, "--output", json_path});
  const auto text = slurp(json_path);
  const auto read = read_result(json_path);
  v.require(serialize_result(read) == text, "JSON does not round-trip");
  const auto direct = fc_solve(parsed);
  const auto& fc = std::get<FCResult>(read);
  v.require(fc.fitness == apply_gauge(direct, parsed, GaugeSpec{}).fitness, "CLI result differs from library");
  write_result(dir.file("again.json"), fc);
  const auto again = std::get<FCResult>(read_result(dir.file("again.json")));
  v.require(again.fitness == fc.fitness && again.complexity == fc.complexity &&
                again.row_labels == fc.row_labels && again.iterations == fc.iterations &&
                again.residual == fc.residual && again.zero_limit_rows == fc.zero_limit_rows &&
                again.gauge == fc.gauge,
            "FCResult fields differ after write/read");

  const auto svg_a = dir.file("a.svg").string();
  const auto svg_b = dir.file("b.svg").string();
  const int ra = cli({"reorder", "--input", csv, "--svg", svg_a});
  const int rb = cli({"reorder", "--input", csv, "--svg", svg_b});
  v.require(ra == rb && !slurp(svg_a).empty() && slurp(svg_a) == slurp(svg_b), "SVG not byte-identical");
  if (v.pass) v.detail << parsed.rows() << "x" << parsed.cols() << " pipeline, SVG " << slurp(svg_a).size() << " bytes";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 FC/SK equivalence", equivalence},
      {"2 exact fixed point", exact_fixed_point},
      {"3 barrier certificate", barrier_certificate},
      {"4 gradient vs finite differences", gradient_check},
      {"5 scale and gauge invariance", scale_invariance},
      {"6 barrier line", barrier_line_check},
      {"7 schedule robustness", schedule_robustness},
      {"8 degenerate detection", degenerate_detection},
      {"9 pipeline round-trip", pipeline_round_trip},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail.str(std::string("exception: ") + e.what());
    }
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail.str() << "\n";
    if (!v.pass) ++failed;
  }
  std::cout << (9 - failed) << "/9 criteria passed\n";
  return failed;
}
