#include "fitsink/sk_solver.hpp"

#include <cmath>
#include <limits>

namespace fitsink {
namespace {

constexpr Index kFirstDriftCheckpoint = 256;
const double kMaxLogSpread = std::log(1e12);

void require_shape(const ScalingProblem& problem, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v) {
  if (static_cast<Index>(u.size()) != problem.rows() ||
      static_cast<Index>(v.size()) != problem.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "scaling vectors do not match the problem shape");
  }
}

Eigen::VectorXd divide_targets(const Eigen::VectorXd& targets, const Eigen::VectorXd& sums,
                               const char* axis) {
  Eigen::VectorXd out(targets.size());
  for (Eigen::Index k = 0; k < targets.size(); ++k) {
    if (!(sums(k) > 0.0)) {
      throw Error(ErrorCode::DivisionByZero,
                  std::string(axis) + " " + std::to_string(k) + " has zero scaled sum");
    }
    out(k) = targets(k) / sums(k);
  }
  return out;
}

double worst_relative(const Eigen::VectorXd& sums, const Eigen::VectorXd& targets) {
  return ((sums - targets).array().abs() / targets.array()).maxCoeff();
}

// Log-domain sums over the support of A: out_i = log sum_j exp(log_a_ij + x_j).
Eigen::VectorXd log_row_sums(const Eigen::MatrixXd& log_a, const Eigen::VectorXd& x) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd out(log_a.rows());
  for (Eigen::Index i = 0; i < log_a.rows(); ++i) {
    double peak = neg_inf;
    for (Eigen::Index j = 0; j < log_a.cols(); ++j) peak = std::max(peak, log_a(i, j) + x(j));
    if (peak == neg_inf) {
      out(i) = neg_inf;
      continue;
    }
    double acc = 0.0;
    for (Eigen::Index j = 0; j < log_a.cols(); ++j) {
      if (log_a(i, j) != neg_inf) acc += std::exp(log_a(i, j) + x(j) - peak);
    }
    out(i) = peak + std::log(acc);
  }
  return out;
}

// log sum_k exp(x_k) with the maximum shifted out.
double log_mass(const Eigen::VectorXd& x) {
  const double peak = x.maxCoeff();
  return peak + std::log((x.array() - peak).exp().sum());
}

double spread(const Eigen::VectorXd& x) { return x.maxCoeff() - x.minCoeff(); }

class DriftMonitor {
 public:
  // Returns true once the log spread has grown over three checkpoints in a
  // row or left the representable range.
  bool update(Index iteration, const Eigen::VectorXd& log_u, const Eigen::VectorXd& log_v) {
    if (iteration == 0 || (iteration & (iteration - 1)) != 0) return false;
    const double s = spread(log_u) + spread(log_v);
    if (!std::isfinite(s) || s > kMaxLogSpread) return true;
    if (iteration < kFirstDriftCheckpoint) {
      last_ = s;
      return false;
    }
    growth_ = s > last_ ? growth_ + 1 : 0;
    last_ = s;
    return growth_ >= 3;
  }

 private:
  double last_ = 0.0;
  int growth_ = 0;
};

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> sk_step(const ScalingProblem& problem,
                                                    const Eigen::VectorXd& u,
                                                    const Eigen::VectorXd& v) {
  require_shape(problem, u, v);
  if (!((u.array() > 0.0).all() && (v.array() > 0.0).all())) {
    throw Error(ErrorCode::NonPositiveInput, "u and v must be strictly positive");
  }
  const auto& a = problem.matrix();
  Eigen::VectorXd next_u = divide_targets(problem.row_targets(), a * v, "row");
  Eigen::VectorXd next_v = divide_targets(problem.col_targets(), a.transpose() * next_u, "column");
  return {std::move(next_u), std::move(next_v)};
}

double marginal_residual(const ScalingProblem& problem, const Eigen::MatrixXd& scaled) {
  return std::max(worst_relative(scaled.rowwise().sum(), problem.row_targets()),
                  worst_relative(scaled.colwise().sum().transpose(), problem.col_targets()));
}

ScaledMatrix scaled_matrix(const ScalingProblem& problem, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v) {
  require_shape(problem, u, v);
  ScaledMatrix out;
  out.matrix = u.asDiagonal() * problem.matrix() * v.asDiagonal();
  out.marginal_residual = marginal_residual(problem, out.matrix);
  return out;
}

ScalingSolution sk_solve(const ScalingProblem& problem, const SKOptions& options) {
  if (options.max_iterations < 1 || !(options.tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid SK options");
  }
  const auto& a = problem.matrix();
  const auto& r = problem.row_targets();
  const auto& c = problem.col_targets();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (a.row(i).sum() == 0.0) {
      throw Error(ErrorCode::DivisionByZero,
                  "row '" + problem.row_labels()[static_cast<Index>(i)] + "' is empty");
    }
  }
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (a.col(j).sum() == 0.0) {
      throw Error(ErrorCode::DivisionByZero,
                  "column '" + problem.col_labels()[static_cast<Index>(j)] + "' is empty");
    }
  }

  ScalingSolution solution;
  solution.row_labels = problem.row_labels();
  solution.col_labels = problem.col_labels();
  solution.total_support_suspect = !validate(problem).has_total_support;

  // The simultaneous map flips the common scale of (u, v) every step; fixing
  // the total mass of B after each step removes that mode, as the mean
  // normalization does for Fitness-Complexity.
  const bool jacobi = options.schedule == Schedule::jacobi;
  DriftMonitor drift;
  Eigen::VectorXd log_u = Eigen::VectorXd::Zero(a.rows());
  Eigen::VectorXd log_v = Eigen::VectorXd::Zero(a.cols());
  double residual = std::numeric_limits<double>::infinity();
  Index iteration = 0;

  if (options.log_domain) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd log_a = a.unaryExpr([&](double x) { return x > 0.0 ? std::log(x) : neg_inf; });
    const Eigen::MatrixXd log_at = log_a.transpose();
    const Eigen::VectorXd log_r = r.array().log();
    const Eigen::VectorXd log_c = c.array().log();
    const double log_total = std::log(r.sum());
    while (iteration < options.max_iterations) {
      ++iteration;
      const Eigen::VectorXd previous_u = log_u;
      log_u = log_r - log_row_sums(log_a, log_v);
      log_v = log_c - log_row_sums(log_at, jacobi ? previous_u : log_u);
      if (jacobi) {
        const double shift = 0.5 * (log_total - log_mass(log_u + log_row_sums(log_a, log_v)));
        log_u.array() += shift;
        log_v.array() += shift;
      }
      const Eigen::VectorXd row_sums = (log_u + log_row_sums(log_a, log_v)).array().exp();
      const Eigen::VectorXd col_sums = (log_v + log_row_sums(log_at, log_u)).array().exp();
      residual = std::max(worst_relative(row_sums, r), worst_relative(col_sums, c));
      if (residual < options.tolerance) {
        solution.converged = true;
        break;
      }
      if (solution.total_support_suspect && drift.update(iteration, log_u, log_v)) break;
    }
  } else {
    Eigen::VectorXd u = Eigen::VectorXd::Ones(a.rows());
    Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols());
    while (iteration < options.max_iterations) {
      ++iteration;
      const Eigen::VectorXd previous_u = u;
      u = r.array() / (a * v).array();
      v = c.array() / (a.transpose() * (jacobi ? previous_u : u)).array();
      if (jacobi) {
        const double factor = std::sqrt(r.sum() / u.dot(a * v));
        u *= factor;
        v *= factor;
      }
      if (!u.allFinite() || !v.allFinite() || (u.array() <= 0.0).any() ||
          (v.array() <= 0.0).any()) {
        // Left the double range; log_u and log_v still hold the last
        // representable iterate.
        break;
      }
      log_u = u.array().log();
      log_v = v.array().log();
      const Eigen::VectorXd row_sums = u.cwiseProduct(a * v);
      const Eigen::VectorXd col_sums = v.cwiseProduct(a.transpose() * u);
      residual = std::max(worst_relative(row_sums, r), worst_relative(col_sums, c));
      if (residual < options.tolerance) {
        solution.converged = true;
        break;
      }
      if (solution.total_support_suspect && drift.update(iteration, log_u, log_v)) break;
    }
  }

  solution.log_u = log_u;
  solution.log_v = log_v;
  solution.u = log_u.array().exp();
  solution.v = log_v.array().exp();
  solution.iterations = iteration;
  solution.marginal_residual = residual;
  return solution;
}

}  // namespace fitsink
