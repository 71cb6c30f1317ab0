#pragma once

#include <utility>

#include "fitsink/core_model.hpp"

namespace fitsink {

struct SKOptions {
  double tolerance = 1e-13;
  Index max_iterations = 100000;
  // Carry ln u, ln v and use max-shifted exponential sums.
  bool log_domain = false;
  // gauss_seidel: v is updated from the new u (default);
  // jacobi: v is updated from the previous u, then u and v are rescaled so
  // that B carries the total target mass.
  Schedule schedule = Schedule::gauss_seidel;
};

struct ScalingSolution {
  Labels row_labels;
  Labels col_labels;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  // Always populated; the only trustworthy representation when u or v
  // leave the double range.
  Eigen::VectorXd log_u;
  Eigen::VectorXd log_v;
  Index iterations = 0;
  bool converged = false;
  double marginal_residual = 0.0;
  // Set when the pattern lacks total support, so u or v must drift to 0 or
  // infinity while B approaches the feasible limit.
  bool total_support_suspect = false;
};

/// One sequential Sinkhorn-Knopp update: u' = r / (A v), v' = c / (A^T u').
/// Throws DivisionByZero if a row or column sum of the scaled matrix is zero.
std::pair<Eigen::VectorXd, Eigen::VectorXd> sk_step(const ScalingProblem& problem,
                                                    const Eigen::VectorXd& u,
                                                    const Eigen::VectorXd& v);

/// Iterates from u = v = 1 until marginal_residual < tolerance.
///
/// Patterns without total support are detected up front by max-flow. For
/// those the iteration still runs (B tends to the feasible limit) but stops
/// early, with converged == false, once the spread of ln u and ln v has grown
/// across three consecutive power-of-two checkpoints or exceeded ln 1e12.
ScalingSolution sk_solve(const ScalingProblem& problem, const SKOptions& options = {});

struct ScaledMatrix {
  Eigen::MatrixXd matrix;
  double marginal_residual = 0.0;
};

/// B_ij = u_i A_ij v_j and its worst relative marginal violation,
/// max(max_i |sum_j B_ij - r_i| / r_i, max_j |sum_i B_ij - c_j| / c_j).
ScaledMatrix scaled_matrix(const ScalingProblem& problem, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v);

double marginal_residual(const ScalingProblem& problem, const Eigen::MatrixXd& scaled);

}  // namespace fitsink
