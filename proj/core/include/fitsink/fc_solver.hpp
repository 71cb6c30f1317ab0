#pragma once

#include <utility>

#include "fitsink/core_model.hpp"

namespace fitsink {

struct FCOptions {
  Schedule schedule = Schedule::jacobi;
  Index max_iterations = 100000;
  // Bound on the lagged change of ln F and ln Q.
  double value_tolerance = 1e-13;
  // Consecutive iterations over which the F and Q orderings must not change.
  Index rank_window = 10;
  // Scores below this are set to zero and reported as zero-limit entries.
  double zero_floor = 1e-30;
};

/// One Fitness-Complexity update followed by mean normalization.
///
/// F~_c = sum_p M_cp Q_p and Q~_p = 1 / sum_c M_cp / F_c. With the Jacobi
/// schedule both use the incoming (F, Q); with Gauss-Seidel Q~ uses the
/// freshly normalized F. Throws NonPositiveInput for non-positive scores.
std::pair<Eigen::VectorXd, Eigen::VectorXd> fc_step(const BipartiteMatrix& matrix,
                                                    const Eigen::VectorXd& fitness,
                                                    const Eigen::VectorXd& complexity,
                                                    Schedule schedule);

/// Iterates fc_step from F = Q = 1.
///
/// Convergence requires both
///   (a) max |ln X(n) - ln X(n-k)| < value_tolerance for X in {F, Q},
///       with k = 2 under Jacobi (even and odd iterates form separate
///       chains) and k = 1 under Gauss-Seidel, and
///   (b) unchanged F and Q orderings for rank_window iterations.
/// Entries that collapse toward zero are excluded from (a) and reported in
/// zero_limit_rows / zero_limit_cols. A collapse is recognised either when
/// the score drops below zero_floor or, at power-of-two checkpoints, when
/// the score is under 1% of the maximum and keeps losing a steady amount of
/// log-mass per doubling of the iteration count (power-law decay, which
/// never reaches the floor in practice).
///
/// Exhausting max_iterations is not an exception: the result comes back with
/// converged == false. Throws EmptyMatrix if a row or column is empty.
FCResult fc_solve(const BipartiteMatrix& matrix, const FCOptions& options = {});

/// Largest relative change of any F_c or Q_p under one normalized Jacobi
/// step; zero exactly at a normalized fixed point.
double fc_residual(const BipartiteMatrix& matrix, const Eigen::VectorXd& fitness,
                   const Eigen::VectorXd& complexity);

}  // namespace fitsink
