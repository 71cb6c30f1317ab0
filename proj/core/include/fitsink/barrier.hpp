#pragma once

#include "fitsink/core_model.hpp"

namespace fitsink {

/// Point of the barrier potential in log coordinates:
/// phi = (ln x_1..ln x_n, ln y_1..ln y_m).
class PotentialPoint {
 public:
  PotentialPoint(Eigen::VectorXd phi, Index rows);

  static PotentialPoint from_scaling(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
  static PotentialPoint from_logs(const Eigen::VectorXd& log_x, const Eigen::VectorXd& log_y);

  const Eigen::VectorXd& phi() const noexcept { return phi_; }
  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return static_cast<Index>(phi_.size()) - rows_; }

  auto log_x() const { return phi_.head(static_cast<Eigen::Index>(rows_)); }
  auto log_y() const { return phi_.tail(static_cast<Eigen::Index>(cols())); }
  Eigen::VectorXd x() const { return log_x().array().exp(); }
  Eigen::VectorXd y() const { return log_y().array().exp(); }

  /// (x, y) -> (x / alpha, y * alpha), the symmetry of the potential.
  PotentialPoint rescaled(double alpha) const;

 private:
  Eigen::VectorXd phi_;
  Index rows_;
};

// Gradient infinity-norm above which a point is not treated as stationary.
inline constexpr double kStationarityTolerance = 1e-8;

/// g = sum_ij x_i A_ij y_j - sum_i r_i ln x_i - sum_j c_j ln y_j.
double barrier_value(const ScalingProblem& problem, const PotentialPoint& point);

/// dg/dphi: (x_i (A y)_i - r_i) for rows, then (y_j (A^T x)_j - c_j) for columns.
Eigen::VectorXd barrier_gradient(const ScalingProblem& problem, const PotentialPoint& point);

struct BarrierHessian {
  Eigen::MatrixXd matrix;
  double gradient_norm = 0.0;
  bool not_stationary = false;
};

/// Second derivatives of g in phi. Diagonal: x_i (A y)_i and y_j (A^T x)_j,
/// which equal the targets d = (r, c) at a stationary point; off-diagonal
/// row/column blocks: x_i A_ij y_j and its transpose. not_stationary is set
/// when the gradient infinity-norm exceeds kStationarityTolerance.
BarrierHessian barrier_hessian(const ScalingProblem& problem, const PotentialPoint& point);

struct StabilityReport {
  double gradient_norm = 0.0;
  double min_eigenvalue = 0.0;
  // ||H w||_inf for w = (+1 on rows, -1 on columns), the rescaling direction.
  double null_direction_residual = 0.0;
  bool diagonally_dominant = false;
  bool not_stationary = false;
};

StabilityReport stability_report(const ScalingProblem& problem, const PotentialPoint& point);

}  // namespace fitsink
