#include "fitsink/barrier.hpp"

#include <cmath>

namespace fitsink {
namespace {

void require_shape(const ScalingProblem& problem, const PotentialPoint& point) {
  if (point.rows() != problem.rows() || point.cols() != problem.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "potential point does not match the problem shape");
  }
}

// B_ij = exp(phi_i + phi_j) A_ij; summing exponents keeps B exact under the
// rescaling symmetry.
Eigen::MatrixXd scaled(const ScalingProblem& problem, const PotentialPoint& point) {
  const auto& a = problem.matrix();
  const auto log_x = point.log_x();
  const auto log_y = point.log_y();
  Eigen::MatrixXd b(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      b(i, j) = a(i, j) == 0.0 ? 0.0 : a(i, j) * std::exp(log_x(i) + log_y(j));
    }
  }
  return b;
}

}  // namespace

PotentialPoint::PotentialPoint(Eigen::VectorXd phi, Index rows) : phi_(std::move(phi)), rows_(rows) {
  if (rows_ < 1 || static_cast<Index>(phi_.size()) <= rows_) {
    throw Error(ErrorCode::DimensionMismatch, "potential point needs rows and columns");
  }
  if (!phi_.allFinite()) {
    throw Error(ErrorCode::NonPositiveInput, "potential coordinates must be finite");
  }
}

PotentialPoint PotentialPoint::from_scaling(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (!((x.array() > 0.0).all() && (y.array() > 0.0).all())) {
    throw Error(ErrorCode::NonPositiveInput, "x and y must be strictly positive");
  }
  return from_logs(x.array().log(), y.array().log());
}

PotentialPoint PotentialPoint::from_logs(const Eigen::VectorXd& log_x, const Eigen::VectorXd& log_y) {
  Eigen::VectorXd phi(log_x.size() + log_y.size());
  phi << log_x, log_y;
  return PotentialPoint(std::move(phi), static_cast<Index>(log_x.size()));
}

PotentialPoint PotentialPoint::rescaled(double alpha) const {
  if (!(alpha > 0.0)) throw Error(ErrorCode::NonPositiveInput, "alpha must be positive");
  const double shift = std::log(alpha);
  Eigen::VectorXd phi = phi_;
  phi.head(static_cast<Eigen::Index>(rows_)).array() -= shift;
  phi.tail(static_cast<Eigen::Index>(cols())).array() += shift;
  return PotentialPoint(std::move(phi), rows_);
}

double barrier_value(const ScalingProblem& problem, const PotentialPoint& point) {
  require_shape(problem, point);
  return scaled(problem, point).sum() - problem.row_targets().dot(point.log_x()) -
         problem.col_targets().dot(point.log_y());
}

Eigen::VectorXd barrier_gradient(const ScalingProblem& problem, const PotentialPoint& point) {
  require_shape(problem, point);
  const Eigen::MatrixXd b = scaled(problem, point);
  Eigen::VectorXd grad(point.phi().size());
  grad << b.rowwise().sum() - problem.row_targets(),
      b.colwise().sum().transpose() - problem.col_targets();
  return grad;
}

BarrierHessian barrier_hessian(const ScalingProblem& problem, const PotentialPoint& point) {
  require_shape(problem, point);
  const Eigen::MatrixXd b = scaled(problem, point);
  const auto n = b.rows();
  const auto m = b.cols();

  BarrierHessian out;
  out.matrix = Eigen::MatrixXd::Zero(n + m, n + m);
  out.matrix.topRightCorner(n, m) = b;
  out.matrix.bottomLeftCorner(m, n) = b.transpose();
  out.matrix.diagonal() << b.rowwise().sum(), b.colwise().sum().transpose();

  Eigen::VectorXd grad(n + m);
  grad << b.rowwise().sum() - problem.row_targets(),
      b.colwise().sum().transpose() - problem.col_targets();
  out.gradient_norm = grad.lpNorm<Eigen::Infinity>();
  out.not_stationary = out.gradient_norm > kStationarityTolerance;
  return out;
}

StabilityReport stability_report(const ScalingProblem& problem, const PotentialPoint& point) {
  const auto hessian = barrier_hessian(problem, point);
  const Eigen::MatrixXd& h = hessian.matrix;
  const auto n = static_cast<Eigen::Index>(point.rows());
  const auto size = h.rows();

  StabilityReport report;
  report.gradient_norm = hessian.gradient_norm;
  report.not_stationary = hessian.not_stationary;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();

  Eigen::VectorXd w(size);
  w.head(n).setOnes();
  w.tail(size - n).setConstant(-1.0);
  report.null_direction_residual = (h * w).lpNorm<Eigen::Infinity>();

  const double slack = 1e-10 * h.cwiseAbs().rowwise().sum().maxCoeff();
  report.diagonally_dominant = true;
  for (Eigen::Index i = 0; i < size; ++i) {
    const double off = h.row(i).cwiseAbs().sum() - std::abs(h(i, i));
    if (std::abs(h(i, i)) + slack < off) report.diagonally_dominant = false;
  }
  return report;
}

}  // namespace fitsink
