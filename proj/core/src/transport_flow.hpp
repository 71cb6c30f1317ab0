#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fitsink::detail {

struct TransportFlow {
  double total = 0.0;      // value of the maximum flow
  double required = 0.0;   // sum of row targets
  bool feasible = false;   // total reaches required within relative 1e-12
  Eigen::MatrixXd flow;    // per-entry flow, zero where A is zero
};

// Maximum flow on source -> rows (cap r) -> cols (cap inf where A > 0)
// -> sink (cap c), computed with Dinic's algorithm in double precision.
TransportFlow max_transport_flow(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& row_targets,
                                 const Eigen::VectorXd& col_targets);

// True iff every positive entry of A lies on a cycle of the residual graph
// of a feasible flow, i.e. can carry positive mass in some feasible B.
bool all_entries_on_residual_cycles(const Eigen::MatrixXd& matrix, const TransportFlow& flow);

}  // namespace fitsink::detail
