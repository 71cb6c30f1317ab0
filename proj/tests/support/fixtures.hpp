#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fitsink/core_model.hpp"

namespace fitsink::test {

// 3x3 pattern with one missing corner: rows (1,1,1),(1,1,1),(1,1,0).
BipartiteMatrix mstar();

// Rows (1,1),(1,0): support without total support.
BipartiteMatrix degenerate_2x2();

BipartiteMatrix all_ones(Index rows, Index cols);

// Fixed point of the normalized FC map on mstar().
inline const Eigen::Vector3d kFStar{1.2, 1.2, 0.6};
inline const Eigen::Vector3d kQStar{0.75, 0.75, 1.5};
// One scaling solution for mstar() with unit targets (any u*b, v/b also solves).
inline const Eigen::Vector3d kUStar{0.5, 0.5, 1.0};
inline const Eigen::Vector3d kVStar{0.5, 0.5, 1.0};

Eigen::Matrix3d mstar_scaled();

// Random binary matrices with 2..max_rows rows, 2..max_cols columns, no
// empty lines and total support under default targets. Deterministic in seed.
std::vector<BipartiteMatrix> random_total_support(std::size_t count, std::uint64_t seed,
                                                  Index max_rows = 8, Index max_cols = 6);

// Random positive matrix with random balanced positive targets.
ScalingProblem random_positive_problem(Index rows, Index cols, std::uint64_t seed,
                                       double low = 0.1, double high = 2.0);

// Integer ranks (1 = first) from the order induced by the values.
std::vector<Index> rank_vector(const Eigen::VectorXd& values, const Labels& labels,
                               bool descending);

}  // namespace fitsink::test
