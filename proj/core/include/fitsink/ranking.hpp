#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fitsink/core_model.hpp"

namespace fitsink {

// Relative gap below which two scores count as tied when ranking.
inline constexpr double kRankTieTolerance = 1e-9;

/// Indices sorted by value; values within the relative tie tolerance of a
/// group's first member are tied and ordered by label (then index).
std::vector<Index> order_by(const Eigen::VectorXd& values, const Labels& labels, bool descending,
                            double tie_tolerance = kRankTieTolerance);

/// 1-based average ranks in ascending order, ties grouped as in order_by.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& values,
                              double tie_tolerance = kRankTieTolerance);

/// nullopt when either input has zero variance.
std::optional<double> pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
std::optional<double> spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                               double tie_tolerance = kRankTieTolerance);

}  // namespace fitsink
