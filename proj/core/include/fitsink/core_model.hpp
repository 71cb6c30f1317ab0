#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fitsink/error.hpp"

namespace fitsink {

using Labels = std::vector<std::string>;
using Index = std::size_t;

/// Binary country x product incidence matrix with labelled axes.
///
/// Entries are stored as doubles restricted to {0, 1} so solvers can use
/// dense BLAS-style products directly. The constructor enforces the
/// invariants (binary entries, unique labels, at least one row and column)
/// and the object is immutable afterwards.
class BipartiteMatrix {
 public:
  BipartiteMatrix(Labels row_labels, Labels col_labels, Eigen::MatrixXd entries);

  /// Builds a matrix from nested 0/1 rows with labels c1..cn and p1..pm.
  static BipartiteMatrix from_rows(const std::vector<std::vector<int>>& rows);

  Index rows() const noexcept { return static_cast<Index>(entries_.rows()); }
  Index cols() const noexcept { return static_cast<Index>(entries_.cols()); }

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  const Labels& row_labels() const noexcept { return row_labels_; }
  const Labels& col_labels() const noexcept { return col_labels_; }

  bool at(Index row, Index col) const {
    return entries_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) != 0.0;
  }

  // d_c, the number of products each country exports.
  Eigen::VectorXd diversification() const { return entries_.rowwise().sum(); }
  // k_p, the number of exporters of each product.
  Eigen::VectorXd ubiquity() const { return entries_.colwise().sum().transpose(); }

  std::optional<Index> row_index(const std::string& label) const;
  std::optional<Index> col_index(const std::string& label) const;

  /// Copy with rows and columns permuted: output row k is input row row_perm[k].
  BipartiteMatrix permuted(const std::vector<Index>& row_perm,
                           const std::vector<Index>& col_perm) const;

  /// Copy with an extra row appended.
  BipartiteMatrix with_row(const std::string& label, const Eigen::RowVectorXd& row) const;

  friend bool operator==(const BipartiteMatrix& a, const BipartiteMatrix& b);

 private:
  Labels row_labels_;
  Labels col_labels_;
  Eigen::MatrixXd entries_;
};

/// Non-negative matrix with positive, balanced row and column targets.
class ScalingProblem {
 public:
  // Throws InvalidArgument if any invariant fails (negative entries,
  // non-positive targets, or |sum r - sum c| > 1e-12 * sum r).
  ScalingProblem(Eigen::MatrixXd matrix, Eigen::VectorXd row_targets,
                 Eigen::VectorXd col_targets, Labels row_labels = {},
                 Labels col_labels = {});

  /// Scaling problem over a binary matrix with default_targets marginals.
  static ScalingProblem from_bipartite(const BipartiteMatrix& matrix);

  Index rows() const noexcept { return static_cast<Index>(matrix_.rows()); }
  Index cols() const noexcept { return static_cast<Index>(matrix_.cols()); }

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Eigen::VectorXd& row_targets() const noexcept { return row_targets_; }
  const Eigen::VectorXd& col_targets() const noexcept { return col_targets_; }
  const Labels& row_labels() const noexcept { return row_labels_; }
  const Labels& col_labels() const noexcept { return col_labels_; }

 private:
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd row_targets_;
  Eigen::VectorXd col_targets_;
  Labels row_labels_;
  Labels col_labels_;
};

inline constexpr double kBalanceTolerance = 1e-12;

struct ValidationReport {
  std::vector<Index> empty_rows;
  std::vector<Index> empty_cols;
  bool has_support = false;
  bool has_total_support = false;
  bool balanced = false;
};

// Support means some non-negative B with the target marginals and the zero
// pattern of A exists; total support means every positive entry of A carries
// positive mass in at least one such B. Both are decided by max-flow.
ValidationReport validate(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& row_targets,
                          const Eigen::VectorXd& col_targets);
ValidationReport validate(const ScalingProblem& problem);
ValidationReport validate(const BipartiteMatrix& matrix);

struct Targets {
  Eigen::VectorXd rows;
  Eigen::VectorXd cols;
};

/// r_i = 1 and c_j = n/m, so both sum to n.
Targets default_targets(Index rows, Index cols);

/// Perfectly nested test matrix (row c exports products 1..ceil(m*c/n)),
/// optionally perturbed: each cell flips with probability
/// noise * exp(-distance to the nestedness border). Deterministic in seed.
BipartiteMatrix generate_nested(Index rows, Index cols, double noise, std::uint64_t seed);

struct DropEmptyResult {
  BipartiteMatrix matrix;
  Labels removed_rows;
  Labels removed_cols;
};

/// Removes all-zero rows and columns. Throws EmptyMatrix if nothing remains.
DropEmptyResult drop_empty(const BipartiteMatrix& matrix);

enum class Schedule { jacobi, gauss_seidel };

enum class GaugeKind { normalization, dummy_country, reference_row, reference_col };

/// Choice of representative under the (F, Q) -> (aF, aQ) symmetry.
struct GaugeSpec {
  GaugeKind kind = GaugeKind::normalization;
  std::string label;  // used by reference_row / reference_col
  double target_value = 1.0;

  friend bool operator==(const GaugeSpec&, const GaugeSpec&) = default;
};

struct FCResult {
  Labels row_labels;
  Labels col_labels;
  Eigen::VectorXd fitness;
  Eigen::VectorXd complexity;
  Index iterations = 0;
  bool converged = false;
  // Fixed-point defect at termination (see fc_residual).
  double residual = 0.0;
  // max |ln F(n) - ln F(n-1)| at termination; for the Jacobi schedule this
  // is the gap between the even and odd chains.
  double chain_gap = 0.0;
  // Rows (columns) whose score collapses toward zero.
  std::vector<Index> zero_limit_rows;
  std::vector<Index> zero_limit_cols;
  GaugeSpec gauge;
};

}  // namespace fitsink
