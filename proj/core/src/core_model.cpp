#include "fitsink/core_model.hpp"

#include <cmath>
#include <random>
#include <unordered_set>

#include "transport_flow.hpp"

namespace fitsink {
namespace {

void check_unique(const Labels& labels, const char* axis) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string("duplicate ") + axis + " label '" + label + "'");
    }
  }
}

Labels numbered(const char* prefix, Index count) {
  Labels labels;
  labels.reserve(count);
  for (Index k = 1; k <= count; ++k) labels.push_back(prefix + std::to_string(k));
  return labels;
}

std::optional<Index> find_label(const Labels& labels, const std::string& label) {
  for (Index k = 0; k < labels.size(); ++k) {
    if (labels[k] == label) return k;
  }
  return std::nullopt;
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

BipartiteMatrix::BipartiteMatrix(Labels row_labels, Labels col_labels, Eigen::MatrixXd entries)
    : row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw Error(ErrorCode::EmptyMatrix, "bipartite matrix needs at least one row and one column");
  }
  if (row_labels_.size() != rows() || col_labels_.size() != cols()) {
    throw Error(ErrorCode::DimensionMismatch, "label count does not match matrix shape");
  }
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      double x = entries_(i, j);
      if (x != 0.0 && x != 1.0) {
        throw Error(ErrorCode::InvalidArgument, "bipartite matrix entries must be 0 or 1");
      }
    }
  }
  check_unique(row_labels_, "row");
  check_unique(col_labels_, "column");
}

BipartiteMatrix BipartiteMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorCode::EmptyMatrix, "bipartite matrix needs at least one row and one column");
  }
  const Index n = rows.size();
  const Index m = rows.front().size();
  Eigen::MatrixXd entries(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Index i = 0; i < n; ++i) {
    if (rows[i].size() != m) throw Error(ErrorCode::DimensionMismatch, "ragged rows");
    for (Index j = 0; j < m; ++j) {
      entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return BipartiteMatrix(numbered("c", n), numbered("p", m), std::move(entries));
}

std::optional<Index> BipartiteMatrix::row_index(const std::string& label) const {
  return find_label(row_labels_, label);
}

std::optional<Index> BipartiteMatrix::col_index(const std::string& label) const {
  return find_label(col_labels_, label);
}

BipartiteMatrix BipartiteMatrix::permuted(const std::vector<Index>& row_perm,
                                          const std::vector<Index>& col_perm) const {
  if (row_perm.size() != rows() || col_perm.size() != cols()) {
    throw Error(ErrorCode::DimensionMismatch, "permutation size does not match matrix shape");
  }
  Eigen::MatrixXd entries(entries_.rows(), entries_.cols());
  Labels rl(rows()), cl(cols());
  for (Index i = 0; i < rows(); ++i) {
    rl[i] = row_labels_.at(row_perm[i]);
    for (Index j = 0; j < cols(); ++j) {
      entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          entries_(static_cast<Eigen::Index>(row_perm[i]), static_cast<Eigen::Index>(col_perm[j]));
    }
  }
  for (Index j = 0; j < cols(); ++j) cl[j] = col_labels_.at(col_perm[j]);
  return BipartiteMatrix(std::move(rl), std::move(cl), std::move(entries));
}

BipartiteMatrix BipartiteMatrix::with_row(const std::string& label,
                                          const Eigen::RowVectorXd& row) const {
  if (static_cast<Index>(row.size()) != cols()) {
    throw Error(ErrorCode::DimensionMismatch, "appended row has wrong length");
  }
  Eigen::MatrixXd entries(entries_.rows() + 1, entries_.cols());
  entries.topRows(entries_.rows()) = entries_;
  entries.bottomRows(1) = row;
  Labels rl = row_labels_;
  rl.push_back(label);
  return BipartiteMatrix(std::move(rl), col_labels_, std::move(entries));
}

bool operator==(const BipartiteMatrix& a, const BipartiteMatrix& b) {
  return a.row_labels_ == b.row_labels_ && a.col_labels_ == b.col_labels_ &&
         a.entries_.rows() == b.entries_.rows() && a.entries_.cols() == b.entries_.cols() &&
         a.entries_ == b.entries_;
}

ScalingProblem::ScalingProblem(Eigen::MatrixXd matrix, Eigen::VectorXd row_targets,
                               Eigen::VectorXd col_targets, Labels row_labels, Labels col_labels)
    : matrix_(std::move(matrix)),
      row_targets_(std::move(row_targets)),
      col_targets_(std::move(col_targets)),
      row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1) {
    throw Error(ErrorCode::EmptyMatrix, "scaling problem needs at least one row and one column");
  }
  if (row_targets_.size() != matrix_.rows() || col_targets_.size() != matrix_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "target lengths do not match matrix shape");
  }
  if ((matrix_.array() < 0.0).any() || !matrix_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "scaling matrix must be finite and non-negative");
  }
  if ((row_targets_.array() <= 0.0).any() || (col_targets_.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "targets must be strictly positive");
  }
  const double total = row_targets_.sum();
  if (std::abs(total - col_targets_.sum()) > kBalanceTolerance * total) {
    throw Error(ErrorCode::InvalidArgument, "row and column targets are not balanced");
  }
  if (row_labels_.empty()) row_labels_ = numbered("r", rows());
  if (col_labels_.empty()) col_labels_ = numbered("k", cols());
  if (row_labels_.size() != rows() || col_labels_.size() != cols()) {
    throw Error(ErrorCode::DimensionMismatch, "label count does not match matrix shape");
  }
  check_unique(row_labels_, "row");
  check_unique(col_labels_, "column");
}

ScalingProblem ScalingProblem::from_bipartite(const BipartiteMatrix& matrix) {
  auto targets = default_targets(matrix.rows(), matrix.cols());
  return ScalingProblem(matrix.entries(), std::move(targets.rows), std::move(targets.cols),
                        matrix.row_labels(), matrix.col_labels());
}

ValidationReport validate(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& row_targets,
                          const Eigen::VectorXd& col_targets) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw Error(ErrorCode::EmptyMatrix, "cannot validate an empty matrix");
  }
  if (row_targets.size() != matrix.rows() || col_targets.size() != matrix.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "target lengths do not match matrix shape");
  }
  ValidationReport report;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    if ((matrix.row(i).array() <= 0.0).all()) report.empty_rows.push_back(static_cast<Index>(i));
  }
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    if ((matrix.col(j).array() <= 0.0).all()) report.empty_cols.push_back(static_cast<Index>(j));
  }
  const double total = row_targets.sum();
  report.balanced = std::abs(total - col_targets.sum()) <= kBalanceTolerance * std::abs(total);
  if (!report.balanced) return report;

  const auto flow = detail::max_transport_flow(matrix, row_targets, col_targets);
  report.has_support = flow.feasible;
  report.has_total_support =
      report.has_support && detail::all_entries_on_residual_cycles(matrix, flow);
  return report;
}

ValidationReport validate(const ScalingProblem& problem) {
  return validate(problem.matrix(), problem.row_targets(), problem.col_targets());
}

ValidationReport validate(const BipartiteMatrix& matrix) {
  auto targets = default_targets(matrix.rows(), matrix.cols());
  return validate(matrix.entries(), targets.rows, targets.cols);
}

Targets default_targets(Index rows, Index cols) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::EmptyMatrix, "default targets need at least one row and one column");
  }
  const auto n = static_cast<Eigen::Index>(rows);
  const auto m = static_cast<Eigen::Index>(cols);
  return {Eigen::VectorXd::Ones(n),
          Eigen::VectorXd::Constant(m, static_cast<double>(rows) / static_cast<double>(cols))};
}

BipartiteMatrix generate_nested(Index rows, Index cols, double noise, std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::EmptyMatrix, "generated matrix needs at least one row and one column");
  }
  if (!(noise >= 0.0 && noise <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd entries(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Index c = 1; c <= rows; ++c) {
    const Index border = (cols * c + rows - 1) / rows;
    for (Index p = 1; p <= cols; ++p) {
      const bool inside = p <= border;
      const double distance =
          inside ? static_cast<double>(border - p) : static_cast<double>(p - border - 1);
      bool value = inside;
      if (noise > 0.0 && unit_uniform(rng) < noise * std::exp(-distance)) value = !value;
      entries(static_cast<Eigen::Index>(c - 1), static_cast<Eigen::Index>(p - 1)) = value ? 1.0 : 0.0;
    }
  }
  return BipartiteMatrix(numbered("c", rows), numbered("p", cols), std::move(entries));
}

DropEmptyResult drop_empty(const BipartiteMatrix& matrix) {
  const auto& entries = matrix.entries();
  std::vector<Eigen::Index> keep_rows, keep_cols;
  Labels removed_rows, removed_cols;
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    if (entries.row(i).sum() > 0.0) {
      keep_rows.push_back(i);
    } else {
      removed_rows.push_back(matrix.row_labels()[static_cast<Index>(i)]);
    }
  }
  for (Eigen::Index j = 0; j < entries.cols(); ++j) {
    if (entries.col(j).sum() > 0.0) {
      keep_cols.push_back(j);
    } else {
      removed_cols.push_back(matrix.col_labels()[static_cast<Index>(j)]);
    }
  }
  if (keep_rows.empty() || keep_cols.empty()) {
    throw Error(ErrorCode::EmptyMatrix, "matrix has no populated cells");
  }
  if (removed_rows.empty() && removed_cols.empty()) return {matrix, {}, {}};

  Eigen::MatrixXd kept = entries(keep_rows, keep_cols);
  Labels rl, cl;
  for (auto i : keep_rows) rl.push_back(matrix.row_labels()[static_cast<Index>(i)]);
  for (auto j : keep_cols) cl.push_back(matrix.col_labels()[static_cast<Index>(j)]);
  return {BipartiteMatrix(std::move(rl), std::move(cl), std::move(kept)), std::move(removed_rows),
          std::move(removed_cols)};
}

}  // namespace fitsink
