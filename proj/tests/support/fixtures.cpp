#include "support/fixtures.hpp"

#include <random>

#include "fitsink/ranking.hpp"

namespace fitsink::test {

BipartiteMatrix mstar() { return BipartiteMatrix::from_rows({{1, 1, 1}, {1, 1, 1}, {1, 1, 0}}); }

BipartiteMatrix degenerate_2x2() { return BipartiteMatrix::from_rows({{1, 1}, {1, 0}}); }

BipartiteMatrix all_ones(Index rows, Index cols) {
  return BipartiteMatrix::from_rows(
      std::vector<std::vector<int>>(rows, std::vector<int>(cols, 1)));
}

Eigen::Matrix3d mstar_scaled() {
  Eigen::Matrix3d b;
  b << 0.25, 0.25, 0.5, 0.25, 0.25, 0.5, 0.5, 0.5, 0.0;
  return b;
}

std::vector<BipartiteMatrix> random_total_support(std::size_t count, std::uint64_t seed,
                                                  Index max_rows, Index max_cols) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick_rows(2, max_rows);
  std::uniform_int_distribution<Index> pick_cols(2, max_cols);
  std::uniform_real_distribution<double> pick_density(0.4, 0.9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<BipartiteMatrix> out;
  while (out.size() < count) {
    const Index n = pick_rows(rng);
    const Index m = pick_cols(rng);
    const double density = pick_density(rng);
    std::vector<std::vector<int>> rows(n, std::vector<int>(m, 0));
    for (auto& row : rows) {
      for (auto& cell : row) cell = unit(rng) < density ? 1 : 0;
    }
    const auto candidate = BipartiteMatrix::from_rows(rows);
    const auto report = validate(candidate);
    if (!report.empty_rows.empty() || !report.empty_cols.empty() || !report.has_total_support) {
      continue;
    }
    out.push_back(candidate);
  }
  return out;
}

ScalingProblem random_positive_problem(Index rows, Index cols, std::uint64_t seed, double low,
                                       double high) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(low, high);
  std::uniform_real_distribution<double> target(0.5, 2.0);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = entry(rng);
  }
  Eigen::VectorXd r(rows);
  Eigen::VectorXd c(cols);
  for (auto& x : r) x = target(rng);
  for (auto& x : c) x = target(rng);
  c *= r.sum() / c.sum();
  // Rebalance exactly: push the rounding residue into the last column target.
  c[c.size() - 1] += r.sum() - c.sum();
  return ScalingProblem(a, r, c);
}

std::vector<Index> rank_vector(const Eigen::VectorXd& values, const Labels& labels,
                               bool descending) {
  const auto order = order_by(values, labels, descending);
  std::vector<Index> rank(order.size());
  for (Index k = 0; k < order.size(); ++k) rank[order[k]] = k + 1;
  return rank;
}

}  // namespace fitsink::test
