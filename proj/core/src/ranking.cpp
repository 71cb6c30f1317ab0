#include "fitsink/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fitsink {
namespace {

bool tied(double group_start, double value, double tolerance) {
  const double scale = std::max(std::abs(group_start), std::abs(value));
  return std::abs(value - group_start) <= tolerance * scale;
}

// Ascending sort, returned as consecutive tie groups.
std::vector<std::vector<Index>> tie_groups(const Eigen::VectorXd& values, double tolerance) {
  std::vector<Index> order(static_cast<Index>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return values(static_cast<Eigen::Index>(a)) < values(static_cast<Eigen::Index>(b));
  });
  std::vector<std::vector<Index>> groups;
  for (Index k : order) {
    const double v = values(static_cast<Eigen::Index>(k));
    if (groups.empty() ||
        !tied(values(static_cast<Eigen::Index>(groups.back().front())), v, tolerance)) {
      groups.push_back({k});
    } else {
      groups.back().push_back(k);
    }
  }
  return groups;
}

}  // namespace

std::vector<Index> order_by(const Eigen::VectorXd& values, const Labels& labels, bool descending,
                            double tie_tolerance) {
  if (!labels.empty() && labels.size() != static_cast<Index>(values.size())) {
    throw Error(ErrorCode::DimensionMismatch, "labels and values differ in length");
  }
  auto groups = tie_groups(values, tie_tolerance);
  if (descending) std::reverse(groups.begin(), groups.end());
  std::vector<Index> out;
  out.reserve(static_cast<Index>(values.size()));
  for (auto& group : groups) {
    std::sort(group.begin(), group.end(), [&](Index a, Index b) {
      if (!labels.empty() && labels[a] != labels[b]) return labels[a] < labels[b];
      return a < b;
    });
    out.insert(out.end(), group.begin(), group.end());
  }
  return out;
}

Eigen::VectorXd average_ranks(const Eigen::VectorXd& values, double tie_tolerance) {
  Eigen::VectorXd ranks(values.size());
  double position = 1.0;
  for (const auto& group : tie_groups(values, tie_tolerance)) {
    const double size = static_cast<double>(group.size());
    const double rank = position + (size - 1.0) / 2.0;
    for (Index k : group) ranks(static_cast<Eigen::Index>(k)) = rank;
    position += size;
  }
  return ranks;
}

std::optional<double> pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "correlation inputs differ in length");
  }
  if (a.size() < 2) return std::nullopt;
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double saa = (da * da).sum();
  const double sbb = (db * db).sum();
  // Zero variance up to rounding of the mean.
  const double floor_a = 1e-28 * std::max(1.0, a.squaredNorm());
  const double floor_b = 1e-28 * std::max(1.0, b.squaredNorm());
  if (saa <= floor_a || sbb <= floor_b) return std::nullopt;
  return std::clamp((da * db).sum() / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::optional<double> spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                               double tie_tolerance) {
  return pearson(average_ranks(a, tie_tolerance), average_ranks(b, tie_tolerance));
}

}  // namespace fitsink
