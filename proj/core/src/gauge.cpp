#include "fitsink/gauge.hpp"

#include <cmath>

#include "fitsink/ranking.hpp"

namespace fitsink {
namespace {

constexpr std::string_view kReferenceRow = "reference-row:";
constexpr std::string_view kReferenceCol = "reference-col:";

void require_positive_target(double target) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw Error(ErrorCode::InvalidArgument, "gauge target value must be positive");
  }
}

std::optional<Index> find(const Labels& labels, const std::string& label) {
  for (Index k = 0; k < labels.size(); ++k) {
    if (labels[k] == label) return k;
  }
  return std::nullopt;
}

FCResult rescaled_result(FCResult result, double alpha, const GaugeSpec& gauge) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::NonPositiveInput, "gauge reference score is not positive");
  }
  result.fitness *= alpha;
  result.complexity *= alpha;
  result.gauge = gauge;
  return result;
}

std::string unique_dummy_label(const BipartiteMatrix& matrix) {
  std::string label(kDummyCountryLabel);
  while (matrix.row_index(label)) label += "_";
  return label;
}

// Best uniform factor for ratios w_k toward 1 in the max-norm.
std::pair<double, double> align(const Eigen::VectorXd& ratios) {
  const double lo = ratios.minCoeff();
  const double hi = ratios.maxCoeff();
  return {2.0 / (lo + hi), (hi - lo) / (hi + lo)};
}

}  // namespace

GaugeSpec parse_gauge(std::string_view text, double target_value) {
  require_positive_target(target_value);
  GaugeSpec gauge;
  gauge.target_value = target_value;
  if (text == "normalization") {
    gauge.kind = GaugeKind::normalization;
  } else if (text == "dummy" || text == "dummy_country") {
    gauge.kind = GaugeKind::dummy_country;
  } else if (text.starts_with(kReferenceRow) && text.size() > kReferenceRow.size()) {
    gauge.kind = GaugeKind::reference_row;
    gauge.label = std::string(text.substr(kReferenceRow.size()));
  } else if (text.starts_with(kReferenceCol) && text.size() > kReferenceCol.size()) {
    gauge.kind = GaugeKind::reference_col;
    gauge.label = std::string(text.substr(kReferenceCol.size()));
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown gauge '" + std::string(text) + "'");
  }
  return gauge;
}

std::string format_gauge(const GaugeSpec& gauge) {
  switch (gauge.kind) {
    case GaugeKind::normalization: return "normalization";
    case GaugeKind::dummy_country: return "dummy";
    case GaugeKind::reference_row: return std::string(kReferenceRow) + gauge.label;
    case GaugeKind::reference_col: return std::string(kReferenceCol) + gauge.label;
  }
  return "normalization";
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> rescale(const Eigen::VectorXd& fitness,
                                                    const Eigen::VectorXd& complexity,
                                                    double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::NonPositiveInput, "alpha must be positive");
  }
  if (!((fitness.array() > 0.0).all() && (complexity.array() > 0.0).all())) {
    throw Error(ErrorCode::NonPositiveInput, "fitness and complexity must be positive");
  }
  return {alpha * fitness, alpha * complexity};
}

FCResult apply_gauge(const FCResult& result, const BipartiteMatrix& matrix, const GaugeSpec& gauge,
                     const FCOptions& options) {
  require_positive_target(gauge.target_value);
  if (result.row_labels != matrix.row_labels() || result.col_labels != matrix.col_labels()) {
    throw Error(ErrorCode::DimensionMismatch, "result labels do not match the matrix");
  }
  switch (gauge.kind) {
    case GaugeKind::normalization:
      return rescaled_result(result, gauge.target_value / result.fitness.mean(), gauge);
    case GaugeKind::reference_row: {
      auto index = find(result.row_labels, gauge.label);
      if (!index) throw Error(ErrorCode::UnknownLabel, "no country '" + gauge.label + "'");
      return rescaled_result(
          result, gauge.target_value / result.fitness(static_cast<Eigen::Index>(*index)), gauge);
    }
    case GaugeKind::reference_col: {
      auto index = find(result.col_labels, gauge.label);
      if (!index) throw Error(ErrorCode::UnknownLabel, "no product '" + gauge.label + "'");
      return rescaled_result(
          result, gauge.target_value / result.complexity(static_cast<Eigen::Index>(*index)),
          gauge);
    }
    case GaugeKind::dummy_country: {
      const auto augmented = matrix.with_row(unique_dummy_label(matrix),
                                             Eigen::RowVectorXd::Ones(matrix.entries().cols()));
      FCResult solved = fc_solve(augmented, options);
      const auto dummy = static_cast<Eigen::Index>(matrix.rows());
      const double alpha = gauge.target_value / solved.fitness(dummy);
      FCResult out = rescaled_result(std::move(solved), alpha, gauge);
      out.fitness.conservativeResize(dummy);
      out.row_labels.pop_back();
      std::erase(out.zero_limit_rows, static_cast<Index>(dummy));
      return out;
    }
  }
  return result;
}

EquivalenceReport equivalence_report(const FCResult& fc, const ScalingSolution& sk) {
  if (fc.fitness.size() != sk.log_u.size() || fc.complexity.size() != sk.log_v.size()) {
    throw Error(ErrorCode::DimensionMismatch, "FC and SK solutions have different shapes");
  }
  std::vector<Eigen::Index> rows;
  for (Eigen::Index c = 0; c < fc.fitness.size(); ++c) {
    if (fc.fitness(c) > 0.0) rows.push_back(c);
  }
  std::vector<Eigen::Index> cols;
  for (Eigen::Index p = 0; p < fc.complexity.size(); ++p) {
    if (fc.complexity(p) > 0.0) cols.push_back(p);
  }
  if (rows.empty() || cols.empty()) {
    throw Error(ErrorCode::NonPositiveInput, "no positive scores to compare");
  }

  const Eigen::VectorXd fitness = fc.fitness(rows);
  const Eigen::VectorXd log_u = sk.log_u(rows);
  const Eigen::VectorXd complexity = fc.complexity(cols);
  const Eigen::VectorXd log_v = sk.log_v(cols);

  EquivalenceReport report;
  const auto [beta, gap] = align((fitness.array().log() + log_u.array()).exp().matrix());
  report.gauge_beta = beta;
  report.max_relative_gap_after_gauge = gap;

  const Eigen::VectorXd inv_u = (-log_u.array()).exp();
  report.spearman_F_vs_inv_u = spearman(fitness, inv_u);
  report.pearson_logF_vs_neg_logu = pearson(fitness.array().log().matrix(), -log_u);
  report.pearson_F_vs_u = pearson(fitness, log_u.array().exp().matrix());

  const Eigen::VectorXd v = log_v.array().exp();
  const double gamma = align(complexity.cwiseQuotient(v)).first;
  report.pearson_Q_vs_v_after_gauge = pearson(complexity, gamma * v);

  report.constant_input = !report.spearman_F_vs_inv_u || !report.pearson_Q_vs_v_after_gauge;
  return report;
}

}  // namespace fitsink
