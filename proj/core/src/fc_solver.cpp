#include "fitsink/fc_solver.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "fitsink/ranking.hpp"

namespace fitsink {
namespace {

constexpr Index kFirstTrendCheckpoint = 256;
constexpr double kTrendRelativeLevel = 1e-2;
constexpr double kTrendMinDrop = 0.02;
constexpr double kTrendMaxDropRatio = 1.5;
constexpr double kOrderTieTolerance = 1e-12;

void require_shape(const BipartiteMatrix& matrix, const Eigen::VectorXd& fitness,
                   const Eigen::VectorXd& complexity) {
  if (static_cast<Index>(fitness.size()) != matrix.rows() ||
      static_cast<Index>(complexity.size()) != matrix.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "score vectors do not match the matrix shape");
  }
}

void require_positive(const Eigen::VectorXd& fitness, const Eigen::VectorXd& complexity) {
  if (!((fitness.array() > 0.0).all() && (complexity.array() > 0.0).all()) ||
      !fitness.allFinite() || !complexity.allFinite()) {
    throw Error(ErrorCode::NonPositiveInput, "fitness and complexity must be finite and positive");
  }
}

void require_populated(const BipartiteMatrix& matrix) {
  const auto& m = matrix.entries();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m.row(i).sum() == 0.0) {
      throw Error(ErrorCode::EmptyMatrix, "row '" + matrix.row_labels()[static_cast<Index>(i)] +
                                              "' is empty; run drop_empty first");
    }
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (m.col(j).sum() == 0.0) {
      throw Error(ErrorCode::EmptyMatrix, "column '" + matrix.col_labels()[static_cast<Index>(j)] +
                                              "' is empty; run drop_empty first");
    }
  }
}

Eigen::VectorXd normalized(const Eigen::VectorXd& raw) {
  const double mean = raw.mean();
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw Error(ErrorCode::NotConverged, "all scores collapsed to zero");
  }
  return raw / mean;
}

// Harmonic update; a zero-fitness exporter drives the product's complexity
// to zero (the limit of 1 / (... + 1/F) as F -> 0).
Eigen::VectorXd raw_complexity(const Eigen::MatrixXd& m, const Eigen::VectorXd& fitness) {
  Eigen::VectorXd inverse(fitness.size());
  Eigen::VectorXd is_zero(fitness.size());
  for (Eigen::Index c = 0; c < fitness.size(); ++c) {
    const bool zero = fitness(c) <= 0.0;
    inverse(c) = zero ? 0.0 : 1.0 / fitness(c);
    is_zero(c) = zero ? 1.0 : 0.0;
  }
  const Eigen::VectorXd sums = m.transpose() * inverse;
  const Eigen::VectorXd hits = m.transpose() * is_zero;
  Eigen::VectorXd out(m.cols());
  for (Eigen::Index p = 0; p < m.cols(); ++p) out(p) = hits(p) > 0.0 ? 0.0 : 1.0 / sums(p);
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> step_unchecked(const Eigen::MatrixXd& m,
                                                           const Eigen::VectorXd& fitness,
                                                           const Eigen::VectorXd& complexity,
                                                           Schedule schedule) {
  Eigen::VectorXd next_fitness = normalized(m * complexity);
  Eigen::VectorXd next_complexity =
      normalized(raw_complexity(m, schedule == Schedule::jacobi ? fitness : next_fitness));
  return {std::move(next_fitness), std::move(next_complexity)};
}

Eigen::VectorXd safe_log(const Eigen::VectorXd& x) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    out(k) = x(k) > 0.0 ? std::log(x(k)) : -std::numeric_limits<double>::infinity();
  }
  return out;
}

double relative_defect(const Eigen::VectorXd& before, const Eigen::VectorXd& after) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < before.size(); ++k) {
    if (before(k) > 0.0) worst = std::max(worst, std::abs(after(k) - before(k)) / before(k));
  }
  return worst;
}

double max_log_change(const Eigen::VectorXd& now, const Eigen::VectorXd& then,
                      const std::vector<char>& excluded) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < now.size(); ++k) {
    if (excluded[static_cast<Index>(k)] || !std::isfinite(now(k)) || !std::isfinite(then(k))) {
      continue;
    }
    worst = std::max(worst, std::abs(now(k) - then(k)));
  }
  return worst;
}

// Power-law collapse test over the windows [n/8, n/4], [n/4, n/2], [n/2, n].
void update_trend_flags(const std::array<const Eigen::VectorXd*, 4>& logs,
                        std::vector<char>& flags) {
  const Eigen::VectorXd& current = *logs[3];
  const double log_max = current.maxCoeff();
  for (Eigen::Index k = 0; k < current.size(); ++k) {
    const auto uk = static_cast<Index>(k);
    if (!std::isfinite(current(k))) {
      flags[uk] = 1;
      continue;
    }
    bool collapsing = current(k) - log_max < std::log(kTrendRelativeLevel);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t w = 0; w + 1 < logs.size() && collapsing; ++w) {
      const double drop = (*logs[w])(k) - (*logs[w + 1])(k);
      if (!(drop > kTrendMinDrop)) collapsing = false;
      lo = std::min(lo, drop);
      hi = std::max(hi, drop);
    }
    flags[uk] = collapsing && hi <= kTrendMaxDropRatio * lo;
  }
}

void apply_floor(Eigen::VectorXd& x, double floor, std::vector<char>& hit) {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x(k) < floor) {
      x(k) = 0.0;
      hit[static_cast<Index>(k)] = 1;
    }
  }
}

std::vector<Index> flagged_indices(const std::vector<char>& a, const std::vector<char>& b) {
  std::vector<Index> out;
  for (Index k = 0; k < a.size(); ++k) {
    if (a[k] || b[k]) out.push_back(k);
  }
  return out;
}

bool is_power_of_two(Index n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> fc_step(const BipartiteMatrix& matrix,
                                                    const Eigen::VectorXd& fitness,
                                                    const Eigen::VectorXd& complexity,
                                                    Schedule schedule) {
  require_shape(matrix, fitness, complexity);
  require_positive(fitness, complexity);
  require_populated(matrix);
  return step_unchecked(matrix.entries(), fitness, complexity, schedule);
}

double fc_residual(const BipartiteMatrix& matrix, const Eigen::VectorXd& fitness,
                   const Eigen::VectorXd& complexity) {
  require_shape(matrix, fitness, complexity);
  require_positive(fitness, complexity);
  require_populated(matrix);
  auto [next_fitness, next_complexity] =
      step_unchecked(matrix.entries(), fitness, complexity, Schedule::jacobi);
  return std::max(relative_defect(fitness, next_fitness),
                  relative_defect(complexity, next_complexity));
}

FCResult fc_solve(const BipartiteMatrix& matrix, const FCOptions& options) {
  if (options.max_iterations < 1 || !(options.value_tolerance > 0.0) ||
      !(options.zero_floor > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid FC options");
  }
  require_populated(matrix);

  const auto& m = matrix.entries();
  const Index n_rows = matrix.rows();
  const Index n_cols = matrix.cols();
  const Index lag = options.schedule == Schedule::jacobi ? 2 : 1;

  Eigen::VectorXd fitness = Eigen::VectorXd::Ones(m.rows());
  Eigen::VectorXd complexity = Eigen::VectorXd::Ones(m.cols());

  std::vector<char> floor_rows(n_rows, 0), floor_cols(n_cols, 0);
  std::vector<char> trend_rows(n_rows, 0), trend_cols(n_cols, 0);
  std::vector<char> skip_rows(n_rows, 0), skip_cols(n_cols, 0);

  // Last lag+1 log iterates, newest at the back.
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;
  history.emplace_back(safe_log(fitness), safe_log(complexity));
  // Log iterates at power-of-two iteration counts.
  std::map<Index, std::pair<Eigen::VectorXd, Eigen::VectorXd>> checkpoints;

  std::vector<Index> previous_row_order, previous_col_order;
  Index stable_orders = 0;

  FCResult result;
  result.row_labels = matrix.row_labels();
  result.col_labels = matrix.col_labels();

  Index iteration = 0;
  bool converged = false;
  while (iteration < options.max_iterations) {
    ++iteration;
    std::tie(fitness, complexity) = step_unchecked(m, fitness, complexity, options.schedule);
    apply_floor(fitness, options.zero_floor, floor_rows);
    apply_floor(complexity, options.zero_floor, floor_cols);

    history.emplace_back(safe_log(fitness), safe_log(complexity));
    if (history.size() > lag + 1) history.pop_front();

    auto row_order = order_by(fitness, {}, true, kOrderTieTolerance);
    auto col_order = order_by(complexity, {}, true, kOrderTieTolerance);
    if (row_order == previous_row_order && col_order == previous_col_order) {
      ++stable_orders;
    } else {
      stable_orders = 0;
      previous_row_order = std::move(row_order);
      previous_col_order = std::move(col_order);
    }

    if (is_power_of_two(iteration)) {
      checkpoints[iteration] = history.back();
      if (iteration >= kFirstTrendCheckpoint) {
        const auto& c1 = checkpoints.at(iteration / 8);
        const auto& c2 = checkpoints.at(iteration / 4);
        const auto& c3 = checkpoints.at(iteration / 2);
        const auto& c4 = checkpoints.at(iteration);
        update_trend_flags({&c1.first, &c2.first, &c3.first, &c4.first}, trend_rows);
        update_trend_flags({&c1.second, &c2.second, &c3.second, &c4.second}, trend_cols);
        checkpoints.erase(checkpoints.begin(), checkpoints.find(iteration / 8));
      }
    }

    if (history.size() < lag + 1) continue;
    for (Index k = 0; k < n_rows; ++k) skip_rows[k] = floor_rows[k] || trend_rows[k];
    for (Index k = 0; k < n_cols; ++k) skip_cols[k] = floor_cols[k] || trend_cols[k];

    const auto& newest = history.back();
    const auto& lagged = history.front();
    const double change = std::max(max_log_change(newest.first, lagged.first, skip_rows),
                                   max_log_change(newest.second, lagged.second, skip_cols));
    if (change < options.value_tolerance && stable_orders >= options.rank_window) {
      converged = true;
      break;
    }
  }

  for (Index k = 0; k < n_rows; ++k) skip_rows[k] = floor_rows[k] || trend_rows[k];
  for (Index k = 0; k < n_cols; ++k) skip_cols[k] = floor_cols[k] || trend_cols[k];
  const auto& newest = history.back();
  const auto& previous = history[history.size() >= 2 ? history.size() - 2 : 0];
  result.chain_gap = std::max(max_log_change(newest.first, previous.first, skip_rows),
                              max_log_change(newest.second, previous.second, skip_cols));

  auto [next_fitness, next_complexity] = step_unchecked(m, fitness, complexity, Schedule::jacobi);
  result.residual = std::max(relative_defect(fitness, next_fitness),
                             relative_defect(complexity, next_complexity));

  result.fitness = std::move(fitness);
  result.complexity = std::move(complexity);
  result.iterations = iteration;
  result.converged = converged;
  result.zero_limit_rows = flagged_indices(floor_rows, trend_rows);
  result.zero_limit_cols = flagged_indices(floor_cols, trend_cols);
  return result;
}

}  // namespace fitsink
