#include "fitsink/nestedness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fitsink/ranking.hpp"

namespace fitsink {
namespace {

void require_scores(const BipartiteMatrix& matrix, const Eigen::VectorXd& fitness,
                    const Eigen::VectorXd& complexity) {
  if (static_cast<Index>(fitness.size()) != matrix.rows() ||
      static_cast<Index>(complexity.size()) != matrix.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "score vectors do not match the matrix shape");
  }
}

void require_positive(const Eigen::VectorXd& fitness, const Eigen::VectorXd& complexity) {
  if (!((fitness.array() > 0.0).all() && (complexity.array() > 0.0).all())) {
    throw Error(ErrorCode::NonPositiveInput, "fitness and complexity must be positive");
  }
}

Tercile tercile_of(double percentile) {
  if (percentile < 1.0 / 3.0) return Tercile::low;
  if (percentile > 2.0 / 3.0) return Tercile::high;
  return Tercile::mid;
}

}  // namespace

OrderedMatrix reorder(const BipartiteMatrix& matrix, const Eigen::VectorXd& fitness,
                      const Eigen::VectorXd& complexity) {
  require_scores(matrix, fitness, complexity);
  auto row_perm = order_by(fitness, matrix.row_labels(), /*descending=*/true);
  auto col_perm = order_by(complexity, matrix.col_labels(), /*descending=*/false);
  OrderedMatrix out{matrix.permuted(row_perm, col_perm), row_perm, col_perm,
                    Eigen::VectorXd(fitness.size()), Eigen::VectorXd(complexity.size())};
  for (Index k = 0; k < row_perm.size(); ++k) {
    out.row_scores(static_cast<Eigen::Index>(k)) = fitness(static_cast<Eigen::Index>(row_perm[k]));
  }
  for (Index k = 0; k < col_perm.size(); ++k) {
    out.col_scores(static_cast<Eigen::Index>(k)) =
        complexity(static_cast<Eigen::Index>(col_perm[k]));
  }
  return out;
}

BarrierLine barrier_line(const BipartiteMatrix& matrix, const Eigen::VectorXd& fitness,
                         const Eigen::VectorXd& complexity) {
  require_scores(matrix, fitness, complexity);
  require_positive(fitness, complexity);
  double threshold = 0.0;
  bool populated = false;
  for (Index c = 0; c < matrix.rows(); ++c) {
    for (Index p = 0; p < matrix.cols(); ++p) {
      if (!matrix.at(c, p)) continue;
      populated = true;
      threshold = std::max(threshold, complexity(static_cast<Eigen::Index>(p)) /
                                          fitness(static_cast<Eigen::Index>(c)));
    }
  }
  if (!populated) throw Error(ErrorCode::EmptyMatrix, "no populated cells");

  BarrierLine line;
  line.threshold = threshold;
  for (Index c = 0; c < matrix.rows(); ++c) {
    for (Index p = 0; p < matrix.cols(); ++p) {
      if (!matrix.at(c, p)) continue;
      const double ratio =
          complexity(static_cast<Eigen::Index>(p)) / fitness(static_cast<Eigen::Index>(c));
      if (threshold - ratio <= kBarrierAttainTolerance * threshold) {
        line.attained_at.emplace_back(matrix.row_labels()[c], matrix.col_labels()[p]);
      }
    }
  }
  return line;
}

std::vector<SpectrumEntry> country_spectrum(const BipartiteMatrix& matrix,
                                            const Eigen::VectorXd& complexity,
                                            const std::string& country) {
  if (static_cast<Index>(complexity.size()) != matrix.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "complexity does not match the matrix");
  }
  const auto row = matrix.row_index(country);
  if (!row) throw Error(ErrorCode::UnknownLabel, "no country '" + country + "'");
  std::vector<SpectrumEntry> spectrum;
  for (Index p : order_by(complexity, matrix.col_labels(), /*descending=*/false)) {
    if (!matrix.at(*row, p)) continue;
    const double q = complexity(static_cast<Eigen::Index>(p));
    if (!(q > 0.0)) throw Error(ErrorCode::NonPositiveInput, "complexity must be positive");
    spectrum.push_back({matrix.col_labels()[p], std::log(q)});
  }
  return spectrum;
}

PathwayReport classify_pathways(const BipartiteMatrix& matrix, const Eigen::VectorXd& fitness,
                                const Eigen::VectorXd& complexity, const PathwayParams& params) {
  const BarrierLine line = barrier_line(matrix, fitness, complexity);
  const double t = line.threshold;
  const Index n = matrix.rows();
  const Eigen::VectorXd ranks = average_ranks(fitness);

  PathwayReport report;
  report.threshold = t;
  report.params = params;
  for (Index c = 0; c < n; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    CountryPathway entry;
    entry.country = matrix.row_labels()[c];
    entry.fitness = fitness(ci);
    const double percentile = n > 1 ? (ranks(ci) - 1.0) / static_cast<double>(n - 1) : 0.5;
    entry.tercile = tercile_of(percentile);

    double max_q = 0.0;
    Index exports = 0;
    Index near = 0;
    const double frontier = t * fitness(ci);
    for (Index p = 0; p < matrix.cols(); ++p) {
      if (!matrix.at(c, p)) continue;
      const double q = complexity(static_cast<Eigen::Index>(p));
      ++exports;
      max_q = std::max(max_q, q);
      if (q >= params.near_band * frontier) ++near;
    }
    if (exports > 0) {
      entry.frontier_gap = std::max(0.0, std::log(frontier) - std::log(max_q));
      entry.near_line_density = static_cast<double>(near) / static_cast<double>(exports);
    }

    const bool on_line = entry.frontier_gap <= params.gap_threshold;
    const bool dense = entry.near_line_density >= params.density_cutoff;
    if (entry.tercile == Tercile::low && on_line) {
      entry.label = Pathway::learner;
    } else if (entry.tercile != Tercile::high && (!on_line || !dense)) {
      entry.label = Pathway::exploiter;
    } else if (entry.tercile == Tercile::high && dense && on_line) {
      entry.label = Pathway::explorer;
    } else if (entry.tercile == Tercile::high) {
      entry.label = Pathway::exploiter;
      entry.low_confidence = true;
    } else {
      entry.label = Pathway::learner;
      entry.low_confidence = true;
    }
    report.countries.push_back(std::move(entry));
  }
  return report;
}

std::string_view to_string(Tercile tercile) noexcept {
  switch (tercile) {
    case Tercile::low: return "low";
    case Tercile::mid: return "mid";
    case Tercile::high: return "high";
  }
  return "mid";
}

std::string_view to_string(Pathway pathway) noexcept {
  switch (pathway) {
    case Pathway::learner: return "Learner";
    case Pathway::exploiter: return "Exploiter";
    case Pathway::explorer: return "Explorer";
  }
  return "Exploiter";
}

Tercile parse_tercile(std::string_view text) {
  if (text == "low") return Tercile::low;
  if (text == "mid") return Tercile::mid;
  if (text == "high") return Tercile::high;
  throw Error(ErrorCode::ParseError, "unknown tercile '" + std::string(text) + "'");
}

Pathway parse_pathway(std::string_view text) {
  if (text == "Learner") return Pathway::learner;
  if (text == "Exploiter") return Pathway::exploiter;
  if (text == "Explorer") return Pathway::explorer;
  throw Error(ErrorCode::ParseError, "unknown pathway '" + std::string(text) + "'");
}

TrajectoryTable trajectories(const std::vector<YearResult>& yearly, const IncomeTable* income) {
  TrajectoryTable table;
  if (yearly.empty()) return table;
  table.gauge = yearly.front().result.gauge;
  std::set<int> years;
  for (const auto& entry : yearly) {
    if (!(entry.result.gauge == table.gauge)) {
      throw Error(ErrorCode::GaugeMismatch, "year " + std::to_string(entry.year) +
                                                " uses a different gauge than year " +
                                                std::to_string(yearly.front().year));
    }
    if (!years.insert(entry.year).second) {
      throw Error(ErrorCode::InvalidArgument, "year " + std::to_string(entry.year) + " repeated");
    }
  }

  for (const auto& entry : yearly) {
    const auto& r = entry.result;
    double sum = 0.0;
    Index count = 0;
    for (Index c = 0; c < r.row_labels.size(); ++c) {
      const double f = r.fitness(static_cast<Eigen::Index>(c));
      if (!(f > 0.0)) continue;
      TrajectoryPoint point{entry.year, r.row_labels[c], std::log(f), std::nullopt};
      if (income) {
        auto it = income->find({r.row_labels[c], entry.year});
        if (it != income->end() && it->second > 0.0) point.log_income = std::log(it->second);
      }
      sum += point.log_fitness;
      ++count;
      table.points.push_back(std::move(point));
    }
    if (count > 0) table.means.push_back({entry.year, sum / static_cast<double>(count)});
  }
  std::sort(table.points.begin(), table.points.end(), [](const auto& a, const auto& b) {
    return std::tie(a.year, a.country) < std::tie(b.year, b.country);
  });
  std::sort(table.means.begin(), table.means.end(),
            [](const auto& a, const auto& b) { return a.year < b.year; });
  return table;
}

}  // namespace fitsink
