#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fitsink/core_model.hpp"

namespace fitsink {

struct OrderedMatrix {
  BipartiteMatrix matrix;
  // Output row k is input row row_perm[k]; likewise for columns.
  std::vector<Index> row_perm;
  std::vector<Index> col_perm;
  Eigen::VectorXd row_scores;  // F, descending
  Eigen::VectorXd col_scores;  // Q, ascending
};

/// Rows by F descending, columns by Q ascending; ties broken by label.
OrderedMatrix reorder(const BipartiteMatrix& matrix, const Eigen::VectorXd& fitness,
                      const Eigen::VectorXd& complexity);

struct BarrierLine {
  // t* = max over populated cells of Q_p / F_c.
  double threshold = 0.0;
  // (country, product) cells whose ratio equals t* within 1e-12 relative.
  std::vector<std::pair<std::string, std::string>> attained_at;

  friend bool operator==(const BarrierLine&, const BarrierLine&) = default;
};

inline constexpr double kBarrierAttainTolerance = 1e-12;

/// The smallest Q/F iso-line above which no cell is populated.
/// NonPositiveInput for non-positive scores, EmptyMatrix without populated cells.
BarrierLine barrier_line(const BipartiteMatrix& matrix, const Eigen::VectorXd& fitness,
                         const Eigen::VectorXd& complexity);

struct SpectrumEntry {
  std::string product;
  double log_complexity = 0.0;
};

/// Exported products of one country in ascending complexity order.
std::vector<SpectrumEntry> country_spectrum(const BipartiteMatrix& matrix,
                                            const Eigen::VectorXd& complexity,
                                            const std::string& country);

struct PathwayParams {
  double near_band = 0.5;
  double gap_threshold = 0.69314718055994530942;  // ln 2
  double density_cutoff = 0.05;

  friend bool operator==(const PathwayParams&, const PathwayParams&) = default;
};

enum class Tercile { low, mid, high };
enum class Pathway { learner, exploiter, explorer };

struct CountryPathway {
  std::string country;
  double fitness = 0.0;
  Tercile tercile = Tercile::mid;
  // ln(t* F_c) - ln(max exported Q_p)
  double frontier_gap = 0.0;
  // Share of exports with Q_p >= near_band * t* * F_c.
  double near_line_density = 0.0;
  Pathway label = Pathway::exploiter;
  bool low_confidence = false;

  friend bool operator==(const CountryPathway&, const CountryPathway&) = default;
};

struct PathwayReport {
  double threshold = 0.0;
  PathwayParams params;
  std::vector<CountryPathway> countries;  // input row order

  friend bool operator==(const PathwayReport&, const PathwayReport&) = default;
};

/// Labels every country by its position relative to the barrier line.
///
/// Terciles come from the mid-rank percentile of F (below 1/3 low, above 2/3
/// high). Rules, in order:
///   Learner    low tercile and gap <= gap_threshold;
///   Exploiter  not high, and gap > gap_threshold or density < density_cutoff;
///   Explorer   high, density >= density_cutoff and gap <= gap_threshold.
/// Leftovers get the nearest label with low_confidence set: a high-tercile
/// country far from the line is an Exploiter, a mid-tercile country on a
/// dense line is a Learner.
PathwayReport classify_pathways(const BipartiteMatrix& matrix, const Eigen::VectorXd& fitness,
                                const Eigen::VectorXd& complexity,
                                const PathwayParams& params = {});

std::string_view to_string(Tercile tercile) noexcept;
std::string_view to_string(Pathway pathway) noexcept;
Tercile parse_tercile(std::string_view text);
Pathway parse_pathway(std::string_view text);

struct YearResult {
  int year = 0;
  FCResult result;
};

// Income keyed by (country, year).
using IncomeTable = std::map<std::pair<std::string, int>, double>;

struct TrajectoryPoint {
  int year = 0;
  std::string country;
  double log_fitness = 0.0;
  std::optional<double> log_income;

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

struct YearMean {
  int year = 0;
  double mean_log_fitness = 0.0;

  friend bool operator==(const YearMean&, const YearMean&) = default;
};

struct TrajectoryTable {
  GaugeSpec gauge;
  std::vector<TrajectoryPoint> points;  // sorted by year, then country
  std::vector<YearMean> means;          // one per year

  friend bool operator==(const TrajectoryTable&, const TrajectoryTable&) = default;
};

/// Long-format (year, country, ln F[, ln income]) table. Countries with zero
/// fitness in a year are omitted for that year. GaugeMismatch if the results
/// were gauged differently; InvalidArgument on repeated years.
TrajectoryTable trajectories(const std::vector<YearResult>& yearly,
                             const IncomeTable* income = nullptr);

}  // namespace fitsink
