#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fitsink/barrier.hpp"
#include "fitsink/core_model.hpp"
#include "fitsink/gauge.hpp"
#include "fitsink/nestedness.hpp"
#include "fitsink/sk_solver.hpp"

namespace fitsink {

struct FlowRecord {
  std::string country;
  std::string product;
  double value = 0.0;
  std::optional<int> year;

  friend bool operator==(const FlowRecord&, const FlowRecord&) = default;
};

struct FlowTable {
  std::vector<FlowRecord> records;
  // Rows whose (country, product, year) key repeated an earlier row.
  Index duplicate_count = 0;
};

/// Reads `country,product,value[,year]` CSV (RFC 4180 quoting, any column
/// order, extra columns ignored). A repeated key overwrites the earlier
/// value in place. Throws MissingColumn or ParseError (with line number).
FlowTable parse_flows(std::istream& in);
FlowTable parse_flows_file(const std::filesystem::path& path);

std::string serialize_flows(const FlowTable& table);

/// Distinct years present, ascending; empty if no record carries a year.
std::vector<int> flow_years(const FlowTable& table);
FlowTable select_year(const FlowTable& table, int year);

struct BinarizeResult {
  BipartiteMatrix matrix;
  Labels removed_rows;
  Labels removed_cols;
};

/// Balassa RCA: (V_cp / sum_p V_cp) / (sum_c V_cp / sum_cp V_cp) >= threshold.
/// Labels keep first-appearance order; emptied rows and columns are dropped.
/// InvalidArgument for multi-year tables, EmptyMatrix if nothing survives.
BinarizeResult rca_binarize(const FlowTable& flows, double threshold = 1.0);

/// M_cp = 1 iff V_cp > 0.
BinarizeResult presence_binarize(const FlowTable& flows);

enum class Binarization { automatic, rca, presence };

/// automatic picks presence when every value is 0 or 1, RCA otherwise.
BinarizeResult binarize(const FlowTable& flows, Binarization mode, double threshold = 1.0);

/// Every cell of a matrix as a flow row (value 0 or 1).
FlowTable matrix_to_flows(const BipartiteMatrix& matrix);

/// `country,year,income` CSV.
IncomeTable parse_income(std::istream& in);
IncomeTable parse_income_file(const std::filesystem::path& path);

inline constexpr int kSchemaVersion = 1;

/// Barrier-line output of the `barrier` command: the line plus the stability
/// certificate and potential value at the scaling solution.
struct BarrierSummary {
  BarrierLine line;
  std::optional<StabilityReport> stability;
  std::optional<double> barrier_value;
};

using ResultValue = std::variant<FCResult, ScalingSolution, EquivalenceReport, PathwayReport,
                                 BarrierSummary, TrajectoryTable, OrderedMatrix>;

/// `kind` field written for a value.
std::string_view result_kind(const ResultValue& value);

/// JSON document with schema_version, kind, gauge and a label-keyed data
/// object. Non-finite numbers are written as the strings "inf", "-inf" and
/// "nan". The gauge of FCResult and TrajectoryTable is their own; other
/// kinds use `gauge`.
std::string serialize_result(const ResultValue& value, const GaugeSpec& gauge = {});

/// Throws SchemaVersionMismatch or ParseError.
ResultValue parse_result(std::string_view text);

void write_result(const std::filesystem::path& path, const ResultValue& value,
                  const GaugeSpec& gauge = {});
ResultValue read_result(const std::filesystem::path& path);

/// Long-format CSV `series,year,country,log_fitness,log_income`: one
/// `country` row per point, then one `mean` row per year (country empty).
/// Missing values are empty fields.
std::string trajectory_csv(const TrajectoryTable& table);

}  // namespace fitsink
