#include "fitsink/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

namespace fitsink {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------- CSV ----

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Next non-blank record; false at end of input. `line` is the 1-based
  // line on which the record starts.
  bool next(std::vector<std::string>& fields, std::size_t& line) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      strip_cr(text);
      if (line_ == 1 && text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
      if (text.empty()) continue;
      line = line_;
      split(text, fields);
      return true;
    }
    return false;
  }

 private:
  static void strip_cr(std::string& text) {
    if (!text.empty() && text.back() == '\r') text.pop_back();
  }

  void split(std::string text, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    std::size_t k = 0;
    while (true) {
      if (k == text.size()) {
        if (!quoted) break;
        std::string more;
        if (!std::getline(in_, more)) {
          throw Error(ErrorCode::ParseError, "line " + std::to_string(line_) + ": unterminated quote");
        }
        ++line_;
        strip_cr(more);
        field += '\n';
        text = std::move(more);
        k = 0;
        continue;
      }
      const char ch = text[k++];
      if (quoted) {
        if (ch != '"') {
          field += ch;
        } else if (k < text.size() && text[k] == '"') {
          field += '"';
          ++k;
        } else {
          quoted = false;
          after_quote = true;
        }
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
      } else if (after_quote) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_) + ": text after closing quote");
      } else if (ch == '"' && field.empty()) {
        quoted = true;
      } else {
        field += ch;
      }
    }
    fields.push_back(std::move(field));
  }

  std::istream& in_;
  std::size_t line_ = 0;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message);
}

double parse_number(const std::string& raw, std::size_t line, const char* what) {
  const std::string text = trim(raw);
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size() ||
      !std::isfinite(value)) {
    parse_fail(line, std::string("invalid ") + what + " '" + raw + "'");
  }
  return value;
}

int parse_int(const std::string& raw, std::size_t line, const char* what) {
  const std::string text = trim(raw);
  int value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    parse_fail(line, std::string("invalid ") + what + " '" + raw + "'");
  }
  return value;
}

// Column positions for the requested names; MissingColumn if a required one
// is absent.
std::map<std::string, std::size_t> header_columns(const std::vector<std::string>& header,
                                                  const std::vector<std::string>& required,
                                                  const std::vector<std::string>& optional) {
  std::map<std::string, std::size_t> found;
  for (std::size_t k = 0; k < header.size(); ++k) {
    const std::string name = lower(trim(header[k]));
    if (std::find(required.begin(), required.end(), name) != required.end() ||
        std::find(optional.begin(), optional.end(), name) != optional.end()) {
      found.emplace(name, k);
    }
  }
  for (const auto& name : required) {
    if (!found.count(name)) throw Error(ErrorCode::MissingColumn, "no '" + name + "' column");
  }
  return found;
}

std::string format_double(double x) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x);
  return std::string(buffer, end);
}

std::string quote_csv(const std::string& field) {
  const bool needs = field.find_first_of(",\"\n\r") != std::string::npos ||
                     (!field.empty() && (std::isspace(static_cast<unsigned char>(field.front())) ||
                                         std::isspace(static_cast<unsigned char>(field.back()))));
  if (!needs) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return in;
}

// Dense value matrix in first-appearance label order.
struct DenseFlows {
  Labels countries;
  Labels products;
  Eigen::MatrixXd values;
};

DenseFlows densify(const FlowTable& flows) {
  if (flow_years(flows).size() > 1) {
    throw Error(ErrorCode::InvalidArgument, "flow table spans several years; select one first");
  }
  DenseFlows out;
  std::unordered_map<std::string, Index> row_of, col_of;
  for (const auto& r : flows.records) {
    if (row_of.emplace(r.country, out.countries.size()).second) out.countries.push_back(r.country);
    if (col_of.emplace(r.product, out.products.size()).second) out.products.push_back(r.product);
  }
  if (out.countries.empty()) throw Error(ErrorCode::EmptyMatrix, "flow table has no records");
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.countries.size()),
                                     static_cast<Eigen::Index>(out.products.size()));
  for (const auto& r : flows.records) {
    out.values(static_cast<Eigen::Index>(row_of[r.country]),
               static_cast<Eigen::Index>(col_of[r.product])) = r.value;
  }
  return out;
}

BinarizeResult finish(DenseFlows dense, Eigen::MatrixXd pattern) {
  BipartiteMatrix full(std::move(dense.countries), std::move(dense.products), std::move(pattern));
  auto dropped = drop_empty(full);
  return {std::move(dropped.matrix), std::move(dropped.removed_rows),
          std::move(dropped.removed_cols)};
}

// --------------------------------------------------------------- JSON ----

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double to_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::ParseError, "expected a number, got " + j.dump());
}

json optional_number(const std::optional<double>& x) {
  return x ? number(*x) : json(nullptr);
}

std::optional<double> to_optional(const json& j) {
  if (j.is_null()) return std::nullopt;
  return to_double(j);
}

json labelled(const Labels& labels, const Eigen::VectorXd& values) {
  json out = json::array();
  for (Index k = 0; k < labels.size(); ++k) {
    out.push_back({{"label", labels[k]}, {"value", number(values(static_cast<Eigen::Index>(k)))}});
  }
  return out;
}

void unlabel(const json& j, Labels& labels, Eigen::VectorXd& values) {
  labels.clear();
  values.resize(static_cast<Eigen::Index>(j.size()));
  Eigen::Index k = 0;
  for (const auto& item : j) {
    labels.push_back(item.at("label").get<std::string>());
    values(k++) = to_double(item.at("value"));
  }
}

// Second label list must agree with the first when decoding paired arrays.
Eigen::VectorXd unlabel_matching(const json& j, const Labels& expected) {
  Labels labels;
  Eigen::VectorXd values;
  unlabel(j, labels, values);
  if (labels != expected) throw Error(ErrorCode::ParseError, "inconsistent labels");
  return values;
}

json label_list(const Labels& labels, const std::vector<Index>& indices) {
  json out = json::array();
  for (Index k : indices) out.push_back(labels.at(k));
  return out;
}

std::vector<Index> index_list(const json& j, const Labels& labels) {
  std::vector<Index> out;
  for (const auto& item : j) {
    const auto label = item.get<std::string>();
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw Error(ErrorCode::ParseError, "unknown label '" + label + "'");
    out.push_back(static_cast<Index>(it - labels.begin()));
  }
  return out;
}

std::string_view gauge_kind_name(GaugeKind kind) {
  switch (kind) {
    case GaugeKind::normalization: return "normalization";
    case GaugeKind::dummy_country: return "dummy_country";
    case GaugeKind::reference_row: return "reference_row";
    case GaugeKind::reference_col: return "reference_col";
  }
  return "normalization";
}

json encode_gauge(const GaugeSpec& g) {
  json out = {{"kind", gauge_kind_name(g.kind)}, {"target_value", number(g.target_value)}};
  if (!g.label.empty()) out["label"] = g.label;
  return out;
}

GaugeSpec decode_gauge(const json& j) {
  GaugeSpec g;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "normalization") g.kind = GaugeKind::normalization;
  else if (kind == "dummy_country") g.kind = GaugeKind::dummy_country;
  else if (kind == "reference_row") g.kind = GaugeKind::reference_row;
  else if (kind == "reference_col") g.kind = GaugeKind::reference_col;
  else throw Error(ErrorCode::ParseError, "unknown gauge kind '" + kind + "'");
  g.target_value = to_double(j.at("target_value"));
  if (j.contains("label")) g.label = j.at("label").get<std::string>();
  return g;
}

json encode(const FCResult& r) {
  return {{"fitness", labelled(r.row_labels, r.fitness)},
          {"complexity", labelled(r.col_labels, r.complexity)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"residual", number(r.residual)},
          {"chain_gap", number(r.chain_gap)},
          {"zero_limit_rows", label_list(r.row_labels, r.zero_limit_rows)},
          {"zero_limit_cols", label_list(r.col_labels, r.zero_limit_cols)}};
}

FCResult decode_fc(const json& d, const GaugeSpec& gauge) {
  FCResult r;
  unlabel(d.at("fitness"), r.row_labels, r.fitness);
  unlabel(d.at("complexity"), r.col_labels, r.complexity);
  r.iterations = d.at("iterations").get<Index>();
  r.converged = d.at("converged").get<bool>();
  r.residual = to_double(d.at("residual"));
  r.chain_gap = to_double(d.at("chain_gap"));
  r.zero_limit_rows = index_list(d.at("zero_limit_rows"), r.row_labels);
  r.zero_limit_cols = index_list(d.at("zero_limit_cols"), r.col_labels);
  r.gauge = gauge;
  return r;
}

json encode(const ScalingSolution& s) {
  return {{"u", labelled(s.row_labels, s.u)},
          {"v", labelled(s.col_labels, s.v)},
          {"log_u", labelled(s.row_labels, s.log_u)},
          {"log_v", labelled(s.col_labels, s.log_v)},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"marginal_residual", number(s.marginal_residual)},
          {"total_support_suspect", s.total_support_suspect}};
}

ScalingSolution decode_sk(const json& d) {
  ScalingSolution s;
  unlabel(d.at("u"), s.row_labels, s.u);
  unlabel(d.at("v"), s.col_labels, s.v);
  s.log_u = unlabel_matching(d.at("log_u"), s.row_labels);
  s.log_v = unlabel_matching(d.at("log_v"), s.col_labels);
  s.iterations = d.at("iterations").get<Index>();
  s.converged = d.at("converged").get<bool>();
  s.marginal_residual = to_double(d.at("marginal_residual"));
  s.total_support_suspect = d.at("total_support_suspect").get<bool>();
  return s;
}

json encode(const EquivalenceReport& e) {
  return {{"spearman_F_vs_inv_u", optional_number(e.spearman_F_vs_inv_u)},
          {"pearson_logF_vs_neg_logu", optional_number(e.pearson_logF_vs_neg_logu)},
          {"pearson_Q_vs_v_after_gauge", optional_number(e.pearson_Q_vs_v_after_gauge)},
          {"pearson_F_vs_u", optional_number(e.pearson_F_vs_u)},
          {"max_relative_gap_after_gauge", number(e.max_relative_gap_after_gauge)},
          {"gauge_beta", number(e.gauge_beta)},
          {"constant_input", e.constant_input}};
}

EquivalenceReport decode_equivalence(const json& d) {
  EquivalenceReport e;
  e.spearman_F_vs_inv_u = to_optional(d.at("spearman_F_vs_inv_u"));
  e.pearson_logF_vs_neg_logu = to_optional(d.at("pearson_logF_vs_neg_logu"));
  e.pearson_Q_vs_v_after_gauge = to_optional(d.at("pearson_Q_vs_v_after_gauge"));
  e.pearson_F_vs_u = to_optional(d.at("pearson_F_vs_u"));
  e.max_relative_gap_after_gauge = to_double(d.at("max_relative_gap_after_gauge"));
  e.gauge_beta = to_double(d.at("gauge_beta"));
  e.constant_input = d.at("constant_input").get<bool>();
  return e;
}

json encode(const PathwayReport& p) {
  json countries = json::array();
  for (const auto& c : p.countries) {
    countries.push_back({{"country", c.country},
                         {"fitness", number(c.fitness)},
                         {"fitness_tercile", to_string(c.tercile)},
                         {"frontier_gap", number(c.frontier_gap)},
                         {"near_line_density", number(c.near_line_density)},
                         {"label", to_string(c.label)},
                         {"low_confidence", c.low_confidence}});
  }
  return {{"threshold", number(p.threshold)},
          {"params",
           {{"near_band", number(p.params.near_band)},
            {"gap_threshold", number(p.params.gap_threshold)},
            {"density_cutoff", number(p.params.density_cutoff)}}},
          {"countries", countries}};
}

PathwayReport decode_pathways(const json& d) {
  PathwayReport p;
  p.threshold = to_double(d.at("threshold"));
  const auto& params = d.at("params");
  p.params.near_band = to_double(params.at("near_band"));
  p.params.gap_threshold = to_double(params.at("gap_threshold"));
  p.params.density_cutoff = to_double(params.at("density_cutoff"));
  for (const auto& c : d.at("countries")) {
    CountryPathway entry;
    entry.country = c.at("country").get<std::string>();
    entry.fitness = to_double(c.at("fitness"));
    entry.tercile = parse_tercile(c.at("fitness_tercile").get<std::string>());
    entry.frontier_gap = to_double(c.at("frontier_gap"));
    entry.near_line_density = to_double(c.at("near_line_density"));
    entry.label = parse_pathway(c.at("label").get<std::string>());
    entry.low_confidence = c.at("low_confidence").get<bool>();
    p.countries.push_back(std::move(entry));
  }
  return p;
}

json encode(const BarrierSummary& b) {
  json cells = json::array();
  for (const auto& [country, product] : b.line.attained_at) {
    cells.push_back({{"country", country}, {"product", product}});
  }
  json out = {{"threshold", number(b.line.threshold)}, {"attained_at", cells}};
  if (b.stability) {
    const auto& s = *b.stability;
    out["stability"] = {{"gradient_norm", number(s.gradient_norm)},
                        {"min_eigenvalue", number(s.min_eigenvalue)},
                        {"null_direction_residual", number(s.null_direction_residual)},
                        {"diagonally_dominant", s.diagonally_dominant},
                        {"not_stationary", s.not_stationary}};
  }
  if (b.barrier_value) out["barrier_value"] = number(*b.barrier_value);
  return out;
}

BarrierSummary decode_barrier(const json& d) {
  BarrierSummary b;
  b.line.threshold = to_double(d.at("threshold"));
  for (const auto& cell : d.at("attained_at")) {
    b.line.attained_at.emplace_back(cell.at("country").get<std::string>(),
                                    cell.at("product").get<std::string>());
  }
  if (d.contains("stability")) {
    const auto& s = d.at("stability");
    StabilityReport r;
    r.gradient_norm = to_double(s.at("gradient_norm"));
    r.min_eigenvalue = to_double(s.at("min_eigenvalue"));
    r.null_direction_residual = to_double(s.at("null_direction_residual"));
    r.diagonally_dominant = s.at("diagonally_dominant").get<bool>();
    r.not_stationary = s.at("not_stationary").get<bool>();
    b.stability = r;
  }
  if (d.contains("barrier_value")) b.barrier_value = to_double(d.at("barrier_value"));
  return b;
}

json encode(const TrajectoryTable& t) {
  json points = json::array();
  for (const auto& p : t.points) {
    points.push_back({{"year", p.year},
                      {"country", p.country},
                      {"log_fitness", number(p.log_fitness)},
                      {"log_income", optional_number(p.log_income)}});
  }
  json means = json::array();
  for (const auto& m : t.means) {
    means.push_back({{"year", m.year}, {"mean_log_fitness", number(m.mean_log_fitness)}});
  }
  return {{"points", points}, {"means", means}};
}

TrajectoryTable decode_trajectories(const json& d, const GaugeSpec& gauge) {
  TrajectoryTable t;
  t.gauge = gauge;
  for (const auto& p : d.at("points")) {
    t.points.push_back({p.at("year").get<int>(), p.at("country").get<std::string>(),
                        to_double(p.at("log_fitness")), to_optional(p.at("log_income"))});
  }
  for (const auto& m : d.at("means")) {
    t.means.push_back({m.at("year").get<int>(), to_double(m.at("mean_log_fitness"))});
  }
  return t;
}

json encode(const OrderedMatrix& o) {
  json rows = json::array();
  const auto& e = o.matrix.entries();
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < e.cols(); ++j) row.push_back(static_cast<int>(e(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"row_scores", labelled(o.matrix.row_labels(), o.row_scores)},
          {"col_scores", labelled(o.matrix.col_labels(), o.col_scores)},
          {"row_perm", o.row_perm},
          {"col_perm", o.col_perm},
          {"entries", rows}};
}

OrderedMatrix decode_ordered(const json& d) {
  Labels row_labels, col_labels;
  Eigen::VectorXd row_scores, col_scores;
  unlabel(d.at("row_scores"), row_labels, row_scores);
  unlabel(d.at("col_scores"), col_labels, col_scores);
  const auto& rows = d.at("entries");
  Eigen::MatrixXd entries(static_cast<Eigen::Index>(row_labels.size()),
                          static_cast<Eigen::Index>(col_labels.size()));
  if (rows.size() != row_labels.size()) throw Error(ErrorCode::ParseError, "entries shape");
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (row.size() != col_labels.size()) throw Error(ErrorCode::ParseError, "entries shape");
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
      entries(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
    }
  }
  return {BipartiteMatrix(std::move(row_labels), std::move(col_labels), std::move(entries)),
          d.at("row_perm").get<std::vector<Index>>(), d.at("col_perm").get<std::vector<Index>>(),
          std::move(row_scores), std::move(col_scores)};
}

}  // namespace

// ------------------------------------------------------------ flows ----

FlowTable parse_flows(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!reader.next(fields, line)) throw Error(ErrorCode::EmptyMatrix, "empty input");
  const auto columns = header_columns(fields, {"country", "product", "value"}, {"year"});
  const std::size_t width = std::max_element(columns.begin(), columns.end(), [](auto& a, auto& b) {
                              return a.second < b.second;
                            })->second + 1;
  const auto year_column = columns.find("year");

  FlowTable table;
  std::map<std::tuple<std::string, std::string, std::optional<int>>, Index> seen;
  while (reader.next(fields, line)) {
    if (fields.size() < width) parse_fail(line, "expected at least " + std::to_string(width) + " fields");
    FlowRecord record;
    record.country = trim(fields[columns.at("country")]);
    record.product = trim(fields[columns.at("product")]);
    if (record.country.empty() || record.product.empty()) parse_fail(line, "empty label");
    record.value = parse_number(fields[columns.at("value")], line, "value");
    if (record.value < 0.0) parse_fail(line, "negative value");
    if (year_column != columns.end() && !trim(fields[year_column->second]).empty()) {
      record.year = parse_int(fields[year_column->second], line, "year");
    }
    auto key = std::make_tuple(record.country, record.product, record.year);
    auto [it, fresh] = seen.emplace(std::move(key), table.records.size());
    if (fresh) {
      table.records.push_back(std::move(record));
    } else {
      table.records[it->second] = std::move(record);
      ++table.duplicate_count;
    }
  }
  return table;
}

FlowTable parse_flows_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_flows(in);
}

std::string serialize_flows(const FlowTable& table) {
  const bool with_year = std::any_of(table.records.begin(), table.records.end(),
                                     [](const FlowRecord& r) { return r.year.has_value(); });
  std::string out = with_year ? "country,product,value,year\n" : "country,product,value\n";
  for (const auto& r : table.records) {
    out += quote_csv(r.country) + "," + quote_csv(r.product) + "," + format_double(r.value);
    if (with_year) out += "," + (r.year ? std::to_string(*r.year) : std::string());
    out += "\n";
  }
  return out;
}

std::vector<int> flow_years(const FlowTable& table) {
  std::set<int> years;
  for (const auto& r : table.records) {
    if (r.year) years.insert(*r.year);
  }
  return {years.begin(), years.end()};
}

FlowTable select_year(const FlowTable& table, int year) {
  FlowTable out;
  for (const auto& r : table.records) {
    if (r.year == year) out.records.push_back(r);
  }
  return out;
}

BinarizeResult rca_binarize(const FlowTable& flows, double threshold) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw Error(ErrorCode::InvalidArgument, "RCA threshold must be finite and non-negative");
  }
  DenseFlows dense = densify(flows);
  const auto& v = dense.values;
  const double total = v.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::EmptyMatrix, "total flow value is zero");
  const Eigen::VectorXd row_sums = v.rowwise().sum();
  const Eigen::RowVectorXd col_sums = v.colwise().sum();
  // Relative slack so ratios that are exactly the threshold in exact
  // arithmetic (uniform flows give RCA = 1) are not lost to rounding.
  const double cut = threshold * (1.0 - 1e-12);
  Eigen::MatrixXd pattern = Eigen::MatrixXd::Zero(v.rows(), v.cols());
  for (Eigen::Index c = 0; c < v.rows(); ++c) {
    for (Eigen::Index p = 0; p < v.cols(); ++p) {
      if (!(v(c, p) > 0.0)) continue;
      const double rca = (v(c, p) * total) / (row_sums(c) * col_sums(p));
      if (rca >= cut) pattern(c, p) = 1.0;
    }
  }
  return finish(std::move(dense), std::move(pattern));
}

BinarizeResult presence_binarize(const FlowTable& flows) {
  DenseFlows dense = densify(flows);
  Eigen::MatrixXd pattern = (dense.values.array() > 0.0).cast<double>();
  return finish(std::move(dense), std::move(pattern));
}

BinarizeResult binarize(const FlowTable& flows, Binarization mode, double threshold) {
  if (mode == Binarization::automatic) {
    const bool binary = std::all_of(flows.records.begin(), flows.records.end(),
                                    [](const FlowRecord& r) { return r.value == 0.0 || r.value == 1.0; });
    mode = binary ? Binarization::presence : Binarization::rca;
  }
  return mode == Binarization::presence ? presence_binarize(flows) : rca_binarize(flows, threshold);
}

FlowTable matrix_to_flows(const BipartiteMatrix& matrix) {
  FlowTable table;
  for (Index c = 0; c < matrix.rows(); ++c) {
    for (Index p = 0; p < matrix.cols(); ++p) {
      table.records.push_back({matrix.row_labels()[c], matrix.col_labels()[p],
                               matrix.at(c, p) ? 1.0 : 0.0, std::nullopt});
    }
  }
  return table;
}

IncomeTable parse_income(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!reader.next(fields, line)) throw Error(ErrorCode::MissingColumn, "empty input, no header");
  const auto columns = header_columns(fields, {"country", "year", "income"}, {});
  std::size_t width = 0;
  for (const auto& [name, k] : columns) width = std::max(width, k + 1);
  IncomeTable table;
  while (reader.next(fields, line)) {
    if (fields.size() < width) parse_fail(line, "expected at least " + std::to_string(width) + " fields");
    const double income = parse_number(fields[columns.at("income")], line, "income");
    if (!(income > 0.0)) parse_fail(line, "income must be positive");
    table[{trim(fields[columns.at("country")]), parse_int(fields[columns.at("year")], line, "year")}] =
        income;
  }
  return table;
}

IncomeTable parse_income_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_income(in);
}

// ---------------------------------------------------------- results ----

std::string_view result_kind(const ResultValue& value) {
  struct Kind {
    std::string_view operator()(const FCResult&) const { return "fc_result"; }
    std::string_view operator()(const ScalingSolution&) const { return "sk_solution"; }
    std::string_view operator()(const EquivalenceReport&) const { return "equivalence_report"; }
    std::string_view operator()(const PathwayReport&) const { return "pathway_report"; }
    std::string_view operator()(const BarrierSummary&) const { return "barrier_line"; }
    std::string_view operator()(const TrajectoryTable&) const { return "trajectories"; }
    std::string_view operator()(const OrderedMatrix&) const { return "ordered_matrix"; }
  };
  return std::visit(Kind{}, value);
}

std::string serialize_result(const ResultValue& value, const GaugeSpec& gauge) {
  GaugeSpec effective = gauge;
  if (const auto* fc = std::get_if<FCResult>(&value)) effective = fc->gauge;
  if (const auto* t = std::get_if<TrajectoryTable>(&value)) effective = t->gauge;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = result_kind(value);
  doc["gauge"] = encode_gauge(effective);
  doc["data"] = std::visit([](const auto& v) { return encode(v); }, value);
  return doc.dump(2) + "\n";
}

ResultValue parse_result(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed result JSON: ") + e.what());
  }
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw Error(ErrorCode::SchemaVersionMismatch,
                  "schema_version " + std::to_string(version) + ", expected " +
                      std::to_string(kSchemaVersion));
    }
    const auto kind = doc.at("kind").get<std::string>();
    const GaugeSpec gauge = decode_gauge(doc.at("gauge"));
    const json& data = doc.at("data");
    if (kind == "fc_result") return decode_fc(data, gauge);
    if (kind == "sk_solution") return decode_sk(data);
    if (kind == "equivalence_report") return decode_equivalence(data);
    if (kind == "pathway_report") return decode_pathways(data);
    if (kind == "barrier_line") return decode_barrier(data);
    if (kind == "trajectories") return decode_trajectories(data, gauge);
    if (kind == "ordered_matrix") return decode_ordered(data);
    throw Error(ErrorCode::ParseError, "unknown result kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad result document: ") + e.what());
  }
}

void write_result(const std::filesystem::path& path, const ResultValue& value,
                  const GaugeSpec& gauge) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << serialize_result(value, gauge);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

ResultValue read_result(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_result(buffer.str());
}

std::string trajectory_csv(const TrajectoryTable& table) {
  std::string out = "series,year,country,log_fitness,log_income\n";
  for (const auto& p : table.points) {
    out += "country," + std::to_string(p.year) + "," + quote_csv(p.country) + "," +
           format_double(p.log_fitness) + "," +
           (p.log_income ? format_double(*p.log_income) : std::string()) + "\n";
  }
  for (const auto& m : table.means) {
    out += "mean," + std::to_string(m.year) + ",," + format_double(m.mean_log_fitness) + ",\n";
  }
  return out;
}

}  // namespace fitsink
