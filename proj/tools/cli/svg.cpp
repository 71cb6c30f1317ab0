#include <fstream>
#include <string>

#include "cli/cli.hpp"
#include "fitsink/error.hpp"

namespace fitsink::cli {
namespace {

constexpr long kCell = 12;

}  // namespace

std::string render_matrix_svg(const OrderedMatrix& ordered,
                              const std::optional<BarrierLine>& line) {
  const auto& m = ordered.matrix;
  const long width = static_cast<long>(m.cols()) * kCell;
  const long height = static_cast<long>(m.rows()) * kCell;
  const std::string w = std::to_string(width);
  const std::string h = std::to_string(height);

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + w + "\" height=\"" + h +
         "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
  svg += "<rect width=\"" + w + "\" height=\"" + h + "\" fill=\"white\"/>\n";
  svg += "<g fill=\"black\">\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (!m.at(i, j)) continue;
      svg += "<rect x=\"" + std::to_string(static_cast<long>(j) * kCell) + "\" y=\"" +
             std::to_string(static_cast<long>(i) * kCell) + "\" width=\"" +
             std::to_string(kCell) + "\" height=\"" + std::to_string(kCell) + "\"/>\n";
    }
  }
  svg += "</g>\n";
  if (!line) {
    svg += "</svg>\n";
    return svg;
  }

  // Row i reaches the first k columns with Q_p <= t* F_i (columns are in
  // ascending Q order).
  std::string points;
  const double t = line->threshold;
  for (Index i = 0; i < m.rows(); ++i) {
    const double frontier = t * ordered.row_scores(static_cast<Eigen::Index>(i));
    long k = 0;
    while (k < static_cast<long>(m.cols()) &&
           ordered.col_scores(k) <= frontier * (1.0 + kBarrierAttainTolerance)) {
      ++k;
    }
    const std::string x = std::to_string(k * kCell);
    if (!points.empty()) points += ' ';
    points += x + "," + std::to_string(static_cast<long>(i) * kCell) + " " + x + "," +
              std::to_string(static_cast<long>(i + 1) * kCell);
  }
  svg += "<polyline fill=\"none\" stroke=\"red\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
  svg += "</svg>\n";
  return svg;
}

void write_matrix_svg(const OrderedMatrix& ordered, const std::optional<BarrierLine>& line,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << render_matrix_svg(ordered, line);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace fitsink::cli
