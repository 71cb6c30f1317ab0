#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fitsink/nestedness.hpp"

namespace fitsink::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;  // NotConverged, EmptyMatrix, ...
inline constexpr int kExitUsageError = 2;

/// Runs one `fitsink` invocation. Results go to `out` (or --output files),
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Matrix portrait in reordered coordinates: one filled square per populated
/// cell plus a step polyline along Q_p = t* F_c when a line is given. Output is
/// a pure function of the inputs.
std::string render_matrix_svg(const OrderedMatrix& ordered,
                              const std::optional<BarrierLine>& line);
void write_matrix_svg(const OrderedMatrix& ordered, const std::optional<BarrierLine>& line,
                      const std::filesystem::path& path);

}  // namespace fitsink::cli
