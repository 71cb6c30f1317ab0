#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "fitsink/core_model.hpp"
#include "fitsink/fc_solver.hpp"
#include "fitsink/sk_solver.hpp"

namespace fitsink {

/// Parses "normalization", "dummy", "reference-row:LABEL" or
/// "reference-col:LABEL". Throws InvalidArgument otherwise.
GaugeSpec parse_gauge(std::string_view text, double target_value = 1.0);
std::string format_gauge(const GaugeSpec& gauge);

/// (F, Q) -> (alpha F, alpha Q), i.e. x -> x / alpha and y -> y alpha for
/// x = 1 / F and y = Q. Orderings are unchanged.
std::pair<Eigen::VectorXd, Eigen::VectorXd> rescale(const Eigen::VectorXd& fitness,
                                                    const Eigen::VectorXd& complexity,
                                                    double alpha);

// Label given to the all-ones row added by the dummy-country gauge.
inline constexpr std::string_view kDummyCountryLabel = "__dummy__";

/// Re-expresses a solution in the requested gauge.
///
///  - normalization: mean(F) = target_value.
///  - dummy_country: solve the matrix with an extra all-ones row (using
///    options), scale so the dummy's fitness equals target_value, then drop
///    the dummy. F, Q and the convergence metadata come from that solve.
///  - reference_row / reference_col: scale so the named country's F (or
///    product's Q) equals target_value; UnknownLabel if absent.
FCResult apply_gauge(const FCResult& result, const BipartiteMatrix& matrix, const GaugeSpec& gauge,
                     const FCOptions& options = {});

struct EquivalenceReport {
  // Empty when an input has zero variance (constant_input is then set).
  std::optional<double> spearman_F_vs_inv_u;
  std::optional<double> pearson_logF_vs_neg_logu;
  std::optional<double> pearson_Q_vs_v_after_gauge;
  // Pearson(F, u) taken literally; negative when F is proportional to 1/u.
  std::optional<double> pearson_F_vs_u;
  // min over beta of max_c |F_c u_c beta - 1|, and the minimising beta.
  double max_relative_gap_after_gauge = 0.0;
  double gauge_beta = 1.0;
  bool constant_input = false;

  friend bool operator==(const EquivalenceReport&, const EquivalenceReport&) = default;
};

/// Compares an FC solution with an SK solution of the same matrix (default
/// targets). Rows with zero fitness are left out. DimensionMismatch if the
/// shapes differ.
EquivalenceReport equivalence_report(const FCResult& fc, const ScalingSolution& sk);

}  // namespace fitsink
