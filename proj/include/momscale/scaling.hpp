/**
 * @file scaling.hpp
 * @brief Log-log scaling lines between standardized moments.
 *
 * The relation Gamma_m = A * Gamma_4^B is a straight line in log space,
 *
 *     ln Gamma_m = B ln Gamma_4 + ln A,
 *
 * fitted by ordinary least squares. The two-regime fit splits the points,
 * ordered by window length, into a short-window and a long-window segment at
 * the single breakpoint that minimises the pooled sum of squared residuals.
 */

#pragma once

#include "momscale/moments.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"

namespace momscale {

struct LogLogPoint {
    std::size_t N = 0;
    double lx = 0.0;  ///< ln Gamma_4
    double ly = 0.0;  ///< ln Gamma_m
};

struct LogLogSet {
    int order = 6;
    std::vector<LogLogPoint> points;
    /// Records dropped: degenerate, shorter than min_window or non-positive Gamma.
    std::size_t excluded = 0;
};

/// One point per usable record, ordered by N. Throws NoUsablePoints when
/// nothing survives.
LogLogSet loglog_points(const std::vector<MomentRecord>& records, int order = 6, std::size_t min_window = 0);

struct ScalingLine {
    double B = 0.0;
    double lnA = 0.0;
    double sse = 0.0;
    std::size_t n_points = 0;
    /// Standard error of B; NaN with only two points.
    double slope_stderr = 0.0;
};

/// Throws TooFewPoints below 2 points, DegenerateDesign when every lx is equal.
ScalingLine fit_line(std::span<const LogLogPoint> points);

struct TwoRegimeFit {
    ScalingLine short_line;
    ScalingLine long_line;
    /// Number of points in the short segment.
    std::size_t split_index = 0;
    /// Window length of the first long-segment point.
    std::size_t split_N = 0;
    double total_sse = 0.0;
    /// SSE of one line through every point, for comparison.
    double single_sse = 0.0;
    /// False when |B_short - B_long| is within two combined standard errors.
    bool regimes_distinct = false;
};

/// Exhaustive single-breakpoint scan. Points are sorted by (N, lx, ly) first,
/// so input order is irrelevant. Candidate splits whose segments have no
/// spread in lx are skipped. Ties in SSE go to the smaller split.
TwoRegimeFit fit_two_regimes(std::vector<LogLogPoint> points, std::size_t min_segment = 10);

/// {pair, B_short, lnA_short, B_long, lnA_long, split_N, sse_short, sse_long,
///  excluded_points, ...}
nlohmann::json fit_report_json(const TwoRegimeFit& fit, int order, std::size_t excluded_points);

/// CSV: N,lx,ly,regime,fitted_ly
void write_plot_csv(std::ostream& out, std::span<const LogLogPoint> points, const TwoRegimeFit& fit);

}  // namespace momscale
