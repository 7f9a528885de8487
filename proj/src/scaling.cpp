#include "momscale/scaling.hpp"

#include "momscale/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace momscale {

LogLogSet loglog_points(const std::vector<MomentRecord>& records, int order, std::size_t min_window) {
    if (order < 2 || order % 2 != 0) {
        throw Error(Errc::odd_order_unsupported, fmt::format("order {} is not even", order));
    }
    LogLogSet set;
    set.order = order;
    for (const auto& r : records) {
        if (r.degenerate || r.N < min_window) {
            ++set.excluded;
            continue;
        }
        const auto g4 = r.gamma.find(4);
        const auto gm = r.gamma.find(order);
        if (g4 == r.gamma.end() || gm == r.gamma.end()) {
            throw Error(Errc::invalid_argument, fmt::format("record lacks Gamma_4 or Gamma_{}", order));
        }
        const double lx = std::log(g4->second);
        const double ly = std::log(gm->second);
        if (!std::isfinite(lx) || !std::isfinite(ly)) {
            ++set.excluded;
            continue;
        }
        set.points.push_back({r.N, lx, ly});
    }
    if (set.points.empty()) throw Error(Errc::no_usable_points, "no usable moment records");
    std::stable_sort(set.points.begin(), set.points.end(),
                     [](const LogLogPoint& a, const LogLogPoint& b) { return a.N < b.N; });
    return set;
}

ScalingLine fit_line(std::span<const LogLogPoint> points) {
    if (points.size() < 2) throw Error(Errc::too_few_points, "a line needs at least 2 points");
    const auto n = static_cast<double>(points.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& p : points) {
        mx += p.lx;
        my += p.ly;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& p : points) {
        const double dx = p.lx - mx;
        sxx += dx * dx;
        sxy += dx * (p.ly - my);
    }
    if (!(sxx > 0.0)) throw Error(Errc::degenerate_design, "all ln Gamma_4 values are equal");

    ScalingLine line;
    line.B = sxy / sxx;
    line.lnA = my - line.B * mx;
    line.n_points = points.size();
    for (const auto& p : points) {
        const double r = p.ly - (line.B * p.lx + line.lnA);
        line.sse += r * r;
    }
    line.slope_stderr = points.size() > 2 ? std::sqrt(line.sse / (n - 2.0) / sxx)
                                          : std::numeric_limits<double>::quiet_NaN();
    return line;
}

namespace {

bool has_spread(std::span<const LogLogPoint> segment) {
    const auto [lo, hi] = std::minmax_element(segment.begin(), segment.end(),
                                              [](const auto& a, const auto& b) { return a.lx < b.lx; });
    return lo->lx != hi->lx;
}

}  // namespace

TwoRegimeFit fit_two_regimes(std::vector<LogLogPoint> points, std::size_t min_segment) {
    min_segment = std::max<std::size_t>(min_segment, 2);
    if (points.size() < 2 * min_segment) {
        throw Error(Errc::too_few_points,
                    fmt::format("{} points cannot form two segments of {}", points.size(), min_segment));
    }
    std::sort(points.begin(), points.end(), [](const LogLogPoint& a, const LogLogPoint& b) {
        if (a.N != b.N) return a.N < b.N;
        if (a.lx != b.lx) return a.lx < b.lx;
        return a.ly < b.ly;
    });

    const std::span<const LogLogPoint> all(points);
    TwoRegimeFit best;
    best.total_sse = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t k = min_segment; k + min_segment <= points.size(); ++k) {
        const auto head = all.first(k);
        const auto tail = all.subspan(k);
        if (!has_spread(head) || !has_spread(tail)) continue;
        const auto s = fit_line(head);
        const auto l = fit_line(tail);
        const double total = s.sse + l.sse;
        if (total < best.total_sse) {
            best.short_line = s;
            best.long_line = l;
            best.split_index = k;
            best.split_N = points[k].N;
            best.total_sse = total;
            found = true;
        }
    }
    if (!found) throw Error(Errc::degenerate_design, "no admissible split has spread in ln Gamma_4");

    best.single_sse = fit_line(all).sse;
    const double se = std::hypot(best.short_line.slope_stderr, best.long_line.slope_stderr);
    best.regimes_distinct = std::isfinite(se) && std::abs(best.short_line.B - best.long_line.B) > 2.0 * se;
    return best;
}

nlohmann::json fit_report_json(const TwoRegimeFit& fit, int order, std::size_t excluded_points) {
    return nlohmann::json{
        {"pair", {4, order}},
        {"B_short", fit.short_line.B},
        {"lnA_short", fit.short_line.lnA},
        {"B_long", fit.long_line.B},
        {"lnA_long", fit.long_line.lnA},
        {"split_N", fit.split_N},
        {"split_index", fit.split_index},
        {"sse_short", fit.short_line.sse},
        {"sse_long", fit.long_line.sse},
        {"total_sse", fit.total_sse},
        {"sse_single", fit.single_sse},
        {"n_short", fit.short_line.n_points},
        {"n_long", fit.long_line.n_points},
        {"B_short_stderr", fit.short_line.slope_stderr},
        {"B_long_stderr", fit.long_line.slope_stderr},
        {"regimes_distinct", fit.regimes_distinct},
        {"excluded_points", excluded_points},
        {"breakpoint_method", "single breakpoint, minimum pooled SSE"},
    };
}

void write_plot_csv(std::ostream& out, std::span<const LogLogPoint> points, const TwoRegimeFit& fit) {
    out << "N,lx,ly,regime,fitted_ly\n";
    for (const auto& p : points) {
        const bool is_long = p.N >= fit.split_N;
        const auto& line = is_long ? fit.long_line : fit.short_line;
        out << fmt::format("{},{:.17g},{:.17g},{},{:.17g}\n", p.N, p.lx, p.ly, is_long ? "long" : "short",
                           line.B * p.lx + line.lnA);
    }
}

}  // namespace momscale
