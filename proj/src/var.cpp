#include "momscale/var.hpp"

#include "momscale/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace momscale {

namespace {

void require_confidence(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw Error(Errc::invalid_argument, fmt::format("confidence {} outside (0, 1)", confidence));
    }
}

double sorted_quantile(std::span<const double> sorted, double p) {
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    const double a = sorted[lo];
    const double b = sorted[lo + 1];
    // clamping keeps the estimate monotone in p under rounding
    return std::clamp(a + frac * (b - a), a, b);
}

}  // namespace

double empirical_quantile(std::span<const double> values, double p) {
    if (values.empty()) throw Error(Errc::empty_window, "quantile of an empty window");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::invalid_argument, "quantile level outside [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted_quantile(sorted, p);
}

std::size_t min_var_observations(double confidence) {
    require_confidence(confidence);
    // the slack keeps 1/(1-0.9) = 10.000000000000002 at 10
    return static_cast<std::size_t>(std::ceil(1.0 / (1.0 - confidence) - 1e-9));
}

double historical_var(std::span<const double> values, double confidence) {
    const auto needed = std::max<std::size_t>(2, min_var_observations(confidence));
    if (values.size() < needed) {
        throw Error(Errc::window_too_small,
                    fmt::format("{} returns; VaR at {} needs at least {}", values.size(), confidence, needed));
    }
    return -empirical_quantile(values, 1.0 - confidence);
}

VarCurve var_curve(const ReturnSeries& returns, const WindowPlan& plan, double confidence) {
    require_confidence(confidence);
    const auto windows = build_windows(returns, plan);
    VarCurve curve;
    curve.confidence = confidence;
    curve.plan = plan;
    curve.points.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        VarPoint point;
        point.index = i;
        point.N = windows[i].size();
        try {
            point.loss = historical_var(windows[i].values, confidence);
        } catch (const Error& e) {
            if (e.code() != Errc::window_too_small) throw;
            point.too_small = true;
            point.loss = std::numeric_limits<double>::quiet_NaN();
        }
        curve.points.push_back(point);
    }
    return curve;
}

void write_var_csv(std::ostream& out, const VarCurve& curve) {
    out << "index,N,var_loss,flag\n";
    for (const auto& p : curve.points) {
        if (p.too_small) {
            out << fmt::format("{},{},,window_too_small\n", p.index, p.N);
        } else {
            out << fmt::format("{},{},{:.17g},ok\n", p.index, p.N, p.loss);
        }
    }
}

nlohmann::json var_curve_json(const VarCurve& curve) {
    auto points = nlohmann::json::array();
    for (const auto& p : curve.points) {
        points.push_back({{"index", p.index},
                          {"N", p.N},
                          {"var_loss", p.too_small ? nlohmann::json(nullptr) : nlohmann::json(p.loss)},
                          {"flag", p.too_small ? "window_too_small" : "ok"}});
    }
    return {{"confidence", curve.confidence},
            {"plan",
             {{"start_fraction", curve.plan.start_fraction},
              {"step_fraction", curve.plan.step_fraction},
              {"anchor", anchor_name(curve.plan.anchor)},
              {"min_length", curve.plan.min_length}}},
            {"points", std::move(points)}};
}

}  // namespace momscale
