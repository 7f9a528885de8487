#pragma once

#include "momscale/series.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"

namespace momscale {

/// Empirical quantile with linear interpolation between order statistics at
/// plotting positions (k-1)/(n-1) ("type 7"). p in [0, 1].
double empirical_quantile(std::span<const double> values, double p);

/// Smallest window that supports a historical VaR at `confidence`:
/// ceil(1 / (1 - confidence)).
std::size_t min_var_observations(double confidence);

/// Historical VaR as a positive loss: minus the (1 - confidence) quantile.
/// Throws WindowTooSmall below min_var_observations(confidence).
double historical_var(std::span<const double> values, double confidence);

struct VarPoint {
    std::size_t index = 0;  ///< position in the window ladder
    std::size_t N = 0;
    double loss = 0.0;      ///< NaN when too_small
    bool too_small = false;
};

struct VarCurve {
    std::vector<VarPoint> points;
    double confidence = 0.90;
    WindowPlan plan;
};

VarCurve var_curve(const ReturnSeries& returns, const WindowPlan& plan, double confidence = 0.90);

/// CSV: index,N,var_loss,flag  (flag is "ok" or "window_too_small")
void write_var_csv(std::ostream& out, const VarCurve& curve);
nlohmann::json var_curve_json(const VarCurve& curve);

}  // namespace momscale
