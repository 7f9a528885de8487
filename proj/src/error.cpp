#include "momscale/error.hpp"

namespace momscale {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::file_not_found: return "FileNotFound";
    case Errc::parse_error: return "ParseError";
    case Errc::non_positive_price: return "NonPositivePrice";
    case Errc::non_monotonic_dates: return "NonMonotonicDates";
    case Errc::series_too_short: return "SeriesTooShort";
    case Errc::plan_infeasible: return "PlanInfeasible";
    case Errc::empty_window: return "EmptyWindow";
    case Errc::odd_order_unsupported: return "OddOrderUnsupported";
    case Errc::zero_variance: return "ZeroVariance";
    case Errc::no_usable_points: return "NoUsablePoints";
    case Errc::degenerate_design: return "DegenerateDesign";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::non_stationary_init: return "NonStationaryInit";
    case Errc::window_too_small: return "WindowTooSmall";
    case Errc::invalid_exponents: return "InvalidExponents";
    case Errc::threshold_below_support: return "ThresholdBelowSupport";
    case Errc::no_solution: return "NoSolution";
    case Errc::invalid_argument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> row)
    : std::runtime_error(message), code_(code), row_(row) {}

}  // namespace momscale
