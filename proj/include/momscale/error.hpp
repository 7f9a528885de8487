#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace momscale {

enum class Errc {
    file_not_found,
    parse_error,
    non_positive_price,
    non_monotonic_dates,
    series_too_short,
    plan_infeasible,
    empty_window,
    odd_order_unsupported,
    zero_variance,
    no_usable_points,
    degenerate_design,
    too_few_points,
    non_stationary_init,
    window_too_small,
    invalid_exponents,
    threshold_below_support,
    no_solution,
    invalid_argument,
};

/// Stable CamelCase name, used in machine-readable error output.
std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library. `row()` is the 1-based data row
/// (header excluded) for ingestion errors.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::optional<std::size_t> row = std::nullopt);

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> row() const noexcept { return row_; }

private:
    Errc code_;
    std::optional<std::size_t> row_;
};

}  // namespace momscale
