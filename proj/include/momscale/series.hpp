/**
 * @file series.hpp
 * @brief Dated price series, log returns and the growing-window ladder.
 *
 * Prices are indexed by trading day position: calendar gaps (weekends,
 * holidays) carry no weight, so a return is always "one step" apart from
 * its neighbour regardless of the dates involved.
 *
 * The window ladder truncates a return series to a small fraction of its
 * length and then grows it in fixed fractional increments until the whole
 * series is covered:
 *
 *     N_k = round_half_up((start + k * step) * L),  k = 0, 1, ...
 *
 * Lengths are deduplicated after rounding and the full series is always the
 * last window. All windows share one anchor: either they all begin on the
 * first return or they all end on the last one.
 */

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace momscale {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

/// Consecutive weekdays starting at `first` (moved forward to a weekday).
std::vector<Date> trading_calendar(Date first, std::size_t count);

class PriceSeries {
public:
    /// Validates: equal lengths, at least 2 rows, strictly increasing dates
    /// and strictly positive closes.
    PriceSeries(std::vector<Date> dates, std::vector<double> closes, std::string label = {});

    std::size_t size() const noexcept { return closes_.size(); }
    std::span<const Date> dates() const noexcept { return dates_; }
    std::span<const double> closes() const noexcept { return closes_; }
    const std::string& label() const noexcept { return label_; }

private:
    std::vector<Date> dates_;
    std::vector<double> closes_;
    std::string label_;
};

/// Log returns keyed by the date of the later close.
class ReturnSeries {
public:
    /// Validates equal lengths and finite values.
    ReturnSeries(std::vector<Date> dates, std::vector<double> values, std::string label = {});

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const Date> dates() const noexcept { return dates_; }
    std::span<const double> values() const noexcept { return values_; }
    const std::string& label() const noexcept { return label_; }

private:
    std::vector<Date> dates_;
    std::vector<double> values_;
    std::string label_;
};

/// Column names selecting the date and close fields of a headed CSV file.
struct PriceSchema {
    std::string date_column = "date";
    std::string close_column = "close";
};

/// Reads a headed CSV price file. Lines starting with '#' and blank lines are
/// ignored; every other row must parse. Rows are numbered from 1 after the
/// header in error reports.
PriceSeries load_prices(const std::filesystem::path& path, const PriceSchema& schema = {});
PriceSeries read_prices(std::istream& in, const PriceSchema& schema = {}, std::string label = {});

/// Reads the "date,log_return" export produced by write_returns_csv.
ReturnSeries load_returns(const std::filesystem::path& path);
ReturnSeries read_returns(std::istream& in, std::string label = {});

/// returns[i] = ln(close[i+1] / close[i]).
ReturnSeries log_returns(const PriceSeries& prices);

/// Writes "date,log_return" with 17 significant digits.
void write_returns_csv(std::ostream& out, const ReturnSeries& returns);

enum class Anchor { series_start, series_end };

std::string_view anchor_name(Anchor anchor) noexcept;
Anchor parse_anchor(std::string_view text);

struct WindowPlan {
    double start_fraction = 0.01;
    double step_fraction = 0.001;
    Anchor anchor = Anchor::series_start;
    std::size_t min_length = 2;

    void validate() const;
};

/// A contiguous view into a ReturnSeries; it must not outlive the series.
struct Window {
    Date t0;
    std::size_t offset = 0;
    std::span<const double> values;

    std::size_t size() const noexcept { return values.size(); }
};

/// Window lengths produced by `plan` for a series of `length` returns.
/// Throws PlanInfeasible when the first rung is shorter than plan.min_length.
std::vector<std::size_t> window_lengths(std::size_t length, const WindowPlan& plan);

std::vector<Window> build_windows(const ReturnSeries& returns, const WindowPlan& plan);

}  // namespace momscale
