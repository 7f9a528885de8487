#include "momscale/series.hpp"

#include "momscale/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace momscale {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        fields.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return fields;
}

bool parse_double(std::string_view text, double& value) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc{} && ptr == end;
}

bool is_skippable(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

// Table of (row number, fields) after the header, plus the header itself.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
};

CsvTable read_table(std::istream& in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t row = 0;
    bool first_line = true;
    while (std::getline(in, line)) {
        if (first_line) {
            // UTF-8 byte order mark
            if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            first_line = false;
        }
        if (is_skippable(line)) continue;
        auto fields = split_fields(line);
        if (!have_header) {
            for (auto f : fields) table.header.emplace_back(f);
            have_header = true;
            continue;
        }
        ++row;
        std::vector<std::string> owned(fields.begin(), fields.end());
        table.rows.emplace_back(row, std::move(owned));
    }
    if (!have_header) throw Error(Errc::parse_error, "missing CSV header", 0);
    return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
        throw Error(Errc::parse_error, fmt::format("header has no column '{}'", name), 0);
    }
    return static_cast<std::size_t>(it - table.header.begin());
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::file_not_found, fmt::format("cannot open '{}'", path.string()));
    return in;
}

}  // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const bool shape = text.size() == 10 && text[4] == '-' && text[7] == '-';
    auto num = [&](std::size_t pos, std::size_t len, auto& out) {
        const auto* b = text.data() + pos;
        const auto [ptr, ec] = std::from_chars(b, b + len, out);
        return ec == std::errc{} && ptr == b + len;
    };
    if (!shape || !num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) {
        throw Error(Errc::parse_error, fmt::format("invalid date '{}'", text));
    }
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) throw Error(Errc::parse_error, fmt::format("invalid date '{}'", text));
    return date;
}

std::string format_date(const Date& date) {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(date.year()),
                       static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

std::vector<Date> trading_calendar(Date first, std::size_t count) {
    using namespace std::chrono;
    std::vector<Date> dates;
    dates.reserve(count);
    sys_days day{first};
    while (dates.size() < count) {
        const weekday wd{day};
        if (wd != Saturday && wd != Sunday) dates.emplace_back(day);
        day += days{1};
    }
    return dates;
}

PriceSeries::PriceSeries(std::vector<Date> dates, std::vector<double> closes, std::string label)
    : dates_(std::move(dates)), closes_(std::move(closes)), label_(std::move(label)) {
    if (dates_.size() != closes_.size()) {
        throw Error(Errc::invalid_argument, "dates and closes differ in length");
    }
    if (closes_.size() < 2) {
        throw Error(Errc::series_too_short, "a price series needs at least 2 closes");
    }
    for (std::size_t i = 0; i < closes_.size(); ++i) {
        if (!(closes_[i] > 0.0) || !std::isfinite(closes_[i])) {
            throw Error(Errc::non_positive_price, fmt::format("close {} is not positive", closes_[i]), i + 1);
        }
        if (i > 0 && !(dates_[i - 1] < dates_[i])) {
            throw Error(Errc::non_monotonic_dates,
                        fmt::format("date {} does not follow {}", format_date(dates_[i]), format_date(dates_[i - 1])),
                        i + 1);
        }
    }
}

ReturnSeries::ReturnSeries(std::vector<Date> dates, std::vector<double> values, std::string label)
    : dates_(std::move(dates)), values_(std::move(values)), label_(std::move(label)) {
    if (dates_.size() != values_.size()) {
        throw Error(Errc::invalid_argument, "dates and returns differ in length");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(Errc::invalid_argument, "return is not finite", i + 1);
        }
    }
}

PriceSeries read_prices(std::istream& in, const PriceSchema& schema, std::string label) {
    const auto table = read_table(in);
    const auto date_col = column_index(table, schema.date_column);
    const auto close_col = column_index(table, schema.close_column);

    std::vector<Date> dates;
    std::vector<double> closes;
    dates.reserve(table.rows.size());
    closes.reserve(table.rows.size());
    for (const auto& [row, fields] : table.rows) {
        if (fields.size() != table.header.size()) {
            throw Error(Errc::parse_error,
                        fmt::format("row {}: expected {} fields, found {}", row, table.header.size(), fields.size()),
                        row);
        }
        Date date;
        try {
            date = parse_date(fields[date_col]);
        } catch (const Error& e) {
            throw Error(Errc::parse_error, fmt::format("row {}: {}", row, e.what()), row);
        }
        double close = 0.0;
        if (!parse_double(fields[close_col], close) || !std::isfinite(close)) {
            throw Error(Errc::parse_error, fmt::format("row {}: invalid close '{}'", row, fields[close_col]), row);
        }
        if (!(close > 0.0)) {
            throw Error(Errc::non_positive_price, fmt::format("row {}: close {} is not positive", row, close), row);
        }
        if (!dates.empty() && !(dates.back() < date)) {
            throw Error(Errc::non_monotonic_dates,
                        fmt::format("row {}: date {} does not follow {}", row, format_date(date),
                                    format_date(dates.back())),
                        row);
        }
        dates.push_back(date);
        closes.push_back(close);
    }
    return PriceSeries(std::move(dates), std::move(closes), std::move(label));
}

PriceSeries load_prices(const std::filesystem::path& path, const PriceSchema& schema) {
    auto in = open_input(path);
    return read_prices(in, schema, path.stem().string());
}

ReturnSeries read_returns(std::istream& in, std::string label) {
    const auto table = read_table(in);
    const auto date_col = column_index(table, "date");
    const auto value_col = column_index(table, "log_return");
    std::vector<Date> dates;
    std::vector<double> values;
    for (const auto& [row, fields] : table.rows) {
        if (fields.size() != table.header.size()) {
            throw Error(Errc::parse_error, fmt::format("row {}: wrong field count", row), row);
        }
        Date date;
        try {
            date = parse_date(fields[date_col]);
        } catch (const Error& e) {
            throw Error(Errc::parse_error, fmt::format("row {}: {}", row, e.what()), row);
        }
        double value = 0.0;
        if (!parse_double(fields[value_col], value) || !std::isfinite(value)) {
            throw Error(Errc::parse_error, fmt::format("row {}: invalid log return '{}'", row, fields[value_col]),
                        row);
        }
        if (!dates.empty() && !(dates.back() < date)) {
            throw Error(Errc::non_monotonic_dates, fmt::format("row {}: dates not increasing", row), row);
        }
        dates.push_back(date);
        values.push_back(value);
    }
    return ReturnSeries(std::move(dates), std::move(values), std::move(label));
}

ReturnSeries load_returns(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_returns(in, path.stem().string());
}

ReturnSeries log_returns(const PriceSeries& prices) {
    const auto closes = prices.closes();
    const auto dates = prices.dates();
    if (closes.size() < 2) throw Error(Errc::series_too_short, "need at least 2 prices");
    std::vector<Date> out_dates(dates.begin() + 1, dates.end());
    std::vector<double> values(closes.size() - 1);
    for (std::size_t i = 0; i + 1 < closes.size(); ++i) {
        values[i] = std::log(closes[i + 1] / closes[i]);
    }
    return ReturnSeries(std::move(out_dates), std::move(values), prices.label());
}

void write_returns_csv(std::ostream& out, const ReturnSeries& returns) {
    out << "date,log_return\n";
    const auto dates = returns.dates();
    const auto values = returns.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << format_date(dates[i]) << ',' << fmt::format("{:.17g}", values[i]) << '\n';
    }
}

std::string_view anchor_name(Anchor anchor) noexcept {
    return anchor == Anchor::series_start ? "series_start" : "series_end";
}

Anchor parse_anchor(std::string_view text) {
    if (text == "series_start" || text == "start") return Anchor::series_start;
    if (text == "series_end" || text == "end") return Anchor::series_end;
    throw Error(Errc::invalid_argument, fmt::format("unknown anchor '{}'", text));
}

void WindowPlan::validate() const {
    if (!(start_fraction > 0.0 && start_fraction <= 1.0)) {
        throw Error(Errc::invalid_argument, "start_fraction must lie in (0, 1]");
    }
    if (!(step_fraction > 0.0 && step_fraction <= 1.0)) {
        throw Error(Errc::invalid_argument, "step_fraction must lie in (0, 1]");
    }
    if (min_length < 1) throw Error(Errc::invalid_argument, "min_length must be at least 1");
    if ((1.0 - start_fraction) / step_fraction > 1e8) {
        throw Error(Errc::invalid_argument, "step_fraction too small: more than 1e8 rungs");
    }
}

std::vector<std::size_t> window_lengths(std::size_t length, const WindowPlan& plan) {
    plan.validate();
    const auto L = static_cast<double>(length);
    // round half up; the slack absorbs representation error in f * L
    auto rounded = [L](double f) {
        return static_cast<std::size_t>(std::min(L, std::floor(f * L + 0.5 + 1e-9)));
    };
    const auto first = rounded(plan.start_fraction);
    if (length == 0 || first < plan.min_length) {
        throw Error(Errc::plan_infeasible,
                    fmt::format("first window has {} returns, below the minimum of {}", first, plan.min_length));
    }
    std::vector<std::size_t> lengths;
    for (std::size_t k = 0;; ++k) {
        const double f = plan.start_fraction + static_cast<double>(k) * plan.step_fraction;
        if (f >= 1.0 - 1e-12) break;
        const auto n = rounded(f);
        if (n < plan.min_length) continue;
        if (lengths.empty() || n > lengths.back()) lengths.push_back(n);
    }
    if (lengths.empty() || lengths.back() != length) lengths.push_back(length);
    return lengths;
}

std::vector<Window> build_windows(const ReturnSeries& returns, const WindowPlan& plan) {
    const auto lengths = window_lengths(returns.size(), plan);
    const auto values = returns.values();
    const auto dates = returns.dates();
    std::vector<Window> windows;
    windows.reserve(lengths.size());
    for (const auto n : lengths) {
        const std::size_t offset = plan.anchor == Anchor::series_start ? 0 : values.size() - n;
        windows.push_back(Window{dates[offset], offset, values.subspan(offset, n)});
    }
    return windows;
}

}  // namespace momscale
