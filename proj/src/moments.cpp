#include "momscale/moments.hpp"

#include "momscale/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace momscale {

namespace {

void require_even_order(int n) {
    if (n < 2 || n % 2 != 0) {
        throw Error(Errc::odd_order_unsupported, fmt::format("order {} is not an even order >= 2", n));
    }
}

bool all_equal(std::span<const double> values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *lo == *hi;
}

// Sum of (x - mu)^n for every n in `orders` (sorted, even), in one sweep.
std::map<int, double> centred_sums(std::span<const double> values, double mu, std::span<const int> orders) {
    const int max_order = orders.empty() ? 2 : std::max(2, *std::max_element(orders.begin(), orders.end()));
    const int half = max_order / 2;
    std::vector<double> sums(static_cast<std::size_t>(half) + 1, 0.0);
    for (const double x : values) {
        const double d = x - mu;
        const double d2 = d * d;
        double p = d2;
        for (int k = 1; k <= half; ++k) {
            sums[static_cast<std::size_t>(k)] += p;
            p *= d2;
        }
    }
    std::map<int, double> out;
    const auto n = static_cast<double>(values.size());
    out[2] = sums[1] / n;
    for (const int order : orders) out[order] = sums[static_cast<std::size_t>(order / 2)] / n;
    return out;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

double mean(std::span<const double> values) {
    if (values.empty()) throw Error(Errc::empty_window, "mean of an empty window");
    double sum = 0.0;
    for (const double x : values) sum += x;
    return sum / static_cast<double>(values.size());
}

double central_moment(std::span<const double> values, int n) {
    if (values.size() < 2) throw Error(Errc::empty_window, "central moments need at least 2 values");
    require_even_order(n);
    const int orders[] = {n};
    return centred_sums(values, mean(values), orders).at(n);
}

double standardized_moment(std::span<const double> values, int n) {
    if (values.size() < 2) throw Error(Errc::empty_window, "standardized moments need at least 2 values");
    require_even_order(n);
    if (all_equal(values)) throw Error(Errc::zero_variance, "window has zero variance");
    const int orders[] = {n};
    const auto m = centred_sums(values, mean(values), orders);
    return m.at(n) / std::pow(m.at(2), n / 2);
}

double gaussian_moment(int n) {
    require_even_order(n);
    double product = 1.0;
    for (int k = n - 1; k > 1; k -= 2) product *= k;
    return product;
}

double gaussian_ratio(std::span<const double> values, int n) {
    return gaussian_moment(n) / standardized_moment(values, n);
}

double gaussian_ratio_of(double gamma_n, int n) {
    if (!(gamma_n > 0.0)) throw Error(Errc::invalid_argument, "standardized moment must be positive");
    return gaussian_moment(n) / gamma_n;
}

std::map<int, double> gaussian_moment_table(int max_order) {
    std::map<int, double> table;
    for (int n = 2; n <= max_order; n += 2) table[n] = gaussian_moment(n);
    return table;
}

MomentRecord moment_record(const Window& window, std::span<const int> orders) {
    for (const int n : orders) require_even_order(n);
    if (window.size() < 2) throw Error(Errc::empty_window, "windows need at least 2 values");
    MomentRecord rec;
    rec.t0 = window.t0;
    rec.N = window.size();
    rec.mu = mean(window.values);
    rec.central = centred_sums(window.values, rec.mu, orders);
    rec.degenerate = all_equal(window.values) || !(rec.central.at(2) > 0.0);
    if (rec.degenerate) return rec;
    const double var = rec.central.at(2);
    for (const auto& [n, m] : rec.central) {
        rec.gamma[n] = n == 2 ? 1.0 : m / std::pow(var, n / 2);
    }
    return rec;
}

std::vector<MomentRecord> moment_profile(const ReturnSeries& returns, const WindowPlan& plan,
                                         std::span<const int> orders, const ProfileOptions& options) {
    for (const int n : orders) require_even_order(n);
    const auto windows = build_windows(returns, plan);
    std::vector<MomentRecord> records(windows.size());

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, windows.size()));
    // Strided assignment balances the growing window lengths; each slot is
    // written by exactly one worker so the result is order-independent.
    auto work = [&](unsigned worker) {
        for (std::size_t i = worker; i < windows.size(); i += threads) {
            records[i] = moment_record(windows[i], orders);
        }
    };
    if (threads <= 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    return records;
}

void write_moments_csv(std::ostream& out, const std::vector<MomentRecord>& records, std::span<const int> orders) {
    out << "t0,N,mu,degenerate";
    for (const int n : orders) out << ",gamma_" << n;
    out << '\n';
    for (const auto& r : records) {
        out << format_date(r.t0) << ',' << r.N << ',' << num(r.mu) << ',' << (r.degenerate ? 1 : 0);
        for (const int n : orders) {
            out << ',';
            if (!r.degenerate) out << num(r.gamma.at(n));
        }
        out << '\n';
    }
}

nlohmann::json moments_to_json(const std::vector<MomentRecord>& records, std::span<const int> orders) {
    auto rows = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json row{{"t0", format_date(r.t0)}, {"N", r.N}, {"mu", r.mu}, {"degenerate", r.degenerate}};
        for (const int n : orders) {
            const auto key = fmt::format("gamma_{}", n);
            row[key] = r.degenerate ? nlohmann::json(nullptr) : nlohmann::json(r.gamma.at(n));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_ratios_csv(std::ostream& out, const std::vector<MomentRecord>& records, std::span<const int> orders) {
    out << "t0,N";
    for (const int n : orders) out << ",R_" << n;
    out << '\n';
    for (const auto& r : records) {
        out << format_date(r.t0) << ',' << r.N;
        for (const int n : orders) {
            out << ',';
            if (!r.degenerate) out << num(gaussian_ratio_of(r.gamma.at(n), n));
        }
        out << '\n';
    }
}

nlohmann::json ratios_to_json(const std::vector<MomentRecord>& records, std::span<const int> orders) {
    auto rows = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json row{{"t0", format_date(r.t0)}, {"N", r.N}};
        for (const int n : orders) {
            const auto key = fmt::format("R_{}", n);
            row[key] = r.degenerate ? nlohmann::json(nullptr) : nlohmann::json(gaussian_ratio_of(r.gamma.at(n), n));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace momscale
