/**
 * @file moments.hpp
 * @brief Population central and standardized moments of return windows.
 *
 * For a window x_1..x_N:
 *
 *     mu      = (1/N) sum x_i
 *     m_n     = (1/N) sum (x_i - mu)^n
 *     Gamma_n = m_n / m_2^(n/2)
 *
 * No small-sample correction is applied. Only even orders are supported.
 * Moments are computed in two passes (mean first, then centred powers), which
 * keeps order-12 moments free of the cancellation a raw-moment expansion
 * suffers from.
 */

#pragma once

#include "momscale/series.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "json.hpp"

namespace momscale {

double mean(std::span<const double> values);

/// Throws EmptyWindow for fewer than 2 values, OddOrderUnsupported for odd
/// or non-positive n.
double central_moment(std::span<const double> values, int n);

/// Throws ZeroVariance when every value is equal.
double standardized_moment(std::span<const double> values, int n);

/// (n-1)!! for even n >= 2.
double gaussian_moment(int n);

/// Gaussian reference divided by the empirical standardized moment.
double gaussian_ratio(std::span<const double> values, int n);
/// Same ratio for an already computed Gamma_n (for stored moment tables).
double gaussian_ratio_of(double gamma_n, int n);

/// Gaussian reference values for even orders 2..max_order.
std::map<int, double> gaussian_moment_table(int max_order = 12);

struct MomentRecord {
    Date t0;
    std::size_t N = 0;
    double mu = 0.0;
    std::map<int, double> central;
    std::map<int, double> gamma;
    /// Set when the window has zero variance; `gamma` is empty then.
    bool degenerate = false;
};

/// Computes mean, order-2 and requested central moments and Gamma_n for one
/// window. Degenerate windows come back flagged rather than throwing.
MomentRecord moment_record(const Window& window, std::span<const int> orders);

struct ProfileOptions {
    /// 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// One record per window of `plan`, in window order.
std::vector<MomentRecord> moment_profile(const ReturnSeries& returns, const WindowPlan& plan,
                                         std::span<const int> orders, const ProfileOptions& options = {});

/// CSV columns: t0,N,mu,degenerate,gamma_<n>... (17 significant digits).
void write_moments_csv(std::ostream& out, const std::vector<MomentRecord>& records, std::span<const int> orders);
nlohmann::json moments_to_json(const std::vector<MomentRecord>& records, std::span<const int> orders);

/// CSV columns: t0,N,R_<n>... ; degenerate windows are written with empty cells.
void write_ratios_csv(std::ostream& out, const std::vector<MomentRecord>& records, std::span<const int> orders);
nlohmann::json ratios_to_json(const std::vector<MomentRecord>& records, std::span<const int> orders);

}  // namespace momscale
