/**
 * @file tail.hpp
 * @brief Two-exponent Pareto tail model of rare and very rare events.
 *
 * The return density is even and vanishes below x0:
 *
 *     p(x) = 0                          |x| < x0
 *     p(x) = A |x / x1|^(-gamma1)       x0 < |x| < x1
 *     p(x) = A |x / x1|^(-gamma2)       |x| > x1
 *
 * A is fixed by total probability one. A window of N trading days is taken to
 * see no returns beyond the cutoff x_W where the expected count of larger
 * moves, N * P(|x| > x_W), equals C. Moments inside the window are the
 * truncated moments
 *
 *     <x^n> = 2 * integral_{x0}^{x_W} x^n p(x) dx,
 *
 * which are not renormalised by the truncated mass. Because p is even the
 * mean is zero, so these raw moments are the central moments.
 *
 * With 3 < gamma < 5 the curve ln Gamma_6 against ln Gamma_4 tends to slope
 * (7 - gamma1)/(5 - gamma1) while x0 << x_W << x1 and to (7 - gamma2)/(5 - gamma2)
 * once x_W >> x1. Every integral here is evaluated in closed form.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "momscale/scaling.hpp"

#include "json.hpp"

namespace momscale {

struct TailSpec {
    double x0 = 1e-3;
    double x1 = 1e-1;
    double gamma1 = 4.5;
    double gamma2 = 3.5;
    double C = 1.0;
    /// Density amplitude; 0 until normalize() sets it.
    double A = 0.0;

    bool normalized() const noexcept { return A > 0.0; }
    /// Full model domain: 0 < x0 < x1, 3 < gamma1, gamma2 < 5, C > 0.
    void validate() const;
};

/// Sets A so the density integrates to one. Requires 0 < x0 < x1 and
/// gamma > 1 for both exponents (InvalidExponents otherwise).
TailSpec normalize(TailSpec spec);

/// p(x) for any real x (even in x).
double tail_density(const TailSpec& spec, double x);

/// P(|x| > threshold) = 2 * integral_threshold^inf p(x) dx. threshold >= x0.
double tail_prob(const TailSpec& spec, double threshold);

/// Threshold t with tail_prob(t) = q, for q in (0, 1].
double tail_quantile(const TailSpec& spec, double q);

enum class TailRegime { inner, outer };
std::string_view regime_name(TailRegime regime) noexcept;

struct CutoffSolution {
    double N = 0.0;
    double x_W = 0.0;
    TailRegime regime = TailRegime::inner;
};

/// Solves N * tail_prob(x_W) = C. Throws NoSolution when C >= N.
CutoffSolution solve_xw(const TailSpec& spec, double N);

/// Window length whose cutoff is `x_W`: N = C / tail_prob(x_W).
double window_for_cutoff(const TailSpec& spec, double x_W);

/// 2 * integral_{x0}^{x_W} x^n p(x) dx for even n >= 0.
double truncated_moment(const TailSpec& spec, double x_W, int n);

struct GammaPoint {
    double N = 0.0;
    double x_W = 0.0;
    TailRegime regime = TailRegime::inner;
    double gamma4 = 0.0;
    double gamma6 = 0.0;
};

std::vector<GammaPoint> gamma_curve(const TailSpec& spec, std::span<const double> N_values);

struct TailPrediction {
    double exponent_short = 0.0;
    double exponent_long = 0.0;
    /// exp(lnA) of fitted short/long lines, once a fit has been made.
    std::optional<double> prefactor_short;
    std::optional<double> prefactor_long;
};

/// (7 - gamma)/(5 - gamma) for each exponent. Throws InvalidExponents
/// outside 3 < gamma < 5.
TailPrediction predicted_exponents(const TailSpec& spec);

/// Window lengths placing x_W at `count` log-spaced cutoffs in [x_lo, x_hi].
std::vector<double> cutoff_sweep(const TailSpec& spec, double x_lo, double x_hi, std::size_t count);

struct RegimeSlopes {
    ScalingLine short_line;
    ScalingLine long_line;
    TailPrediction prediction;  ///< exponents plus fitted prefactors
};

/// Fits ln Gamma_6 against ln Gamma_4 separately over the asymptotic part of
/// each regime: x_W in [sqrt(x0 x1), x1) for the short windows and
/// x_W >= 10 x1 for the long ones.
RegimeSlopes fit_regime_slopes(const TailSpec& spec, std::span<const GammaPoint> curve);

/// i.i.d. draws from p by inverse CDF, random sign.
std::vector<double> sample_tail(const TailSpec& spec, std::size_t count, std::uint64_t seed);

/// `count` values spaced evenly in log between lo and hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

nlohmann::json tail_spec_json(const TailSpec& spec);
/// Absent fields keep the values already in `spec`; A is cleared.
void tail_spec_from_json(const nlohmann::json& j, TailSpec& spec);

/// CSV: N,x_W,regime,gamma4,gamma6
void write_gamma_curve_csv(std::ostream& out, std::span<const GammaPoint> curve);

}  // namespace momscale
