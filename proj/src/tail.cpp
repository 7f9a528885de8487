#include "momscale/tail.hpp"

#include "momscale/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>

namespace momscale {

namespace {

// integral_{lo}^{hi} u^(k-1) du for 0 < lo <= hi, written to avoid
// cancellation when hi/lo is close to one or k is close to zero.
double power_band(double lo, double hi, double k) {
    const double L = std::log(hi / lo);
    if (k == 0.0) return L;
    if (k > 0.0) return std::pow(hi, k) * -std::expm1(-k * L) / k;
    return std::pow(lo, k) * std::expm1(k * L) / k;
}

void require_geometry(const TailSpec& s) {
    if (!(s.x0 > 0.0 && s.x1 > s.x0 && std::isfinite(s.x1))) {
        throw Error(Errc::invalid_argument, fmt::format("need 0 < x0 < x1, got x0={} x1={}", s.x0, s.x1));
    }
}

void require_normalized(const TailSpec& s) {
    if (!s.normalized()) throw Error(Errc::invalid_argument, "tail spec is not normalized");
}

void require_threshold(const TailSpec& s, double t) {
    if (!(t >= s.x0)) {
        throw Error(Errc::threshold_below_support, fmt::format("threshold {} is below x0 = {}", t, s.x0));
    }
}

// P(|x| > x1), the mass of the outer band.
double outer_mass(const TailSpec& s) { return 2.0 * s.A * s.x1 / (s.gamma2 - 1.0); }

}  // namespace

void TailSpec::validate() const {
    require_geometry(*this);
    auto ok = [](double g) { return g > 3.0 && g < 5.0; };
    if (!ok(gamma1) || !ok(gamma2)) {
        throw Error(Errc::invalid_exponents,
                    fmt::format("exponents must satisfy 3 < gamma < 5, got {} and {}", gamma1, gamma2));
    }
    if (!(C > 0.0)) throw Error(Errc::invalid_argument, "C must be positive");
}

TailSpec normalize(TailSpec spec) {
    require_geometry(spec);
    if (!(spec.gamma1 > 1.0 && spec.gamma2 > 1.0)) {
        throw Error(Errc::invalid_exponents, "tail exponents must exceed 1 for a normalizable density");
    }
    const double inner = spec.x1 * power_band(spec.x0 / spec.x1, 1.0, 1.0 - spec.gamma1);
    const double outer = spec.x1 / (spec.gamma2 - 1.0);
    spec.A = 1.0 / (2.0 * (inner + outer));
    return spec;
}

double tail_density(const TailSpec& spec, double x) {
    require_normalized(spec);
    const double ax = std::abs(x);
    if (ax < spec.x0) return 0.0;
    const double g = ax < spec.x1 ? spec.gamma1 : spec.gamma2;
    return spec.A * std::pow(ax / spec.x1, -g);
}

double tail_prob(const TailSpec& spec, double threshold) {
    require_normalized(spec);
    require_threshold(spec, threshold);
    if (threshold >= spec.x1) {
        return outer_mass(spec) * std::pow(threshold / spec.x1, 1.0 - spec.gamma2);
    }
    const double inner = spec.x1 * power_band(threshold / spec.x1, 1.0, 1.0 - spec.gamma1);
    return 2.0 * spec.A * inner + outer_mass(spec);
}

double tail_quantile(const TailSpec& spec, double q) {
    require_normalized(spec);
    if (!(q > 0.0 && q <= 1.0)) throw Error(Errc::invalid_argument, fmt::format("tail probability {} outside (0, 1]", q));
    const double p1 = outer_mass(spec);
    if (q <= p1) return spec.x1 * std::pow(q / p1, 1.0 / (1.0 - spec.gamma2));
    // (t/x1)^(1-gamma1) = 1 + (gamma1-1)(q - p1)/(2 A x1)
    const double z = (spec.gamma1 - 1.0) * (q - p1) / (2.0 * spec.A * spec.x1);
    const double t = spec.x1 * std::exp(std::log1p(z) / (1.0 - spec.gamma1));
    return std::clamp(t, spec.x0, spec.x1);
}

std::string_view regime_name(TailRegime regime) noexcept {
    return regime == TailRegime::inner ? "inner" : "outer";
}

CutoffSolution solve_xw(const TailSpec& spec, double N) {
    require_normalized(spec);
    if (!(N >= 1.0)) throw Error(Errc::invalid_argument, fmt::format("window length {} below 1", N));
    if (!(spec.C < N)) {
        throw Error(Errc::no_solution, fmt::format("C = {} is not below N = {}: no cutoff above x0", spec.C, N));
    }
    CutoffSolution sol;
    sol.N = N;
    sol.x_W = tail_quantile(spec, spec.C / N);
    sol.regime = sol.x_W < spec.x1 ? TailRegime::inner : TailRegime::outer;
    return sol;
}

double window_for_cutoff(const TailSpec& spec, double x_W) { return spec.C / tail_prob(spec, x_W); }

double truncated_moment(const TailSpec& spec, double x_W, int n) {
    require_normalized(spec);
    require_threshold(spec, x_W);
    if (n < 0 || n % 2 != 0) throw Error(Errc::odd_order_unsupported, fmt::format("order {} is not even", n));
    const double scale = 2.0 * spec.A * std::pow(spec.x1, n + 1);
    const double k1 = n + 1.0 - spec.gamma1;
    const double k2 = n + 1.0 - spec.gamma2;
    const double top = std::min(x_W, spec.x1) / spec.x1;
    double sum = power_band(spec.x0 / spec.x1, top, k1);
    if (x_W > spec.x1) sum += power_band(1.0, x_W / spec.x1, k2);
    return scale * sum;
}

std::vector<GammaPoint> gamma_curve(const TailSpec& spec, std::span<const double> N_values) {
    require_normalized(spec);
    std::vector<GammaPoint> curve;
    curve.reserve(N_values.size());
    for (const double N : N_values) {
        const auto cut = solve_xw(spec, N);
        const double m2 = truncated_moment(spec, cut.x_W, 2);
        const double m4 = truncated_moment(spec, cut.x_W, 4);
        const double m6 = truncated_moment(spec, cut.x_W, 6);
        curve.push_back({N, cut.x_W, cut.regime, m4 / (m2 * m2), m6 / (m2 * m2 * m2)});
    }
    return curve;
}

TailPrediction predicted_exponents(const TailSpec& spec) {
    auto ok = [](double g) { return g > 3.0 && g < 5.0; };
    if (!ok(spec.gamma1) || !ok(spec.gamma2)) {
        throw Error(Errc::invalid_exponents, "scaling exponents need 3 < gamma < 5");
    }
    auto exponent = [](double g) { return (7.0 - g) / (5.0 - g); };
    return TailPrediction{exponent(spec.gamma1), exponent(spec.gamma2), std::nullopt, std::nullopt};
}

std::vector<double> cutoff_sweep(const TailSpec& spec, double x_lo, double x_hi, std::size_t count) {
    require_normalized(spec);
    require_threshold(spec, x_lo);
    auto Ns = log_spaced(x_lo, x_hi, count);
    for (auto& v : Ns) v = window_for_cutoff(spec, v);
    return Ns;
}

RegimeSlopes fit_regime_slopes(const TailSpec& spec, std::span<const GammaPoint> curve) {
    const double inner_lo = std::sqrt(spec.x0 * spec.x1);
    const double outer_lo = 10.0 * spec.x1;
    std::vector<LogLogPoint> inner;
    std::vector<LogLogPoint> outer;
    for (const auto& p : curve) {
        const LogLogPoint pt{static_cast<std::size_t>(std::min(p.N, 1e18)), std::log(p.gamma4), std::log(p.gamma6)};
        if (p.x_W >= inner_lo && p.x_W < spec.x1) inner.push_back(pt);
        if (p.x_W >= outer_lo) outer.push_back(pt);
    }
    RegimeSlopes out;
    out.prediction = predicted_exponents(spec);
    out.short_line = fit_line(inner);
    out.long_line = fit_line(outer);
    out.prediction.prefactor_short = std::exp(out.short_line.lnA);
    out.prediction.prefactor_long = std::exp(out.long_line.lnA);
    return out;
}

std::vector<double> sample_tail(const TailSpec& spec, std::size_t count, std::uint64_t seed) {
    require_normalized(spec);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> draws;
    draws.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double q = 1.0 - unit(rng);  // (0, 1]
        const double magnitude = tail_quantile(spec, q);
        draws.push_back(unit(rng) < 0.5 ? -magnitude : magnitude);
    }
    return draws;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi >= lo) || count < 2) {
        throw Error(Errc::invalid_argument, "log_spaced needs 0 < lo <= hi and count >= 2");
    }
    std::vector<double> out(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

nlohmann::json tail_spec_json(const TailSpec& spec) {
    return {{"x0", spec.x0}, {"x1", spec.x1}, {"gamma1", spec.gamma1}, {"gamma2", spec.gamma2}, {"C", spec.C}};
}

void tail_spec_from_json(const nlohmann::json& j, TailSpec& spec) {
    for (auto [key, field] : {std::pair{"x0", &spec.x0}, {"x1", &spec.x1}, {"gamma1", &spec.gamma1},
                              {"gamma2", &spec.gamma2}, {"C", &spec.C}}) {
        if (j.contains(key)) *field = j.at(key).get<double>();
    }
    spec.A = 0.0;
}

void write_gamma_curve_csv(std::ostream& out, std::span<const GammaPoint> curve) {
    out << "N,x_W,regime,gamma4,gamma6\n";
    for (const auto& p : curve) {
        out << fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g}\n", p.N, p.x_W, regime_name(p.regime), p.gamma4,
                           p.gamma6);
    }
}

}  // namespace momscale
