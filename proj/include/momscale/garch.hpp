/**
 * @file garch.hpp
 * @brief GARCH(1,1) with two-component gaussian mixture innovations.
 *
 *     sigma_t^2 = alpha0 + alpha1 * x_{t-1}^2 + beta1 * sigma_{t-1}^2
 *     x_t       = chi_t * sigma_t
 *
 * chi_t is zero-mean with density a N(0, var1) + b N(0, var2).
 *
 * Randomness comes from std::mt19937_64 seeded with the caller's seed; the
 * same (spec, T, seed) reproduces the same series bit for bit on one
 * standard library build.
 */

#pragma once

#include "momscale/series.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include "json.hpp"

namespace momscale {

using Rng = std::mt19937_64;

struct MixtureSpec {
    double a = 0.9818;
    double b = 0.0182;
    double var1 = 0.833;
    double var2 = 9.986;

    void validate() const;
};

struct GarchSpec {
    double alpha0 = 1e-5;
    double alpha1 = 0.5;
    double beta1 = 0.0;
    std::size_t burn_in = 500;
    /// Initial sigma_0^2; empty selects alpha0 / (1 - alpha1 - beta1).
    std::optional<double> init_var;

    void validate() const;
    /// Throws NonStationaryInit when the unconditional level does not exist.
    double initial_variance() const;
};

double mixture_variance(const MixtureSpec& m);
/// 3 (a var1^2 + b var2^2) / (a var1 + b var2)^2
double mixture_kurtosis(const MixtureSpec& m);
/// Two-sided mixture CDF.
double mixture_cdf(const MixtureSpec& m, double x);

/// Stateful sampler; keeps the normal generator's cached variate between draws.
class MixtureSampler {
public:
    explicit MixtureSampler(const MixtureSpec& spec);
    double operator()(Rng& rng);

private:
    MixtureSpec spec_;
    double sd1_;
    double sd2_;
    std::uniform_real_distribution<double> pick_{0.0, 1.0};
    std::normal_distribution<double> z_{0.0, 1.0};
};

/// One draw: component 1 with probability a, else component 2.
double sample_mixture(const MixtureSpec& m, Rng& rng);

/// T returns after discarding g.burn_in steps. Dates are synthetic weekdays
/// starting 2000-01-03.
ReturnSeries simulate(const GarchSpec& g, const MixtureSpec& m, std::size_t T, std::uint64_t seed);

nlohmann::json garch_spec_json(const GarchSpec& g, const MixtureSpec& m, std::uint64_t seed);
/// Reads the fields written by garch_spec_json; absent fields keep `g`/`m` values.
void garch_spec_from_json(const nlohmann::json& j, GarchSpec& g, MixtureSpec& m, std::uint64_t& seed);

}  // namespace momscale
