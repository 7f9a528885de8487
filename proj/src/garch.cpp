#include "momscale/garch.hpp"

#include "momscale/error.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace momscale {

void MixtureSpec::validate() const {
    if (!(a >= 0.0 && b >= 0.0)) throw Error(Errc::invalid_argument, "mixture weights must be non-negative");
    if (std::abs(a + b - 1.0) > 1e-12) {
        throw Error(Errc::invalid_argument, fmt::format("mixture weights sum to {}, not 1", a + b));
    }
    if (!(var1 > 0.0 && var2 > 0.0)) throw Error(Errc::invalid_argument, "mixture variances must be positive");
}

void GarchSpec::validate() const {
    if (!(alpha0 > 0.0)) throw Error(Errc::invalid_argument, "alpha0 must be positive");
    if (!(alpha1 >= 0.0 && beta1 >= 0.0)) throw Error(Errc::invalid_argument, "alpha1 and beta1 must be >= 0");
    if (init_var && !(*init_var > 0.0)) throw Error(Errc::invalid_argument, "init_var must be positive");
}

double GarchSpec::initial_variance() const {
    if (init_var) return *init_var;
    const double persistence = alpha1 + beta1;
    if (!(persistence < 1.0)) {
        throw Error(Errc::non_stationary_init,
                    fmt::format("alpha1 + beta1 = {} >= 1: no unconditional variance", persistence));
    }
    return alpha0 / (1.0 - persistence);
}

double mixture_variance(const MixtureSpec& m) {
    m.validate();
    return m.a * m.var1 + m.b * m.var2;
}

double mixture_kurtosis(const MixtureSpec& m) {
    const double v = mixture_variance(m);
    return 3.0 * (m.a * m.var1 * m.var1 + m.b * m.var2 * m.var2) / (v * v);
}

double mixture_cdf(const MixtureSpec& m, double x) {
    m.validate();
    auto phi = [x](double var) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * var)); };
    return m.a * phi(m.var1) + m.b * phi(m.var2);
}

MixtureSampler::MixtureSampler(const MixtureSpec& spec)
    : spec_(spec), sd1_(std::sqrt(spec.var1)), sd2_(std::sqrt(spec.var2)) {
    spec_.validate();
}

double MixtureSampler::operator()(Rng& rng) {
    const double u = pick_(rng);
    const double sd = u < spec_.a ? sd1_ : sd2_;
    return sd * z_(rng);
}

double sample_mixture(const MixtureSpec& m, Rng& rng) {
    MixtureSampler sampler(m);
    return sampler(rng);
}

ReturnSeries simulate(const GarchSpec& g, const MixtureSpec& m, std::size_t T, std::uint64_t seed) {
    g.validate();
    m.validate();
    if (T < 1) throw Error(Errc::invalid_argument, "T must be at least 1");

    Rng rng(seed);
    MixtureSampler chi(m);
    double var = g.initial_variance();
    double x = chi(rng) * std::sqrt(var);

    std::vector<double> values;
    values.reserve(T);
    const std::size_t total = g.burn_in + T;
    // step 0 is x_0; steps 1.. follow the recursion
    for (std::size_t t = 0; t < total; ++t) {
        if (t > 0) {
            var = g.alpha0 + g.alpha1 * x * x + g.beta1 * var;
            if (!(var >= g.alpha0)) throw std::logic_error("conditional variance fell below alpha0");
            x = chi(rng) * std::sqrt(var);
        }
        if (t >= g.burn_in) values.push_back(x);
    }
    auto dates = trading_calendar(Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{3}}, T);
    return ReturnSeries(std::move(dates), std::move(values), fmt::format("garch_seed_{}", seed));
}

nlohmann::json garch_spec_json(const GarchSpec& g, const MixtureSpec& m, std::uint64_t seed) {
    nlohmann::json j{
        {"alpha0", g.alpha0}, {"alpha1", g.alpha1}, {"beta1", g.beta1}, {"a", m.a},
        {"b", m.b},           {"var1", m.var1},     {"var2", m.var2},   {"burn_in", g.burn_in},
        {"seed", seed},
    };
    j["init_var"] = g.init_var ? nlohmann::json(*g.init_var) : nlohmann::json("unconditional");
    return j;
}

void garch_spec_from_json(const nlohmann::json& j, GarchSpec& g, MixtureSpec& m, std::uint64_t& seed) {
    auto take = [&j](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    take("alpha0", g.alpha0);
    take("alpha1", g.alpha1);
    take("beta1", g.beta1);
    take("burn_in", g.burn_in);
    take("a", m.a);
    take("b", m.b);
    take("var1", m.var1);
    take("var2", m.var2);
    take("seed", seed);
    if (j.contains("init_var")) {
        const auto& v = j.at("init_var");
        if (v.is_string()) {
            if (v.get<std::string>() != "unconditional") {
                throw Error(Errc::invalid_argument, "init_var must be a number or \"unconditional\"");
            }
            g.init_var.reset();
        } else {
            g.init_var = v.get<double>();
        }
    }
}

}  // namespace momscale
