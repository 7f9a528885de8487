#include "doctest.h"

#include "momscale/error.hpp"
#include "momscale/moments.hpp"
#include "momscale/tail.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace momscale;

namespace {

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no momscale::Error thrown");
    return Errc::invalid_argument;
}

TailSpec make(double x0, double x1, double g1, double g2, double C = 1.0) {
    TailSpec s;
    s.x0 = x0;
    s.x1 = x1;
    s.gamma1 = g1;
    s.gamma2 = g2;
    s.C = C;
    return normalize(s);
}

oracle::QuadTail quad(const TailSpec& s) { return {s.x0, s.x1, s.gamma1, s.gamma2}; }

struct SpecGen {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> u{0.0, 1.0};

    explicit SpecGen(std::uint64_t seed) : rng(seed) {}
    double uniform(double a, double b) { return a + (b - a) * u(rng); }
    TailSpec next() {
        const double x0 = std::pow(10.0, uniform(-5, -2));
        const double x1 = x0 * std::pow(10.0, uniform(0.2, 4));
        return make(x0, x1, uniform(3.01, 4.99), uniform(3.01, 4.99), uniform(0.2, 3));
    }
};

RegimeSlopes slopes_for(double x0, double x1, double g1, double g2, double x_hi, std::size_t count = 400) {
    auto s = make(x0, x1, g1, g2);
    auto Ns = cutoff_sweep(s, 1.01 * x0, x_hi, count);
    auto curve = gamma_curve(s, Ns);
    return fit_regime_slopes(s, curve);
}

}  // namespace

TEST_CASE("normalization") {
    // Equal exponents reduce to one Pareto law.
    auto one = make(0.01, 0.05, 4.0, 4.0);
    const double single = (4.0 - 1.0) / (2.0 * std::pow(0.05, 4.0) * std::pow(0.01, -3.0));
    CHECK(oracle::rel_err(one.A, single) < 1e-13);

    auto two = make(0.01, 0.05, 4.5, 3.5);
    CHECK(oracle::rel_err(two.A, quad(two).amplitude()) < 1e-10);
    CHECK(oracle::rel_err(quad(two).band(two.x0, std::numeric_limits<double>::infinity(), 0) * two.A, 1.0) < 1e-10);

    // x0 -> x1: only the outer band remains.
    auto thin = make(0.05 * (1 - 1e-12), 0.05, 4.5, 3.5);
    CHECK(oracle::rel_err(thin.A, (3.5 - 1.0) / (2 * 0.05)) < 1e-9);

    TailSpec bad;
    bad.gamma1 = 1.0;
    CHECK(code_of([&] { normalize(bad); }) == Errc::invalid_exponents);
    bad = TailSpec{};
    bad.x1 = bad.x0;
    CHECK(code_of([&] { normalize(bad); }) == Errc::invalid_argument);
    CHECK(code_of([] { tail_prob(TailSpec{}, 0.01); }) == Errc::invalid_argument);
}

TEST_CASE("density and tail probability") {
    auto s = make(1e-3, 1e-1, 4.5, 3.5);
    CHECK(tail_density(s, 5e-4) == 0.0);
    CHECK(tail_density(s, -0.05) == tail_density(s, 0.05));
    CHECK(tail_density(s, 0.1) == doctest::Approx(s.A));
    CHECK(tail_prob(s, s.x0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(oracle::rel_err(tail_prob(s, s.x1), 2 * s.A * s.x1 / (s.gamma2 - 1)) < 1e-15);
    CHECK(code_of([&] { tail_prob(s, 1e-4); }) == Errc::threshold_below_support);
    CHECK(code_of([&] { truncated_moment(s, 1e-4, 2); }) == Errc::threshold_below_support);
    CHECK(code_of([&] { truncated_moment(s, 1e-2, 3); }) == Errc::odd_order_unsupported);

    for (double q : {1.0, 0.5, 0.1, 1e-3, 1e-6}) {
        CHECK(oracle::rel_err(tail_prob(s, tail_quantile(s, q)), q) < 1e-12);
    }
}

TEST_CASE("closed forms agree with quadrature over random specs") {
    SpecGen gen(404);
    for (int trial = 0; trial < 500; ++trial) {
        auto s = gen.next();
        auto q = quad(s);
        CAPTURE(trial);
        CHECK(oracle::rel_err(s.A, q.amplitude()) < 1e-10);
        const double t = s.x0 * std::pow(s.x1 / s.x0 * 30, gen.u(gen.rng));
        CHECK(oracle::rel_err(tail_prob(s, t), q.tail(t)) < 1e-10);
        for (int n : {2, 4, 6}) CHECK(oracle::rel_err(truncated_moment(s, t, n), q.moment(t, n)) < 1e-10);
    }
}

TEST_CASE("truncated moment identities") {
    SpecGen gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        auto s = gen.next();
        const double xw = s.x0 * std::pow(s.x1 / s.x0 * 50, gen.u(gen.rng));
        CHECK(std::abs(truncated_moment(s, xw, 0) - (1 - tail_prob(s, xw))) < 1e-12);
        if (xw <= s.x1) {
            const double g = s.gamma1;
            const double want = 2 * s.A * std::pow(s.x1, g) * (std::pow(xw, 3 - g) - std::pow(s.x0, 3 - g)) / (3 - g);
            CHECK(oracle::rel_err(truncated_moment(s, xw, 2), want) < 1e-10);
        }
    }
}

TEST_CASE("cutoff solution") {
    auto s = make(1e-3, 1e-1, 4.5, 3.5, 1.0);
    // Boundary case.
    const double Nb = s.C / tail_prob(s, s.x1);
    auto at = solve_xw(s, Nb);
    CHECK(oracle::rel_err(at.x_W, s.x1) < 1e-12);
    CHECK(oracle::rel_err(window_for_cutoff(s, s.x1), Nb) < 1e-15);

    // Continuity and monotonicity across the boundary.
    const double below = solve_xw(s, Nb * (1 - 1e-12)).x_W;
    const double above = solve_xw(s, Nb * (1 + 1e-12)).x_W;
    CHECK(below < above);
    CHECK(std::abs(above - below) < 1e-9 * s.x1);
    CHECK(solve_xw(s, Nb * 0.5).regime == TailRegime::inner);
    CHECK(solve_xw(s, Nb * 2).regime == TailRegime::outer);

    CHECK(code_of([&] { solve_xw(s, 1.0); }) == Errc::no_solution);
    CHECK(code_of([&] { solve_xw(s, 0.5); }) == Errc::invalid_argument);

    SpecGen gen(77);
    for (int trial = 0; trial < 100; ++trial) {
        auto r = gen.next();
        const double N = 2 * std::max(r.C, 1.0) * std::pow(10.0, gen.uniform(0, 6));
        auto a = solve_xw(r, N);
        auto b = solve_xw(r, 2 * N);
        CHECK(b.x_W > a.x_W);
        CHECK(oracle::rel_err(N * tail_prob(r, a.x_W), r.C) < 1e-12);
        if (trial < 50) {
            const double ref = oracle::bisect_cutoff(quad(r), N, r.C, std::max(r.x1, a.x_W) * 4);
            CHECK(oracle::rel_err(a.x_W, ref) < 1e-10);
        }
    }

    // x_W is strictly increasing along a dense sweep.
    auto Ns = log_spaced(1.5, 1e9, 2000);
    double prev = 0;
    for (double N : Ns) {
        const double x = solve_xw(s, N).x_W;
        CHECK(x > prev);
        prev = x;
    }
}

TEST_CASE("predicted exponents") {
    auto p = predicted_exponents(make(1e-3, 1e-1, 4.0, 3.5));
    CHECK(p.exponent_short == 3.0);
    auto q = predicted_exponents(make(1e-3, 1e-1, 4.5, 3.5));
    CHECK(q.exponent_short == 5.0);
    CHECK(q.exponent_long == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
    CHECK(!q.prefactor_short.has_value());
    CHECK(code_of([] { predicted_exponents(make(1e-3, 1e-1, 5.0, 3.5)); }) == Errc::invalid_exponents);
    CHECK(code_of([] { predicted_exponents(make(1e-3, 1e-1, 4.0, 2.5)); }) == Errc::invalid_exponents);
    CHECK(code_of([] { make(1e-3, 1e-1, 4.0, 2.5).validate(); }) == Errc::invalid_exponents);

    SpecGen gen(9);
    for (int i = 0; i < 200; ++i) {
        auto s = gen.next();
        auto e = predicted_exponents(s);
        if (s.gamma1 > s.gamma2) CHECK(e.exponent_short > e.exponent_long);
    }
}

TEST_CASE("gamma curve regime ordering on exact curves") {
    SpecGen gen(31);
    int checked = 0;
    while (checked < 30) {
        const double g1 = gen.uniform(3.6, 4.9);
        const double g2 = gen.uniform(3.1, g1 - 0.3);
        auto r = slopes_for(1e-5, 1e-2, g1, g2, 1e2);
        CAPTURE(g1);
        CAPTURE(g2);
        CHECK(r.short_line.B > r.long_line.B + 1e-3);
        CHECK(r.prediction.prefactor_short.has_value());
        ++checked;
    }
}

TEST_CASE("fitted slopes converge to the predicted exponents") {
    double prev_short = std::numeric_limits<double>::infinity();
    double prev_long = std::numeric_limits<double>::infinity();
    for (double sep : {1e2, 1e3, 1e4}) {
        const double x0 = 1e-3;
        const double x1 = x0 * sep;
        auto r = slopes_for(x0, x1, 4.5, 3.5, x1 * sep);
        const double es = std::abs(r.short_line.B / 5.0 - 1);
        const double el = std::abs(r.long_line.B / (7.0 / 3.0) - 1);
        MESSAGE("separation " << sep << ": B_short " << r.short_line.B << ", B_long " << r.long_line.B);
        CHECK(es < prev_short);
        CHECK(el < prev_long);
        prev_short = es;
        prev_long = el;
    }
    CHECK(prev_long < 0.02);
}

TEST_CASE("equal exponents give a single slope") {
    auto s = make(1e-3, 1e-1, 4.0, 4.0);
    auto Ns = cutoff_sweep(s, 0.02, 10.0, 120);
    auto curve = gamma_curve(s, Ns);
    std::vector<LogLogPoint> pts;
    for (const auto& p : curve) pts.push_back({static_cast<std::size_t>(p.N), std::log(p.gamma4), std::log(p.gamma6)});
    auto fit = fit_two_regimes(pts, 10);
    CHECK(std::abs(fit.short_line.B - fit.long_line.B) < 0.05 * fit.long_line.B);
    auto one = fit_line(pts);
    CHECK(one.B == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("sampler") {
    auto s = make(1e-3, 1e-1, 4.5, 3.5);
    const std::size_t n = 1'000'000;
    auto x = sample_tail(s, n, 7);
    REQUIRE(x.size() == n);

    const double p = tail_prob(s, s.x1);
    double beyond = 0;
    double positive = 0;
    double smallest = std::numeric_limits<double>::infinity();
    for (double v : x) {
        beyond += std::abs(v) > s.x1;
        positive += v > 0;
        smallest = std::min(smallest, std::abs(v));
    }
    CHECK(smallest >= s.x0);
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(beyond / n - p) < 3 * se);
    CHECK(std::abs(positive / n - 0.5) < 3 * std::sqrt(0.25 / n));

    // Conditional kurtosis of draws below a cutoff inside the inner band.
    const double xw = 0.02;
    std::vector<double> kept;
    for (double v : x) if (std::abs(v) < xw) kept.push_back(v);
    const double m0 = truncated_moment(s, xw, 0);
    const double want = truncated_moment(s, xw, 4) / m0 / std::pow(truncated_moment(s, xw, 2) / m0, 2);
    CHECK(standardized_moment(kept, 4) == doctest::Approx(want).epsilon(0.03));

    auto a = sample_tail(s, 1000, 11);
    auto b = sample_tail(s, 1000, 11);
    CHECK(a == b);
}

TEST_CASE("Hill estimate for a single exponent") {
    auto s = make(1e-3, 1e-1, 4.0, 4.0);
    auto x = sample_tail(s, 1'000'000, 13);
    const double alpha = oracle::hill(x, x.size() / 100);
    CHECK(alpha == doctest::Approx(3.0).epsilon(0.10));
}

TEST_CASE("helpers and exports") {
    auto v = log_spaced(1e-3, 1e3, 7);
    CHECK(v.front() == 1e-3);
    CHECK(v.back() == 1e3);
    CHECK(v[3] == doctest::Approx(1.0));
    CHECK(code_of([] { log_spaced(1, 2, 1); }) == Errc::invalid_argument);

    TailSpec s = make(2e-3, 5e-2, 4.2, 3.3, 2.0);
    auto j = tail_spec_json(s);
    TailSpec back;
    tail_spec_from_json(j, back);
    CHECK(back.x0 == s.x0);
    CHECK(back.gamma2 == s.gamma2);
    CHECK(back.C == 2.0);
    CHECK(!back.normalized());

    auto curve = gamma_curve(s, log_spaced(10, 1e5, 5));
    std::ostringstream csv;
    write_gamma_curve_csv(csv, curve);
    CHECK(csv.str().rfind("N,x_W,regime,gamma4,gamma6\n", 0) == 0);
}
