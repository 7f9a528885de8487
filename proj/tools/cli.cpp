#include "cli.hpp"

#include "momscale/error.hpp"
#include "momscale/garch.hpp"
#include "momscale/moments.hpp"
#include "momscale/scaling.hpp"
#include "momscale/series.hpp"
#include "momscale/tail.hpp"
#include "momscale/var.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

namespace momscale::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
    std::string command;
    std::string input;
    std::string input_kind = "auto";
    std::string date_column = "date";
    std::string close_column = "close";
    std::string out_dir = ".";
    std::string format = "csv";

    WindowPlan plan;
    std::string anchor = "series_start";
    std::size_t min_window = 2;
    std::vector<int> orders{4, 6, 8, 10, 12};
    double confidence = 0.90;
    int pair = 6;
    std::size_t min_segment = 10;
    unsigned threads = 0;

    std::uint64_t seed = 42;
    std::size_t steps = 4536;
    GarchSpec garch;
    MixtureSpec mixture;
    std::string init_var = "unconditional";

    TailSpec tail;
    std::size_t curve_points = 200;
    double x_lo = 0.0;  // 0 selects 1.5 x0
    double x_hi = 0.0;  // 0 selects 1000 x1
    std::size_t sample_count = 0;
};

// Keys accepted in --config files; values overwrite the defaults above.
void apply_config_file(const json& j, RunConfig& c) {
    auto take = [&j](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    take("input", c.input);
    take("input_kind", c.input_kind);
    take("date_column", c.date_column);
    take("close_column", c.close_column);
    take("out_dir", c.out_dir);
    take("format", c.format);
    take("start_fraction", c.plan.start_fraction);
    take("step_fraction", c.plan.step_fraction);
    take("anchor", c.anchor);
    take("min_length", c.plan.min_length);
    take("min_window", c.min_window);
    take("orders", c.orders);
    take("confidence", c.confidence);
    take("pair", c.pair);
    take("min_segment", c.min_segment);
    take("threads", c.threads);
    take("steps", c.steps);
    take("curve_points", c.curve_points);
    take("x_lo", c.x_lo);
    take("x_hi", c.x_hi);
    take("sample_count", c.sample_count);
    garch_spec_from_json(j, c.garch, c.mixture, c.seed);
    if (j.contains("init_var")) {
        const auto& v = j.at("init_var");
        c.init_var = v.is_string() ? v.get<std::string>() : fmt::format("{:.17g}", v.get<double>());
    }
    tail_spec_from_json(j, c.tail);
}

// Output directory and thread count are left out so that re-running into a
// different directory or with more threads reproduces identical files.
json config_echo(const RunConfig& c) {
    json j{{"command", c.command}, {"format", c.format}};
    if (!c.input.empty()) j["input"] = c.input;
    if (c.command == "moments" || c.command == "scaling" || c.command == "var") {
        j["start_fraction"] = c.plan.start_fraction;
        j["step_fraction"] = c.plan.step_fraction;
        j["anchor"] = anchor_name(c.plan.anchor);
        j["min_length"] = c.plan.min_length;
    }
    if (c.command == "moments") j["orders"] = c.orders;
    if (c.command == "scaling") {
        j["pair"] = json::array({4, c.pair});
        j["min_window"] = c.min_window;
        j["min_segment"] = c.min_segment;
    }
    if (c.command == "var") j["confidence"] = c.confidence;
    if (c.command == "garch") {
        j.update(garch_spec_json(c.garch, c.mixture, c.seed));
        j["steps"] = c.steps;
    }
    if (c.command == "tail") {
        j.update(tail_spec_json(c.tail));
        j["curve_points"] = c.curve_points;
        j["x_lo"] = c.x_lo;
        j["x_hi"] = c.x_hi;
        j["sample_count"] = c.sample_count;
        j["seed"] = c.seed;
    }
    return j;
}

void finalize(RunConfig& c) {
    c.plan.anchor = parse_anchor(c.anchor);
    c.plan.validate();
    if (c.format != "csv" && c.format != "json") {
        throw Error(Errc::invalid_argument, fmt::format("unknown format '{}'", c.format));
    }
    if (c.init_var == "unconditional") {
        c.garch.init_var.reset();
    } else {
        c.garch.init_var = std::stod(c.init_var);
    }
}

class OutputSet {
public:
    OutputSet(const RunConfig& c, std::ostream& log) : dir_(c.out_dir), echo_(config_echo(c)), log_(log) {
        fs::create_directories(dir_);
    }

    void csv(const std::string& name, const std::function<void(std::ostream&)>& body) {
        write(name, [&](std::ostream& f) {
            f << "# config: " << echo_.dump() << '\n';
            body(f);
        });
    }

    void json_doc(const std::string& name, json doc) {
        doc["config"] = echo_;
        write(name, [&](std::ostream& f) { f << doc.dump(2) << '\n'; });
    }

    /// Table output in the configured format: CSV via `body`, or JSON `rows`.
    void table(const RunConfig& c, const std::string& stem, const std::function<void(std::ostream&)>& body,
               const std::function<json()>& rows) {
        if (c.format == "json") {
            json_doc(stem + ".json", json{{"rows", rows()}});
        } else {
            csv(stem + ".csv", body);
        }
    }

private:
    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const auto path = dir_ / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error(Errc::file_not_found, fmt::format("cannot write '{}'", path.string()));
        body(f);
        f.flush();
        if (!f) throw Error(Errc::file_not_found, fmt::format("failed writing '{}'", path.string()));
        log_ << "wrote " << path.string() << '\n';
    }

    fs::path dir_;
    json echo_;
    std::ostream& log_;
};

ReturnSeries load_input(const RunConfig& c) {
    if (c.input.empty()) throw Error(Errc::invalid_argument, "--input is required");
    std::ifstream in(c.input);
    if (!in) throw Error(Errc::file_not_found, fmt::format("cannot open '{}'", c.input));
    std::string kind = c.input_kind;
    if (kind == "auto") {
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line[0] != '#' && line.find_first_not_of(" \t\r") != std::string::npos) break;
        }
        kind = line.find("log_return") != std::string::npos ? "returns" : "prices";
        in.clear();
        in.seekg(0);
    }
    const auto label = fs::path(c.input).stem().string();
    if (kind == "returns") return read_returns(in, label);
    if (kind == "prices") return log_returns(read_prices(in, PriceSchema{c.date_column, c.close_column}, label));
    throw Error(Errc::invalid_argument, fmt::format("unknown input kind '{}'", kind));
}

// Power-mean chain and Gamma_2 == 1 on every usable record.
std::size_t moment_invariant_violations(const std::vector<MomentRecord>& records) {
    std::size_t bad = 0;
    for (const auto& r : records) {
        if (r.degenerate) continue;
        if (std::abs(r.gamma.at(2) - 1.0) > 1e-12) ++bad;
        double prev = 1.0;
        int prev_order = 2;
        for (const auto& [n, g] : r.gamma) {
            if (n == 2) continue;
            const double bound = std::pow(prev, static_cast<double>(n) / prev_order);
            if (!std::isfinite(g) || g < bound * (1.0 - 1e-9)) ++bad;
            prev = g;
            prev_order = n;
        }
    }
    return bad;
}

int cmd_moments(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto returns = load_input(c);
    const auto records = moment_profile(returns, c.plan, c.orders, ProfileOptions{c.threads});
    OutputSet files(c, out);
    files.table(
        c, "moments", [&](std::ostream& f) { write_moments_csv(f, records, c.orders); },
        [&] { return moments_to_json(records, c.orders); });
    files.table(
        c, "ratios", [&](std::ostream& f) { write_ratios_csv(f, records, c.orders); },
        [&] { return ratios_to_json(records, c.orders); });
    std::size_t degenerate = 0;
    for (const auto& r : records) degenerate += r.degenerate ? 1 : 0;
    if (degenerate > 0) err << "warning: " << degenerate << " zero-variance windows flagged\n";
    if (const auto bad = moment_invariant_violations(records); bad > 0) {
        err << "error: " << bad << " moment invariant violations\n";
        return 3;
    }
    return 0;
}

int cmd_scaling(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.pair < 6 || c.pair % 2 != 0) throw Error(Errc::invalid_argument, "--pair must be an even order >= 6");
    const auto returns = load_input(c);
    const int orders[] = {4, c.pair};
    const auto records = moment_profile(returns, c.plan, orders, ProfileOptions{c.threads});
    const auto set = loglog_points(records, c.pair, c.min_window);
    const auto fit = fit_two_regimes(set.points, c.min_segment);
    if (fit.total_sse > fit.single_sse) {
        err << "error: two-regime SSE exceeds the single-line SSE\n";
        return 3;
    }
    OutputSet files(c, out);
    files.json_doc("fit_report.json", fit_report_json(fit, c.pair, set.excluded));
    files.csv("scaling_plot.csv", [&](std::ostream& f) { write_plot_csv(f, set.points, fit); });
    out << fmt::format("B_short = {:.4f}  lnA_short = {:.4f}\nB_long  = {:.4f}  lnA_long  = {:.4f}\nsplit_N = {}\n",
                       fit.short_line.B, fit.short_line.lnA, fit.long_line.B, fit.long_line.lnA, fit.split_N);
    if (!fit.regimes_distinct) {
        err << "warning: short and long regimes are statistically indistinguishable\n";
    }
    return 0;
}

int cmd_garch(const RunConfig& c, std::ostream& out, std::ostream&) {
    const auto series = simulate(c.garch, c.mixture, c.steps, c.seed);
    OutputSet files(c, out);
    files.csv("garch_series.csv", [&](std::ostream& f) { write_returns_csv(f, series); });
    files.json_doc("garch_spec.json", garch_spec_json(c.garch, c.mixture, c.seed));
    return 0;
}

int cmd_var(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto returns = load_input(c);
    const auto curve = var_curve(returns, c.plan, c.confidence);
    OutputSet files(c, out);
    files.table(
        c, "var_curve", [&](std::ostream& f) { write_var_csv(f, curve); },
        [&] { return var_curve_json(curve)["points"]; });
    std::size_t skipped = 0;
    for (const auto& p : curve.points) skipped += p.too_small ? 1 : 0;
    if (skipped > 0) err << "warning: " << skipped << " windows too small for the VaR level\n";
    return 0;
}

int cmd_tail(const RunConfig& c, std::ostream& out, std::ostream&) {
    c.tail.validate();
    const auto spec = normalize(c.tail);
    const double lo = c.x_lo > 0.0 ? c.x_lo : 1.5 * spec.x0;
    const double hi = c.x_hi > 0.0 ? c.x_hi : 1000.0 * spec.x1;
    const auto Ns = cutoff_sweep(spec, lo, hi, c.curve_points);
    const auto curve = gamma_curve(spec, Ns);
    const auto slopes = fit_regime_slopes(spec, curve);

    OutputSet files(c, out);
    json report{{"spec", tail_spec_json(spec)},
                {"A", spec.A},
                {"exponent_short", slopes.prediction.exponent_short},
                {"exponent_long", slopes.prediction.exponent_long},
                {"fitted_B_short", slopes.short_line.B},
                {"fitted_B_long", slopes.long_line.B},
                {"prefactor_short", *slopes.prediction.prefactor_short},
                {"prefactor_long", *slopes.prediction.prefactor_long},
                {"boundary_N", window_for_cutoff(spec, spec.x1)}};
    files.json_doc("tail_report.json", report);
    files.csv("tail_curve.csv", [&](std::ostream& f) { write_gamma_curve_csv(f, curve); });
    if (c.sample_count > 0) {
        auto draws = sample_tail(spec, c.sample_count, c.seed);
        auto dates = trading_calendar(Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{3}},
                                      draws.size());
        const ReturnSeries sample(std::move(dates), std::move(draws), "tail_sample");
        files.csv("tail_sample.csv", [&](std::ostream& f) { write_returns_csv(f, sample); });
    }
    out << fmt::format("predicted exponents: short {:.6f}  long {:.6f}\n", slopes.prediction.exponent_short,
                       slopes.prediction.exponent_long);
    return 0;
}

void report(std::ostream& err, bool as_json, const std::exception& e) {
    const auto* me = dynamic_cast<const Error*>(&e);
    const std::string name(me ? errc_name(me->code()) : "InvalidArgument");
    if (as_json) {
        json j{{"error", name}, {"message", e.what()}};
        if (me && me->row()) j["row"] = *me->row();
        err << j.dump() << '\n';
    } else {
        err << "error: " << name << ": " << e.what() << '\n';
    }
}

void add_io(CLI::App* sub, RunConfig& c, bool needs_input) {
    if (needs_input) {
        sub->add_option("-i,--input", c.input, "Input CSV (date,close prices or date,log_return)");
        sub->add_option("--input-kind", c.input_kind, "auto | prices | returns");
        sub->add_option("--date-column", c.date_column, "Date column of a price file");
        sub->add_option("--close-column", c.close_column, "Close column of a price file");
    }
    sub->add_option("-o,--out-dir", c.out_dir, "Directory receiving output files");
    sub->add_option("--format", c.format, "Table format: csv | json");
}

void add_plan(CLI::App* sub, RunConfig& c) {
    sub->add_option("--start-fraction", c.plan.start_fraction, "First window as a fraction of the series");
    sub->add_option("--step-fraction", c.plan.step_fraction, "Window increment as a fraction of the series");
    sub->add_option("--anchor", c.anchor, "series_start | series_end");
    sub->add_option("--min-length", c.plan.min_length, "Shortest admissible window");
    sub->add_option("--threads", c.threads, "Worker threads for moment evaluation (0 = all cores)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    bool error_json = false;

    // The config file supplies defaults; explicit flags parsed afterwards win.
    for (std::size_t i = 1; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            std::ifstream f(args[i + 1]);
            if (!f) {
                err << "cannot open config file '" << args[i + 1] << "'\n";
                return 2;
            }
            try {
                apply_config_file(json::parse(f), c);
            } catch (const std::exception& e) {
                err << "invalid config file: " << e.what() << '\n';
                return 2;
            }
        }
    }

    CLI::App app{"Higher-order moment scaling, GARCH simulation, VaR and tail-model analysis"};
    app.name("momscale");
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with default values for any flag");
    app.add_flag("--error-json", error_json, "Report failures as a JSON object on stderr");

    auto* moments = app.add_subcommand("moments", "Standardized moments and gaussian ratios per window");
    add_io(moments, c, true);
    add_plan(moments, c);
    moments->add_option("--orders", c.orders, "Even moment orders")->delimiter(',');

    auto* scaling = app.add_subcommand("scaling", "Two-regime ln Gamma_m vs ln Gamma_4 fit");
    add_io(scaling, c, true);
    add_plan(scaling, c);
    scaling->add_option("--pair", c.pair, "Second moment order of the pair (6 or 8)");
    scaling->add_option("--min-window", c.min_window, "Windows shorter than this are left out of the fit");
    scaling->add_option("--min-segment", c.min_segment, "Minimum points per regime");

    auto* garch = app.add_subcommand("garch", "Simulate GARCH(1,1) with double-normal innovations");
    add_io(garch, c, false);
    garch->add_option("--seed", c.seed);
    garch->add_option("--steps", c.steps, "Returns to emit after burn-in");
    garch->add_option("--alpha0", c.garch.alpha0);
    garch->add_option("--alpha1", c.garch.alpha1);
    garch->add_option("--beta1", c.garch.beta1);
    garch->add_option("--burn-in", c.garch.burn_in);
    garch->add_option("--init-var", c.init_var, "Initial variance or 'unconditional'");
    garch->add_option("--a", c.mixture.a, "Weight of mixture component 1");
    garch->add_option("--b", c.mixture.b, "Weight of mixture component 2");
    garch->add_option("--var1", c.mixture.var1);
    garch->add_option("--var2", c.mixture.var2);

    auto* var = app.add_subcommand("var", "Historical VaR against window length");
    add_io(var, c, true);
    add_plan(var, c);
    var->add_option("--confidence", c.confidence, "Confidence level in (0, 1)");

    auto* tail = app.add_subcommand("tail", "Pareto tail hierarchy: model curve, exponents, samples");
    add_io(tail, c, false);
    tail->add_option("--x0", c.tail.x0);
    tail->add_option("--x1", c.tail.x1);
    tail->add_option("--gamma1", c.tail.gamma1);
    tail->add_option("--gamma2", c.tail.gamma2);
    tail->add_option("--C", c.tail.C, "Expected count of moves beyond the cutoff");
    tail->add_option("--points", c.curve_points, "Points on the model curve");
    tail->add_option("--x-lo", c.x_lo, "Smallest cutoff on the curve (default 1.5 x0)");
    tail->add_option("--x-hi", c.x_hi, "Largest cutoff on the curve (default 1000 x1)");
    tail->add_option("--sample-count", c.sample_count, "Also write this many draws from the model");
    tail->add_option("--seed", c.seed);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
    try {
        finalize(c);
    } catch (const std::exception& e) {
        report(err, error_json, e);
        return 2;
    }
    try {
        if (c.command == "moments") return cmd_moments(c, out, err);
        if (c.command == "scaling") return cmd_scaling(c, out, err);
        if (c.command == "garch") return cmd_garch(c, out, err);
        if (c.command == "var") return cmd_var(c, out, err);
        if (c.command == "tail") return cmd_tail(c, out, err);
    } catch (const std::exception& e) {
        report(err, error_json, e);
        return 1;
    }
    return 2;
}

}  // namespace momscale::cli
