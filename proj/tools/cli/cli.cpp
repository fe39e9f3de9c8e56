#include "cli.hpp"

#include "config.hpp"
#include "csv.hpp"
#include "manifest.hpp"
#include "version.hpp"

#include "greenprem/cost_model.hpp"
#include "greenprem/diffusion.hpp"
#include "greenprem/errors.hpp"
#include "greenprem/fitting.hpp"
#include "greenprem/sensitivity.hpp"
#include "greenprem/trajectory.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace greenprem::cli {

namespace {

using Row = std::vector<std::string>;

struct Common {
    std::string config_dir;
    std::string out_path;
    std::optional<std::uint64_t> seed;
};

struct GaFlags {
    std::string fit_config;
    std::optional<int> population;
    std::optional<int> generations;
    std::optional<double> crossover;
    std::optional<double> mutation;
    std::optional<double> late_weight;
    std::optional<double> penalty_weight;
    std::optional<double> m;
    bool m_free = false;
    std::optional<double> m_min;
    std::optional<double> m_max;
    std::optional<double> initial_cumulative;
    bool no_early_stop = false;
    bool no_polish = false;
    std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config-dir", c.config_dir, "Scenario directory (default: $GREENPREM_CONFIG_DIR)");
    sub->add_option("--out", c.out_path, "Output CSV path (default: stdout)");
    sub->add_option("--seed", c.seed, "RNG seed; a random one is chosen and printed when absent");
}

void add_ga_flags(CLI::App* sub, GaFlags& g) {
    sub->add_option("--fit-config", g.fit_config, "YAML file with FitConfig keys");
    sub->add_option("--population", g.population, "Population size (default 800)");
    sub->add_option("--generations", g.generations, "Maximum generations (default 500)");
    sub->add_option("--crossover", g.crossover, "Crossover probability (default 0.8)");
    sub->add_option("--mutation", g.mutation, "Per-gene mutation probability (default 0.1)");
    sub->add_option("--late-weight", g.late_weight, "Residual weight for years >= 2018 (default 4)");
    sub->add_option("--penalty-weight", g.penalty_weight, "Weight of the negative-flow penalty (default 1)");
    sub->add_option("--m", g.m, "Fixed market potential, thousands of vehicles");
    sub->add_flag("--m-free", g.m_free, "Fit the market potential as a fourth gene");
    sub->add_option("--m-min", g.m_min, "Lower bound for a free market potential");
    sub->add_option("--m-max", g.m_max, "Upper bound for a free market potential");
    sub->add_option("--initial-cumulative", g.initial_cumulative, "Adopters before the first year, thousands");
    sub->add_flag("--no-early-stop", g.no_early_stop, "Always run every generation");
    sub->add_flag("--no-polish", g.no_polish, "Skip the Nelder-Mead refinement of the GA winner");
    sub->add_option("--threads", g.threads, "Fitness worker threads, 0 for all cores (default 1)");
}

FitConfig build_fit_config(const GaFlags& g, std::uint64_t seed) {
    FitConfig cfg;
    if (!g.fit_config.empty()) cfg = load_fit_config(g.fit_config, cfg);
    if (g.population) cfg.population_size = *g.population;
    if (g.generations) cfg.max_generations = *g.generations;
    if (g.crossover) cfg.crossover_prob = *g.crossover;
    if (g.mutation) cfg.mutation_prob = *g.mutation;
    if (g.late_weight) cfg.late_weight = *g.late_weight;
    if (g.penalty_weight) cfg.penalty_weight = *g.penalty_weight;
    if (g.m) {
        cfg.m_mode = MarketMode::fixed;
        cfg.m_fixed = *g.m;
    }
    if (g.m_free) cfg.m_mode = MarketMode::free;
    if (g.m_min) cfg.m_bounds.lo = *g.m_min;
    if (g.m_max) cfg.m_bounds.hi = *g.m_max;
    if (g.initial_cumulative) cfg.initial_cumulative = *g.initial_cumulative;
    if (g.no_early_stop) cfg.early_stop = false;
    if (g.no_polish) cfg.polish = false;
    if (g.threads) cfg.threads = *g.threads;
    cfg.rng_seed = seed;
    validate(cfg);
    return cfg;
}

std::uint64_t choose_seed(const Common& c, std::ostream& err) {
    if (c.seed) return *c.seed;
    std::random_device rd;
    const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err << "seed: " << seed << '\n';
    return seed;
}

void emit(const Common& c, const CsvTable& table, std::ostream& out) {
    if (c.out_path.empty()) {
        write_csv(out, table);
        out.flush();
        return;
    }
    std::ostringstream buf;
    write_csv(buf, table);
    std::ofstream f(c.out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", c.out_path));
    f << buf.str();
    if (!f.flush()) throw std::runtime_error(fmt::format("write to '{}' failed", c.out_path));
}

std::vector<std::string> with_manifest(std::vector<std::string> comments, const RunManifest& m) {
    for (auto& line : m.comment_lines()) comments.push_back(std::move(line));
    return comments;
}

std::string fmt_bool(bool b) {
    return b ? "true" : "false";
}

nlohmann::ordered_json scenario_json(const std::string& ref, const ScenarioSchedule& s) {
    nlohmann::ordered_json j;
    j["scenario"] = ref;
    j["schedule"] = schedule_to_json(s);
    return j;
}

// tco ------------------------------------------------------------------------

struct TcoArgs {
    std::string scenario = "long-range";
    int year = 2021;
};

void cmd_tco(const Common& c, const TcoArgs& a, std::ostream& out) {
    const auto sched = resolve_schedule_ref(a.scenario, config_dir(c.config_dir));
    const VehicleScenario sc = resolve_scenario(sched, a.year);

    RunManifest m{"tco", scenario_json(a.scenario, sched), std::nullopt, {}};
    m.config["year"] = a.year;
    CsvTable t;
    t.comments = with_manifest({"units: currency RMB; lcod RMB/km"}, m);
    t.header = {"year", "vehicle", "market_price", "acquisition", "operating_pv", "replacement_pv", "residual_pv",
                "tco", "lcod"};
    for (const auto kind : {VehicleKind::ev, VehicleKind::icev}) {
        const TcoBreakdown b = tco_breakdown(sc, kind);
        const double price = kind == VehicleKind::ev ? ev_market_price(sc) : icev_market_price(sc);
        t.rows.push_back({std::to_string(a.year), kind == VehicleKind::ev ? "ev" : "icev", format_number(price),
                          format_number(b.acquisition), format_number(b.operating_pv),
                          format_number(b.replacement_pv), format_number(b.residual_pv), format_number(b.total),
                          format_number(lcod(b.total, sc.usage))});
    }
    emit(c, t, out);
}

// premium-series / parity ----------------------------------------------------

struct SeriesArgs {
    std::string scenario = "long-range";
    int from = 2010;
    int to = 2030;
};

void cmd_premium_series(const Common& c, const SeriesArgs& a, std::ostream& out) {
    const auto sched = resolve_schedule_ref(a.scenario, config_dir(c.config_dir));
    const PremiumSeries s = premium_series(sched, a.from, a.to);

    RunManifest m{"premium-series", scenario_json(a.scenario, sched), std::nullopt, {}};
    m.config["from"] = a.from;
    m.config["to"] = a.to;
    CsvTable t;
    t.comments = with_manifest({"units: premiums are fractions; lcod RMB/km"}, m);
    t.header = {"year", "production_premium", "acquisition_premium", "lifecycle_premium", "lcod_icev", "lcod_ev"};
    for (const auto& p : s.points) {
        t.rows.push_back({std::to_string(p.year), format_number(p.production), format_number(p.acquisition),
                          format_number(p.lifecycle), format_number(p.lcod_icev), format_number(p.lcod_ev)});
    }
    emit(c, t, out);
}

void cmd_parity(const Common& c, const SeriesArgs& a, std::ostream& out) {
    const auto sched = resolve_schedule_ref(a.scenario, config_dir(c.config_dir));
    const PremiumSeries s = premium_series(sched, a.from, a.to);

    RunManifest m{"parity", scenario_json(a.scenario, sched), std::nullopt, {}};
    m.config["from"] = a.from;
    m.config["to"] = a.to;
    CsvTable t;
    t.comments = with_manifest({"units: calendar year; none when the premium stays positive"}, m);
    t.header = {"premium", "parity_year"};
    for (const auto kind : {PremiumKind::lifecycle, PremiumKind::acquisition, PremiumKind::production}) {
        const auto y = parity_year(s, kind);
        t.rows.push_back({std::string(to_string(kind)), y ? std::to_string(*y) : "none"});
    }
    emit(c, t, out);
}

// fit / compare ---------------------------------------------------------------

struct FitArgs {
    std::string data;
    std::string scenario = "long-range";
    std::string model = "generalized";
};

Row result_row(const std::string& model, const FitResult& r) {
    return {model,
            format_number(r.params.p),
            format_number(r.params.q),
            format_number(r.params.m),
            format_number(r.params.beta),
            format_number(r.objective),
            format_number(r.r_squared),
            std::to_string(r.generations_run),
            fmt_bool(r.converged)};
}

void cmd_fit(const Common& c, const FitArgs& a, const GaFlags& g, std::ostream& out, std::ostream& err) {
    if (a.model != "generalized" && a.model != "vanilla") {
        throw ValidationError(fmt::format("--model must be generalized or vanilla, not '{}'", a.model));
    }
    const SalesData sales = load_sales_csv(a.data);
    const auto sched = resolve_schedule_ref(a.scenario, config_dir(c.config_dir));
    const std::uint64_t seed = choose_seed(c, err);
    FitConfig cfg = build_fit_config(g, seed);
    cfg.fit_beta = a.model == "generalized";

    const auto& pts = sales.series.points;
    const PremiumPath path = lifecycle_path(premium_series(sched, pts.front().year, pts.back().year));
    const FitResult r = ga_fit(sales.series, cfg.fit_beta ? &path : nullptr, cfg);

    RunManifest m{"fit", scenario_json(a.scenario, sched), seed, {{a.data, sha256_file(a.data)}}};
    m.config["model"] = a.model;
    m.config["fit"] = fit_config_to_json(cfg);
    CsvTable t;
    t.comments = with_manifest({"units: m and initial_cumulative in thousands of vehicles"}, m);
    t.header = {"parameter", "value"};
    t.rows = {
        {"model", a.model},
        {"p", format_number(r.params.p)},
        {"q", format_number(r.params.q)},
        {"m", format_number(r.params.m)},
        {"beta", format_number(r.params.beta)},
        {"objective", format_number(r.objective)},
        {"r_squared", format_number(r.r_squared)},
        {"generations_run", std::to_string(r.generations_run)},
        {"converged", fmt_bool(r.converged)},
        {"first_year", std::to_string(pts.front().year)},
        {"last_year", std::to_string(pts.back().year)},
        {"initial_cumulative", format_number(cfg.initial_cumulative)},
        {"scenario", a.scenario},
        {"late_weight", format_number(cfg.late_weight)},
        {"penalty_weight", format_number(cfg.penalty_weight)},
    };
    emit(c, t, out);
}

void cmd_compare(const Common& c, const FitArgs& a, const GaFlags& g, std::ostream& out, std::ostream& err) {
    const SalesData sales = load_sales_csv(a.data);
    const auto sched = resolve_schedule_ref(a.scenario, config_dir(c.config_dir));
    const std::uint64_t seed = choose_seed(c, err);
    const FitConfig cfg = build_fit_config(g, seed);

    const auto& pts = sales.series.points;
    const PremiumPath path = lifecycle_path(premium_series(sched, pts.front().year, pts.back().year));
    const ModelComparison cmp = compare_models(sales.series, path, cfg);

    RunManifest m{"compare", scenario_json(a.scenario, sched), seed, {{a.data, sha256_file(a.data)}}};
    m.config["fit"] = fit_config_to_json(cfg);
    m.config["fit"].erase("fit_beta");
    CsvTable t;
    t.comments = with_manifest({"units: m in thousands of vehicles"}, m);
    t.header = {"model", "p", "q", "m", "beta", "objective", "r_squared", "generations_run", "converged"};
    t.rows = {result_row("vanilla", cmp.vanilla), result_row("generalized", cmp.generalized)};
    emit(c, t, out);
}

// forecast --------------------------------------------------------------------

struct ForecastArgs {
    std::string params;
    std::string scenario;
    int to = 2030;
};

struct FittedParams {
    std::string model;
    BassParams bass;
    int first_year = 0;
    double initial_cumulative = 0.0;
    std::string scenario;
};

FittedParams read_fitted_params(const std::string& path) {
    const CsvDocument doc = read_csv_file(path);
    if (doc.header != Row{"parameter", "value"}) {
        throw CsvError(fmt::format("{}: header must be 'parameter,value'", path));
    }
    std::map<std::string, std::pair<std::string, int>> kv;
    for (const auto& r : doc.rows) kv[r.fields[0]] = {r.fields[1], r.line};
    auto get = [&](const std::string& key) -> const std::pair<std::string, int>& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw CsvError(fmt::format("{}: missing parameter '{}'", path, key));
        return it->second;
    };
    auto number = [&](const std::string& key) {
        const auto& [text, line] = get(key);
        return parse_number(text, fmt::format("{}:{}", path, line));
    };

    FittedParams f;
    f.model = get("model").first;
    if (f.model != "generalized" && f.model != "vanilla") {
        throw CsvError(fmt::format("{}:{}: unknown model '{}'", path, get("model").second, f.model));
    }
    f.bass = {number("p"), number("q"), number("m"), number("beta")};
    f.first_year = parse_year(get("first_year").first, fmt::format("{}:{}", path, get("first_year").second));
    f.initial_cumulative = number("initial_cumulative");
    f.scenario = get("scenario").first;
    validate(f.bass);
    return f;
}

void cmd_forecast(const Common& c, const ForecastArgs& a, std::ostream& out) {
    const FittedParams f = read_fitted_params(a.params);
    const std::string ref = a.scenario.empty() ? f.scenario : a.scenario;
    const auto sched = resolve_schedule_ref(ref, config_dir(c.config_dir));
    if (a.to < f.first_year) throw ValidationError("--to precedes the fitted first year");

    const PremiumPath path = lifecycle_path(premium_series(sched, f.first_year, a.to));
    const int horizon = a.to - f.first_year + 1;
    const auto states = f.model == "generalized" ? simulate(f.bass, path, f.first_year, horizon, f.initial_cumulative)
                                                 : simulate(f.bass, f.first_year, horizon, f.initial_cumulative);

    RunManifest m{"forecast", scenario_json(ref, sched), std::nullopt, {{a.params, sha256_file(a.params)}}};
    m.config["to"] = a.to;
    CsvTable t;
    t.comments = with_manifest({"units: predicted_annual and predicted_cumulative in vehicles"}, m);
    t.header = {"year", "predicted_annual", "predicted_cumulative", "lifecycle_premium", "decision_coefficient"};
    for (const auto& s : states) {
        t.rows.push_back({std::to_string(s.year), format_number(s.new_adopters * 1000.0),
                          format_number(s.cumulative * 1000.0), format_number(path.at(s.year)),
                          format_number(s.decision)});
    }
    emit(c, t, out);
}

// sensitivity -----------------------------------------------------------------

struct SensitivityArgs {
    std::string scenario = "long-range";
    int year = 2021;
    std::string premium = "lifecycle";
};

void cmd_sensitivity(const Common& c, const SensitivityArgs& a, std::ostream& out, std::ostream& err) {
    const auto sched = resolve_schedule_ref(a.scenario, config_dir(c.config_dir));
    const PremiumKind kind = parse_premium_kind(a.premium);
    const VehicleScenario base = resolve_scenario(sched, a.year);
    const SensitivityTable table = sensitivity_table(base, default_factors(), kind);

    RunManifest m{"sensitivity", scenario_json(a.scenario, sched), std::nullopt, {}};
    m.config["year"] = a.year;
    m.config["premium"] = a.premium;
    std::vector<std::string> comments{"units: relative premium changes and coefficients are fractions"};
    for (const auto& e : table.errors) {
        comments.push_back(fmt::format("error: {}: {}", e.id, e.message));
        err << "warning: factor " << e.id << ": " << e.message << '\n';
    }
    CsvTable t;
    t.comments = with_manifest(std::move(comments), m);
    t.header = {"group", "factor", "label", "change_m20", "change_m10", "change_p10", "change_p20", "coefficient"};
    for (const auto& r : table.rows) {
        t.rows.push_back({std::string(to_string(r.group)), r.id, r.base_label, format_number(r.change[0]),
                          format_number(r.change[1]), format_number(r.change[2]), format_number(r.change[3]),
                          format_number(r.coefficient)});
    }
    emit(c, t, out);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Green-premium cost model and generalized Bass forecasting", "greenprem"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version));

    Common common;
    GaFlags ga;
    TcoArgs tco;
    SeriesArgs series;
    FitArgs fit;
    ForecastArgs forecast;
    SensitivityArgs sens;
    std::function<void()> action;

    auto* s_tco = app.add_subcommand("tco", "Cost-of-ownership breakdown for one year");
    add_common(s_tco, common);
    s_tco->add_option("--scenario", tco.scenario, "Scenario name or YAML file")->capture_default_str();
    s_tco->add_option("--year", tco.year, "Calendar year")->capture_default_str();
    s_tco->callback([&] { action = [&] { cmd_tco(common, tco, out); }; });

    auto* s_series = app.add_subcommand("premium-series", "Yearly premiums and LCOD");
    add_common(s_series, common);
    s_series->add_option("--scenario", series.scenario, "Scenario name or YAML file")->capture_default_str();
    s_series->add_option("--from", series.from, "First year")->capture_default_str();
    s_series->add_option("--to", series.to, "Last year")->capture_default_str();
    s_series->callback([&] { action = [&] { cmd_premium_series(common, series, out); }; });

    auto* s_parity = app.add_subcommand("parity", "First year each premium reaches zero");
    add_common(s_parity, common);
    s_parity->add_option("--scenario", series.scenario, "Scenario name or YAML file")->capture_default_str();
    s_parity->add_option("--from", series.from, "First year")->capture_default_str();
    s_parity->add_option("--to", series.to, "Last year")->capture_default_str();
    s_parity->callback([&] { action = [&] { cmd_parity(common, series, out); }; });

    auto* s_fit = app.add_subcommand("fit", "Fit Bass parameters to annual sales");
    add_common(s_fit, common);
    add_ga_flags(s_fit, ga);
    s_fit->add_option("--data", fit.data, "Sales CSV (year,annual_sales)")->required();
    s_fit->add_option("--scenario", fit.scenario, "Scenario driving the premium")->capture_default_str();
    s_fit->add_option("--model", fit.model, "generalized or vanilla")->capture_default_str();
    s_fit->callback([&] { action = [&] { cmd_fit(common, fit, ga, out, err); }; });

    auto* s_compare = app.add_subcommand("compare", "Fit vanilla and generalized models side by side");
    add_common(s_compare, common);
    add_ga_flags(s_compare, ga);
    s_compare->add_option("--data", fit.data, "Sales CSV (year,annual_sales)")->required();
    s_compare->add_option("--scenario", fit.scenario, "Scenario driving the premium")->capture_default_str();
    s_compare->callback([&] { action = [&] { cmd_compare(common, fit, ga, out, err); }; });

    auto* s_forecast = app.add_subcommand("forecast", "Simulate sales from fitted parameters");
    add_common(s_forecast, common);
    s_forecast->add_option("--params", forecast.params, "Parameter CSV written by fit")->required();
    s_forecast->add_option("--scenario", forecast.scenario, "Override the scenario stored in the parameters");
    s_forecast->add_option("--to", forecast.to, "Last forecast year")->capture_default_str();
    s_forecast->callback([&] { action = [&] { cmd_forecast(common, forecast, out); }; });

    auto* s_sens = app.add_subcommand("sensitivity", "One-at-a-time sensitivity table");
    add_common(s_sens, common);
    s_sens->add_option("--scenario", sens.scenario, "Scenario name or YAML file")->capture_default_str();
    s_sens->add_option("--year", sens.year, "Base year")->capture_default_str();
    s_sens->add_option("--premium", sens.premium, "lifecycle, acquisition or production")->capture_default_str();
    s_sens->callback([&] { action = [&] { cmd_sensitivity(common, sens, out, err); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        action();
        return exit_ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const ResolutionError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

} // namespace greenprem::cli
