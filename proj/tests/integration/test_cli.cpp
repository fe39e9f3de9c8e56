#include "csv.hpp"

#include "greenprem/diffusion.hpp"
#include "greenprem/fitting.hpp"
#include "greenprem/sensitivity.hpp"
#include "greenprem/trajectory.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;
using namespace greenprem;
using greenprem::testing::data_path;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("greenprem_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Outcome run(const std::string& args, const std::string& env = "") {
        const fs::path out = dir_ / "stdout.txt";
        const fs::path err = dir_ / "stderr.txt";
        const std::string cmd = env + " \"" GREENPREM_BIN "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                                err.string() + "\"";
        const int status = std::system(cmd.c_str());
        Outcome o;
        o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        o.out = slurp(out);
        o.err = slurp(err);
        return o;
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

cli::CsvDocument parse(const std::string& text) {
    std::istringstream in(text);
    return cli::read_csv(in, "output");
}

std::map<std::string, std::string> key_values(const cli::CsvDocument& doc) {
    std::map<std::string, std::string> kv;
    for (const auto& r : doc.rows) kv[r.fields.at(0)] = r.fields.at(1);
    return kv;
}

const std::string small_ga = " --population 80 --generations 60";

} // namespace

TEST_F(Cli, PremiumSeriesHasTwentyOneRows) {
    const auto o = run("premium-series --scenario long-range --from 2010 --to 2030");
    ASSERT_EQ(o.code, 0) << o.err;
    const auto doc = parse(o.out);
    EXPECT_EQ(doc.rows.size(), 21u);
    EXPECT_EQ(doc.header, (std::vector<std::string>{"year", "production_premium", "acquisition_premium",
                                                    "lifecycle_premium", "lcod_icev", "lcod_ev"}));
    EXPECT_EQ(doc.rows.front().fields[0], "2010");
    EXPECT_EQ(doc.rows.back().fields[0], "2030");
    EXPECT_FALSE(doc.comment_value("manifest").empty());
}

TEST_F(Cli, TcoAndParityAndSensitivity) {
    const auto tco = run("tco --scenario short-range --year 2021");
    ASSERT_EQ(tco.code, 0) << tco.err;
    const auto t = parse(tco.out);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_NEAR(cli::parse_number(t.rows[0].fields.back(), "lcod"), 1.41, 0.05);

    const auto parity = run("parity --scenario long-range");
    ASSERT_EQ(parity.code, 0) << parity.err;
    const auto p = key_values(parse(parity.out));
    EXPECT_EQ(p.at("lifecycle"), "2018");

    const auto sens = run("sensitivity --scenario long-range --year 2021");
    ASSERT_EQ(sens.code, 0) << sens.err;
    EXPECT_EQ(parse(sens.out).rows.size(), default_factors().size());
}

TEST_F(Cli, FitIsByteIdenticalForSameSeed) {
    const std::string args = "fit --data \"" + data_path("sales/china_bev_sales.csv") + "\" --scenario long-range" +
                             small_ga + " --seed 7 --out ";
    ASSERT_EQ(run(args + path("a.csv")).code, 0);
    ASSERT_EQ(run(args + path("b.csv")).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_FALSE(slurp(path("a.csv")).empty());
}

TEST_F(Cli, ForecastMatchesLibraryAndReproducesRSquared) {
    const auto fit = run("fit --data \"" + data_path("sales/china_bev_sales.csv") + "\"" + small_ga +
                         " --seed 3 --out " + path("fit.csv"));
    ASSERT_EQ(fit.code, 0) << fit.err;
    const auto kv = key_values(cli::read_csv_file(path("fit.csv")));
    const BassParams bp{cli::parse_number(kv.at("p"), "p"), cli::parse_number(kv.at("q"), "q"),
                        cli::parse_number(kv.at("m"), "m"), cli::parse_number(kv.at("beta"), "beta")};

    const auto fc = run("forecast --params " + path("fit.csv") + " --to 2030");
    ASSERT_EQ(fc.code, 0) << fc.err;
    const auto doc = parse(fc.out);
    ASSERT_EQ(doc.rows.size(), 21u);

    const auto path_ = lifecycle_path(premium_series(default_schedule(VehicleClass::long_range), 2010, 2030));
    const auto sim = simulate(bp, path_, 2010, 21, 0.0);
    std::vector<double> predicted;
    for (std::size_t i = 0; i < doc.rows.size(); ++i) {
        const auto& f = doc.rows[i].fields;
        const double annual = cli::parse_number(f[1], "annual");
        EXPECT_NEAR(annual, sim[i].new_adopters * 1000.0, 1e-9 * std::max(1.0, annual));
        EXPECT_NEAR(cli::parse_number(f[2], "cum"), sim[i].cumulative * 1000.0, 1e-9 * std::max(1.0, annual));
        EXPECT_EQ(cli::parse_number(f[3], "dp3"), path_.at(sim[i].year));
        EXPECT_NEAR(cli::parse_number(f[4], "x"), sim[i].decision, 1e-15);
        if (sim[i].year <= 2021) predicted.push_back(annual);
    }

    std::vector<double> observed;
    for (const auto& o : greenprem::testing::china_sales().points) observed.push_back(o.annual_sales * 1000.0);
    EXPECT_NEAR(r_squared(predicted, observed), cli::parse_number(kv.at("r_squared"), "r2"), 1e-9);
}

TEST_F(Cli, CompareReportsBothModels) {
    const auto o = run("compare --data \"" + data_path("sales/china_bev_sales.csv") + "\"" + small_ga + " --seed 5");
    ASSERT_EQ(o.code, 0) << o.err;
    const auto doc = parse(o.out);
    ASSERT_EQ(doc.rows.size(), 2u);
    EXPECT_EQ(doc.rows[0].fields[0], "vanilla");
    EXPECT_EQ(doc.rows[1].fields[0], "generalized");
    EXPECT_EQ(doc.rows[0].fields[4], "0");
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("--help").code, 0);
    EXPECT_EQ(run("premium-series --bogus").code, 1);
    EXPECT_EQ(run("nonsense").code, 1);
    EXPECT_EQ(run("fit").code, 1);
    EXPECT_EQ(run("tco --scenario mid-range").code, 1);
    EXPECT_EQ(run("tco --year 2040").code, 1);
    EXPECT_EQ(run("fit --data /nonexistent.csv").code, 1);

    // Zero annual distance passes validation but has no defined LCOD.
    std::string yaml = slurp(data_path("scenarios/long-range.yaml"));
    yaml = std::regex_replace(yaml, std::regex("annual_km: 15000"), "annual_km: 0");
    std::ofstream(path("idle.yaml")) << yaml;
    const auto o = run("tco --scenario " + path("idle.yaml"));
    EXPECT_EQ(o.code, 2) << o.err;
    EXPECT_FALSE(o.err.empty());
}

TEST_F(Cli, ConfigDirFromEnvironment) {
    std::string yaml = slurp(data_path("scenarios/short-range.yaml"));
    yaml = std::regex_replace(yaml, std::regex("name: short-range"), "name: custom");
    std::ofstream(path("custom.yaml")) << yaml;
    const auto with_env = run("premium-series --scenario custom", "GREENPREM_CONFIG_DIR=\"" + dir_.string() + "\"");
    ASSERT_EQ(with_env.code, 0) << with_env.err;
    const auto with_flag = run("premium-series --scenario custom --config-dir \"" + dir_.string() + "\"");
    ASSERT_EQ(with_flag.code, 0) << with_flag.err;
    EXPECT_EQ(with_env.out, with_flag.out);
    EXPECT_EQ(run("premium-series --scenario custom").code, 1);
}

TEST_F(Cli, MissingSeedIsPrintedAndReplayable) {
    const std::string base = "fit --data \"" + data_path("sales/china_bev_sales.csv") + "\"" + small_ga;
    const auto first = run(base + " --out " + path("a.csv"));
    ASSERT_EQ(first.code, 0) << first.err;
    std::smatch m;
    ASSERT_TRUE(std::regex_search(first.err, m, std::regex("seed: ([0-9]+)")));
    ASSERT_EQ(run(base + " --seed " + m[1].str() + " --out " + path("b.csv")).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, SourceDateEpochSetsTimestamp) {
    const auto o = run("parity", "SOURCE_DATE_EPOCH=86400");
    ASSERT_EQ(o.code, 0);
    EXPECT_NE(o.out.find("\"timestamp\":\"1970-01-02T00:00:00Z\""), std::string::npos);
    EXPECT_NE(run("parity").out.find("\"timestamp\":null"), std::string::npos);
}
