#include "config.hpp"
#include "csv.hpp"
#include "manifest.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace greenprem;
using namespace greenprem::cli;
using greenprem::testing::data_path;

namespace {

SalesData sales_from(const std::string& text) {
    std::istringstream in(text);
    return parse_sales_csv(in, "test.csv");
}

std::string error_of(const std::string& text) {
    try {
        sales_from(text);
    } catch (const CsvError& e) {
        return e.what();
    }
    return {};
}

bool schedules_equal(const ScenarioSchedule& a, const ScenarioSchedule& b) {
    if (a.name != b.name || a.vehicle_class != b.vehicle_class || a.last_year != b.last_year) return false;
    if (a.interpolation != b.interpolation || a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        if (a.entries[i].year != b.entries[i].year || a.entries[i].overrides != b.entries[i].overrides) return false;
    }
    return true;
}

} // namespace

TEST(FormatNumber, RoundTripsExactly) {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-12, 18);
    for (int i = 0; i < 5000; ++i) {
        const double v = mant(g) * std::pow(10.0, ex(g));
        const std::string s = format_number(v);
        EXPECT_EQ(parse_number(s, "t"), v) << s;
    }
}

TEST(FormatNumber, PlainNotationInRange) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(100000.0), "100000");
    EXPECT_EQ(format_number(1.52), "1.52");
    EXPECT_EQ(format_number(-0.25), "-0.25");
    EXPECT_NE(format_number(1e-7).find('e'), std::string::npos);
}

TEST(ParseNumber, RejectsGarbage) {
    EXPECT_THROW(parse_number("abc", "t"), CsvError);
    EXPECT_THROW(parse_number("1.5x", "t"), CsvError);
    EXPECT_THROW(parse_number("inf", "t"), CsvError);
    EXPECT_THROW(parse_number("", "t"), CsvError);
    EXPECT_EQ(parse_number("+2.5", "t"), 2.5);
    EXPECT_THROW(parse_year("2010.5", "t"), CsvError);
}

TEST(Csv, WriteThenRead) {
    CsvTable t{{"units: thousands"}, {"a", "b"}, {{"1", "2"}, {"3", "4"}}};
    std::ostringstream out;
    write_csv(out, t);
    EXPECT_EQ(out.str(), "# units: thousands\na,b\n1,2\n3,4\n");
    std::istringstream in(out.str());
    const auto doc = read_csv(in, "mem");
    EXPECT_EQ(doc.comment_value("units"), "thousands");
    EXPECT_EQ(doc.header, (std::vector<std::string>{"a", "b"}));
    ASSERT_EQ(doc.rows.size(), 2u);
    EXPECT_EQ(doc.rows[1].fields[1], "4");
    EXPECT_EQ(doc.rows[1].line, 4);
}

TEST(SalesCsv, ShippedFileHasTwelveRows) {
    const auto data = load_sales_csv(data_path("sales/china_bev_sales.csv"));
    ASSERT_EQ(data.series.points.size(), 12u);
    EXPECT_EQ(data.series.points.front().year, 2010);
    EXPECT_EQ(data.series.points.back().year, 2021);
    const auto expected = greenprem::testing::china_sales();
    for (std::size_t i = 0; i < 12; ++i) {
        EXPECT_EQ(data.series.points[i].annual_sales, expected.points[i].annual_sales);
    }
}

TEST(SalesCsv, UnitsDefaultToVehicles) {
    const auto v = sales_from("year,annual_sales\n2010,5000\n2011,7000\n");
    EXPECT_EQ(v.series.points[0].annual_sales, 5.0);
    const auto k = sales_from("# units: thousands\nyear,annual_sales\n2010,5\n");
    EXPECT_EQ(k.series.points[0].annual_sales, 5.0);
    EXPECT_NE(error_of("# units: tonnes\nyear,annual_sales\n2010,5\n"), "");
}

TEST(SalesCsv, ShuffledEqualsSorted) {
    const auto a = sales_from("year,annual_sales\n2010,1\n2011,2\n2012,3\n");
    const auto b = sales_from("year,annual_sales\n2012,3\n2010,1\n2011,2\n");
    ASSERT_EQ(a.series.points.size(), b.series.points.size());
    for (std::size_t i = 0; i < a.series.points.size(); ++i) {
        EXPECT_EQ(a.series.points[i].year, b.series.points[i].year);
        EXPECT_EQ(a.series.points[i].annual_sales, b.series.points[i].annual_sales);
    }
}

TEST(SalesCsv, ErrorsCarryLineNumbers) {
    EXPECT_NE(error_of("").find("no header row"), std::string::npos);
    EXPECT_NE(error_of("year,sales\n2010,1\n").find("header"), std::string::npos);
    EXPECT_NE(error_of("year,annual_sales\n2010,1\n2010,2\n").find("test.csv:3"), std::string::npos);
    EXPECT_NE(error_of("year,annual_sales\n2010,1\n2011,-2\n").find("test.csv:3"), std::string::npos);
    EXPECT_NE(error_of("# c\nyear,annual_sales\n2010,1\n2011,x\n").find("test.csv:4"), std::string::npos);
    EXPECT_NE(error_of("year,annual_sales\n2010,1,9\n").find("test.csv:2"), std::string::npos);
    EXPECT_THROW(load_sales_csv("/nonexistent/sales.csv"), CsvError);
}

TEST(ScheduleYaml, RoundTripsDefaults) {
    for (const auto cls : {VehicleClass::long_range, VehicleClass::short_range}) {
        const auto s = default_schedule(cls);
        const auto back = parse_schedule_yaml(emit_schedule_yaml(s), "mem");
        EXPECT_TRUE(schedules_equal(s, back)) << to_string(cls);
    }
}

TEST(ScheduleYaml, ShippedFilesMatchBuiltIns) {
    for (const auto cls : {VehicleClass::long_range, VehicleClass::short_range}) {
        const auto file = load_schedule_file(data_path("scenarios/" + std::string(to_string(cls)) + ".yaml"));
        EXPECT_TRUE(schedules_equal(file, default_schedule(cls))) << to_string(cls);
    }
}

TEST(ScheduleYaml, RejectsBadInput) {
    EXPECT_THROW(parse_schedule_yaml("- 1\n- 2\n", "mem"), ConfigError);
    EXPECT_THROW(parse_schedule_yaml("name: x\nvehicle_class: long-range\n", "mem"), ConfigError);
    EXPECT_THROW(parse_schedule_yaml("name: x\nvehicle_class: long-range\nentries:\n  - year: 2010\n    ev:\n"
                                     "      warp_drive: 1\n",
                                     "mem"),
                 ConfigError);
    EXPECT_THROW(parse_schedule_yaml("name: x\nvehicle_class: mid\nentries:\n  - year: 2010\n", "mem"),
                 ConfigError);
    EXPECT_THROW(parse_schedule_yaml("name: [unclosed\n", "mem"), ConfigError);
}

TEST(ScheduleRef, Resolution) {
    EXPECT_TRUE(schedules_equal(resolve_schedule_ref("long-range", std::nullopt),
                                default_schedule(VehicleClass::long_range)));
    EXPECT_TRUE(schedules_equal(resolve_schedule_ref(data_path("scenarios/short-range.yaml"), std::nullopt),
                                default_schedule(VehicleClass::short_range)));
    EXPECT_TRUE(schedules_equal(resolve_schedule_ref("short-range", data_path("scenarios")),
                                default_schedule(VehicleClass::short_range)));
    EXPECT_THROW(resolve_schedule_ref("mid-range", std::nullopt), ConfigError);
    EXPECT_THROW(resolve_schedule_ref("mid-range", data_path("scenarios")), ConfigError);
    EXPECT_THROW(resolve_schedule_ref("a/b", std::nullopt), ConfigError);
}

TEST(FitConfigFile, OverridesDefaults) {
    const auto path = std::filesystem::temp_directory_path() / "greenprem_fit_cfg_test.yaml";
    {
        std::ofstream f(path);
        f << "population_size: 50\nq_bounds: [0.05, 0.9]\nm_mode: free\nearly_stop: false\n";
    }
    const FitConfig cfg = load_fit_config(path.string(), FitConfig{});
    EXPECT_EQ(cfg.population_size, 50);
    EXPECT_EQ(cfg.q_bounds.lo, 0.05);
    EXPECT_EQ(cfg.q_bounds.hi, 0.9);
    EXPECT_EQ(cfg.m_mode, MarketMode::free);
    EXPECT_FALSE(cfg.early_stop);
    EXPECT_EQ(cfg.max_generations, 500);
    {
        std::ofstream f(path);
        f << "populaton_size: 50\n";
    }
    EXPECT_THROW(load_fit_config(path.string(), FitConfig{}), ConfigError);
    std::filesystem::remove(path);
}

TEST(Manifest, KnownDigestAndSelfHash) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    RunManifest m;
    m.command = "fit";
    m.rng_seed = 7;
    m.inputs = {{"/some/dir/sales.csv", sha256_hex("x")}};
    const auto lines = m.comment_lines();
    ASSERT_EQ(lines.size(), 2u);
    const std::string json = lines[0].substr(std::string("manifest: ").size());
    EXPECT_EQ(lines[1], "manifest-sha256: " + sha256_hex(json));
    const auto j = nlohmann::json::parse(json);
    EXPECT_EQ(j["command"], "fit");
    EXPECT_EQ(j["rng_seed"], 7);
    EXPECT_EQ(j["inputs"][0]["file"], "sales.csv");
}
