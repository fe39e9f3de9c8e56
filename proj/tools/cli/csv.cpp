#include "csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace greenprem::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[512];
    const double mag = std::abs(v);
    const auto format = mag >= 1e-4 && mag < 1e15 ? std::chars_format::fixed : std::chars_format::scientific;
    const auto res = std::to_chars(buf, buf + sizeof buf, v, format);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::string_view context) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw CsvError(fmt::format("{}: '{}' is not a finite number", context, text));
    }
    return v;
}

int parse_year(std::string_view text, std::string_view context) {
    text = trim(text);
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw CsvError(fmt::format("{}: '{}' is not a year", context, text));
    }
    return v;
}

std::string CsvDocument::comment_value(std::string_view key) const {
    for (const auto& c : comments) {
        const std::string_view sv(c);
        if (sv.size() > key.size() && sv.substr(0, key.size()) == key && sv[key.size()] == ':') {
            return std::string(trim(sv.substr(key.size() + 1)));
        }
    }
    return {};
}

CsvDocument read_csv(std::istream& in, std::string_view source) {
    CsvDocument doc;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (sv.front() == '#') {
            doc.comments.emplace_back(trim(sv.substr(1)));
            continue;
        }
        auto fields = split(sv);
        if (!have_header) {
            doc.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != doc.header.size()) {
            throw CsvError(fmt::format("{}:{}: expected {} fields, found {}", source, lineno, doc.header.size(),
                                       fields.size()));
        }
        doc.rows.push_back({lineno, std::move(fields)});
    }
    if (!have_header) throw CsvError(fmt::format("{}: no header row", source));
    return doc;
}

CsvDocument read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError(fmt::format("cannot open '{}'", path));
    return read_csv(in, path);
}

void write_csv(std::ostream& out, const CsvTable& table) {
    auto write_row = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out << ',';
            out << fields[i];
        }
        out << '\n';
    };
    for (const auto& c : table.comments) out << "# " << c << '\n';
    write_row(table.header);
    for (const auto& r : table.rows) write_row(r);
}

SalesData parse_sales_csv(std::istream& in, std::string_view source) {
    const CsvDocument doc = read_csv(in, source);
    if (doc.header != std::vector<std::string>{"year", "annual_sales"}) {
        throw CsvError(fmt::format("{}: header must be 'year,annual_sales'", source));
    }
    if (doc.rows.empty()) throw CsvError(fmt::format("{}: no data rows", source));

    SalesData data;
    data.units = doc.comment_value("units");
    if (data.units.empty()) data.units = "vehicles";
    double divisor = 0.0;
    if (data.units == "vehicles") {
        divisor = 1000.0;
    } else if (data.units == "thousands") {
        divisor = 1.0;
    } else {
        throw CsvError(fmt::format("{}: unknown units '{}'", source, data.units));
    }

    std::vector<Observation> points;
    std::vector<int> lines;
    for (const auto& row : doc.rows) {
        const std::string where = fmt::format("{}:{}", source, row.line);
        Observation o{parse_year(row.fields[0], where), parse_number(row.fields[1], where)};
        if (o.annual_sales < 0.0) throw CsvError(fmt::format("{}: negative sales", where));
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].year == o.year) {
                throw CsvError(fmt::format("{}: duplicate year {} (first seen on line {})", where, o.year, lines[i]));
            }
        }
        o.annual_sales /= divisor;
        points.push_back(o);
        lines.push_back(row.line);
    }
    data.series = make_observations(std::move(points));
    return data;
}

SalesData load_sales_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError(fmt::format("cannot open '{}'", path));
    return parse_sales_csv(in, path);
}

} // namespace greenprem::cli
