#pragma once

// Minimal CSV dialect: comma separated, '\n' line endings, one header row,
// '#' comment lines. Fields never contain commas or quotes.

#include "greenprem/errors.hpp"
#include "greenprem/fitting.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace greenprem::cli {

/// Malformed CSV input; the message carries the source and line number.
struct CsvError : ValidationError {
    using ValidationError::ValidationError;
};

/// Shortest decimal text that parses back to the same double; plain notation
/// for magnitudes in [1e-4, 1e15), scientific otherwise.
std::string format_number(double v);

double parse_number(std::string_view text, std::string_view context);
int parse_year(std::string_view text, std::string_view context);

struct CsvRow {
    int line = 0;
    std::vector<std::string> fields;
};

struct CsvDocument {
    std::vector<std::string> comments; ///< text after '#', leading space trimmed
    std::vector<std::string> header;
    std::vector<CsvRow> rows;

    /// Value of a "# key: value" comment, or empty.
    std::string comment_value(std::string_view key) const;
};

CsvDocument read_csv(std::istream& in, std::string_view source);
CsvDocument read_csv_file(const std::string& path);

struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& out, const CsvTable& table);

struct SalesData {
    ObservationSeries series; ///< thousands of vehicles
    std::string units;        ///< as declared in the file
};

/// Reads `year,annual_sales`; a "# units: vehicles|thousands" comment selects
/// the unit (vehicles when absent).
SalesData load_sales_csv(const std::string& path);
SalesData parse_sales_csv(std::istream& in, std::string_view source);

} // namespace greenprem::cli
