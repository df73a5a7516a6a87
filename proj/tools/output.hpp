#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace polpair::cli {

using Cell = std::variant<double, long long, std::string>;

// Formats a double with 17 significant digits ("%.17g").
std::string format_double(double v);

/*!
 * CSV table with '#'-prefixed header lines. Doubles are written with 17
 * significant digits so a re-read reproduces them exactly.
 */
struct CsvTable {
    std::vector<std::string> header;   // without the leading "# "
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void write(const std::filesystem::path& path) const;
};

struct ParsedCsv {
    std::vector<std::string> header;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

ParsedCsv read_csv(const std::filesystem::path& path);

struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct SvgPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgSeries> series;

    // Minimal polyline document; non-finite points break a series.
    void write(const std::filesystem::path& path) const;
};

// Writes text, throwing IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace polpair::cli
