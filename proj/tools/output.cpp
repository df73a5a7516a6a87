#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "polpair/errors.hpp"

namespace polpair::cli {

namespace {

std::string cell_text(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) {
        return format_double(*d);
    }
    if (const auto* i = std::get_if<long long>(&c)) {
        return fmt::format("{}", *i);
    }
    return std::get<std::string>(c);
}

std::vector<std::string> split_commas(const std::string& line)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, ',')) {
        out.push_back(item);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError(fmt::format("write to '{}' failed", path.string()));
    }
}

void CsvTable::write(const std::filesystem::path& path) const
{
    std::string text;
    for (const auto& h : header) {
        text += "# " + h + "\n";
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        text += (i ? "," : "") + columns[i];
    }
    text += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                text += ',';
            }
            text += cell_text(row[i]);
        }
        text += "\n";
    }
    write_text(path, text);
}

ParsedCsv read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot read '{}'", path.string()));
    }
    ParsedCsv out;
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            out.header.push_back(line.substr(2));
        } else if (!have_columns) {
            out.columns = split_commas(line);
            have_columns = true;
        } else if (!line.empty()) {
            out.rows.push_back(split_commas(line));
        }
    }
    return out;
}

void SvgPlot::write(const std::filesystem::path& path) const
{
    constexpr double width = 640.0;
    constexpr double height = 480.0;
    constexpr double margin = 60.0;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = x0;
    double y1 = -x0;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (std::isfinite(x) && std::isfinite(y)) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
        }
    }
    if (!(x1 > x0)) {
        x0 = std::isfinite(x0) ? x0 - 1.0 : 0.0;
        x1 = x0 + 2.0;
    }
    if (!(y1 > y0)) {
        y0 = std::isfinite(y0) ? y0 - 1.0 : 0.0;
        y1 = y0 + 2.0;
    }
    auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
    auto py = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n", width,
        height);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n", width / 2,
                       escape_xml(title));
    svg += fmt::format("<rect x=\"{0}\" y=\"{0}\" width=\"{1}\" height=\"{2}\" fill=\"none\" stroke=\"black\"/>\n",
                       margin, width - 2 * margin, height - 2 * margin);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n", width / 2,
                       height - 15, escape_xml(x_label));
    svg += fmt::format(
        "<text x=\"15\" y=\"{0}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 {0})\">{1}</text>\n",
        height / 2, escape_xml(y_label));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\">{:.4g}</text>\n", margin, height - margin + 14, x0);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{:.4g}</text>\n", width - margin,
                       height - margin + 14, x1);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{:.4g}</text>\n", margin - 4,
                       height - margin, y0);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{:.4g}</text>\n", margin - 4,
                       margin + 4, y1);

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = colors[si % std::size(colors)];
        std::string pts;
        auto flush = [&]() {
            if (!pts.empty()) {
                svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color,
                                   pts);
                pts.clear();
            }
        };
        for (const auto& [x, y] : series[si].points) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                flush();
                continue;
            }
            pts += fmt::format("{}{:.2f},{:.2f}", pts.empty() ? "" : " ", px(x), py(y));
        }
        flush();
        svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{}\">{}</text>\n", width - margin + 4,
                           margin + 14 * (si + 1), color, escape_xml(series[si].label));
    }
    svg += "</svg>\n";
    write_text(path, svg);
}

}  // namespace polpair::cli
