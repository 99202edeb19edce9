#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace cmvlab::cli {

/// One CSV/JSON cell; monostate is written as an empty field (null in JSON).
using Cell = std::variant<std::monostate, long, std::uint64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

enum class Format { Csv, Json };

Format parse_format(const std::string& s);

/// Writes to `path`, or to `fallback` when path is empty or "-". Unwritable paths raise ParameterError.
void emit(const Table& t, Format f, const std::string& path, std::ostream& fallback);
void write_csv(std::ostream& os, const Table& t);
void write_json(std::ostream& os, const Table& t);

/// `key = value` lines, `#` comments, blank lines ignored.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config(const std::string& path);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;  // already on the plotted scale
    bool has_fit = false;
    double slope = 0.0;
    double intercept = 0.0;
};

/// Minimal standalone SVG line chart.
std::string svg_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series);

/// Exit codes: 0 success, 1 failed check, 2 parameter error, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmvlab::cli
