#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cefsim::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based line number of each row in the source, for diagnostics.
    std::vector<std::size_t> line_numbers;

    // Index of a header column, matched case-insensitively after trimming.
    std::optional<std::size_t> column(std::string_view name) const;
};

// RFC 4180 style reader: comma separated, double-quote escaping, optional
// UTF-8 BOM, blank lines skipped.
Table read(std::istream& in);
Table read_file(const std::string& path);

std::vector<std::string> split_line(std::string_view line);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Empty / "nan" / "n/a" cells parse to nullopt. Malformed numbers also
// return nullopt; callers decide whether that is fatal.
std::optional<double> parse_number(std::string_view cell);

// Fixed 6 significant digit formatting used for every numeric CSV cell.
std::string format_number(double value);

std::string quote(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace cefsim::csv
