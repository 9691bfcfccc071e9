#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ancestral::io {

/// Shortest-safe fixed rendering used by every emitted artifact:
/// 17 significant digits, `.` decimal separator.
std::string format_real(double value);

/// Writes `# schema: <name>/<version>` followed by the header row.
void write_csv_preamble(std::ostream& out, std::string_view schema,
                        const std::vector<std::string>& columns);

struct CsvTable {
    std::string schema;  // empty if the file carried no schema comment
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Column position by name; throws std::out_of_range if missing.
    std::size_t column(std::string_view name) const;
};

/// Reads a table produced by write_csv_preamble. Lines starting with `#`
/// are comments; the first non-comment line is the header.
CsvTable read_csv(std::istream& in);

std::vector<std::string> split(std::string_view text, char sep);

}  // namespace ancestral::io
