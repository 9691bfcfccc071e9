#include "ancestral/io.hpp"

#include <fmt/format.h>

#include <istream>
#include <ostream>
#include <stdexcept>

namespace ancestral::io {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

void write_csv_preamble(std::ostream& out, std::string_view schema,
                        const std::vector<std::string>& columns) {
    out << "# schema: " << schema << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out << ',';
        out << columns[i];
    }
    out << '\n';
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::out_of_range("no column named " + std::string(name));
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(text.substr(start));
            return parts;
        }
        parts.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    constexpr std::string_view schema_tag = "# schema: ";
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (line.rfind(schema_tag, 0) == 0) table.schema = line.substr(schema_tag.size());
            continue;
        }
        auto fields = split(line, ',');
        if (!have_header) {
            table.columns = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.columns.size())
            throw std::runtime_error("csv row has " + std::to_string(fields.size()) +
                                     " fields, header has " +
                                     std::to_string(table.columns.size()));
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) throw std::runtime_error("csv input has no header row");
    return table;
}

}  // namespace ancestral::io
