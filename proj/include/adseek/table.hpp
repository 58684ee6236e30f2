#pragma once

// Plain CSV tables with a unit comment block. Reals are printed with 9
// significant digits so identical inputs give byte-identical files.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace adseek {

struct Column {
    std::string name;
    std::string unit;  // "" for dimensionless or text columns
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<Column> schema;
    std::vector<std::vector<Cell>> rows;

    /// Throws InvalidArgument if the row width does not match the schema.
    void add_row(std::vector<Cell> row);
};

/// Formats one cell: reals as %.9g (nan/inf spelled out), strings verbatim
/// unless they contain a comma or quote, in which case they are quoted.
std::string format_cell(const Cell& c);

void write_table(std::ostream& os, const Table& t);

/// Writes the table to `path`. Throws IoError naming the path on failure.
void emit_table(const Table& t, const std::filesystem::path& path);

/// Reads back a file written by emit_table. Cells that parse as numbers become
/// doubles; everything else stays a string. Units are recovered from the
/// comment block.
Table parse_table(std::istream& is);
Table parse_table(const std::filesystem::path& path);

}  // namespace adseek
