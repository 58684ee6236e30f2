#include "adseek/table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "adseek/errors.hpp"

namespace adseek {

namespace {

std::string format_real(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    return out + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

Cell parse_cell(const std::string& s) {
    if (s.empty()) {
        return s;
    }
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() + s.size()) {
        return v;
    }
    return s;
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != schema.size()) {
        throw InvalidArgument("table row has " + std::to_string(row.size()) + " cells, schema has " +
                              std::to_string(schema.size()));
    }
    rows.push_back(std::move(row));
}

std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        return format_real(*d);
    }
    if (const auto* i = std::get_if<long long>(&c)) {
        return std::to_string(*i);
    }
    return quote(std::get<std::string>(c));
}

void write_table(std::ostream& os, const Table& t) {
    for (const auto& col : t.schema) {
        os << "# " << col.name << " [" << (col.unit.empty() ? "-" : col.unit) << "]\n";
    }
    for (std::size_t j = 0; j < t.schema.size(); ++j) {
        os << (j ? "," : "") << t.schema[j].name;
    }
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            os << (j ? "," : "") << format_cell(row[j]);
        }
        os << '\n';
    }
}

void emit_table(const Table& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_table(out, t);
    out.flush();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

Table parse_table(std::istream& is) {
    Table t;
    std::vector<std::string> units;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.starts_with("# ")) {
            const auto open = line.rfind(" [");
            if (open != std::string::npos && line.back() == ']') {
                std::string u = line.substr(open + 2, line.size() - open - 3);
                units.push_back(u == "-" ? "" : u);
            }
            continue;
        }
        if (!have_header) {
            const auto names = split_csv(line);
            for (std::size_t j = 0; j < names.size(); ++j) {
                t.schema.push_back({names[j], j < units.size() ? units[j] : ""});
            }
            have_header = true;
            continue;
        }
        std::vector<Cell> row;
        for (const auto& s : split_csv(line)) {
            row.push_back(parse_cell(s));
        }
        t.add_row(std::move(row));
    }
    return t;
}

Table parse_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    return parse_table(in);
}

}  // namespace adseek
