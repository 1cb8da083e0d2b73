#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgad::data {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Splits one CSV line. Handles double-quoted fields with embedded commas
// and doubled quotes; that is as far as the source files go.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments; // leading '#' lines, kept verbatim

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        return -1;
    }
};

// Reads a whole CSV file. Lines starting with '#' are collected as comments
// so emitted artifacts can carry their config echo and still re-parse.
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path);
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            table.comments.push_back(line);
            continue;
        }
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (!have_header) {
            // strip a UTF-8 BOM if present
            if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) {
                fields[0] = fields[0].substr(3);
            }
            table.header = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    if (!have_header) throw IoError("CSV file has no header: " + path);
    return table;
}

// Strict full-string double parse; returns false on trailing garbage.
inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace qgad::data
