#include "zana/csv.hpp"

#include <fstream>

#include "zana/errors.hpp"

namespace zana {

std::string csv_escape(const std::string& s) {
    bool need_quotes = false;
    for (char c : s) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            need_quotes = true;
            break;
        }
    }
    if (!need_quotes) return s;
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        cur.push_back('"');
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    cur.push_back(c);
                }
            } else if (c == '"' && cur.empty()) {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (quoted) throw ParseError("unterminated quote", line_no);
        fields.push_back(std::move(cur));
        rows.push_back(std::move(fields));
    }
    return rows;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(fields[i]);
    }
    os << '\n';
}

std::string pct_one_decimal(std::uint64_t part, std::uint64_t whole) {
    if (whole == 0) return "0.0";
    // round(1000 * part / whole) then render as d.d
    std::uint64_t scaled = (part * 1000 + whole / 2) / whole;
    return std::to_string(scaled / 10) + "." + std::to_string(scaled % 10);
}

} // namespace zana
