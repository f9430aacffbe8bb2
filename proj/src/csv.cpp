#include "tracefeed/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tracefeed/model.hpp"

namespace tracefeed {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on: " + path.string());
    return std::move(buf).str();
}

std::vector<std::string> split_csv_line(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"') {
            if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else {
                quoted = !quoted;
            }
        } else if (c == delimiter && !quoted) {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\r' && i + 1 == line.size()) {
            continue;
        } else {
            cell += c;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

RawTable read_table(const std::filesystem::path& path, char delimiter) {
    const std::string content = read_file(path);
    RawTable table;
    std::size_t pos = 0;
    bool first = true;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto cells = split_csv_line(line, delimiter);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    if (first) throw SchemaError("file has no header row: " + path.string());
    return table;
}

std::string csv_escape(const std::string& field, char delimiter) {
    bool needs_quote = false;
    for (char c : field) {
        if (c == delimiter || c == '"' || c == '\n' || c == '\r') {
            needs_quote = true;
            break;
        }
    }
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

}  // namespace tracefeed
