#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tracefeed {

/// Delimited text file held as strings: one header row, then data rows.
/// Every row carries exactly header-size cells; shorter source rows are a
/// load-time reject, not a representable state.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Whole-file read; throws IoError when unreadable.
std::string read_file(const std::filesystem::path& path);

/// RFC 4180 style: quoted cells, doubled quotes, CR tolerated before LF.
std::vector<std::string> split_csv_line(const std::string& line, char delimiter);

/// Parses a delimited file with a header row. Rows whose cell count differs
/// from the header are kept as-is (callers decide whether to reject them).
RawTable read_table(const std::filesystem::path& path, char delimiter);

/// Quotes the field only when it contains the delimiter, a quote or a newline.
std::string csv_escape(const std::string& field, char delimiter);

/// Shortest round-trip decimal rendering, locale independent.
std::string format_double(double value);

}  // namespace tracefeed
