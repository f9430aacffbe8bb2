#include "tracefeed/ingest.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>

#include "tracefeed/csv.hpp"
#include "tracefeed/parallel.hpp"
#include "tracefeed/time_util.hpp"

namespace tracefeed {

namespace {

struct ColumnIndex {
    std::size_t device_id, timestamp, latitude, longitude, speed;
    std::size_t route_id = SIZE_MAX;  // SIZE_MAX = column absent
    std::size_t width;
};

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw SchemaError("header is missing mapped column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

ColumnIndex resolve_columns(const std::vector<std::string>& header, const FieldMapping& m) {
    ColumnIndex idx{};
    idx.device_id = find_column(header, m.device_id);
    idx.timestamp = find_column(header, m.timestamp);
    idx.latitude = find_column(header, m.latitude);
    idx.longitude = find_column(header, m.longitude);
    idx.speed = find_column(header, m.speed);
    if (!m.route_id.empty()) idx.route_id = find_column(header, m.route_id);
    idx.width = header.size();
    return idx;
}

bool parse_number(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    return errno == 0 && end == begin + text.size() && std::isfinite(out);
}

double speed_to_kmh(double value, SpeedUnit unit) {
    switch (unit) {
        case SpeedUnit::kmh: return value;
        case SpeedUnit::ms: return value * 3.6;
        case SpeedUnit::mph: return value * 1.609344;
    }
    return value;
}

struct ChunkResult {
    std::vector<GpsRecord> records;
    std::vector<std::size_t> accepted_indices;
    std::vector<RejectedRow> rejected;
    std::size_t rows = 0;
};

void parse_row(const std::string& line, std::size_t row_index, char delimiter,
               const ColumnIndex& idx, const FieldMapping& mapping,
               std::int64_t input_offset_s, ChunkResult& out) {
    ++out.rows;
    const auto cells = split_csv_line(line, delimiter);
    if (cells.size() != idx.width) {
        out.rejected.push_back({row_index, "cell-count",
                                "expected " + std::to_string(idx.width) + " cells, got " +
                                    std::to_string(cells.size())});
        return;
    }
    const std::string& device = cells[idx.device_id];
    if (device.empty()) {
        out.rejected.push_back({row_index, "missing-field", "device_id is empty"});
        return;
    }
    const auto ts = parse_timestamp(cells[idx.timestamp], mapping.timestamp_format,
                                    mapping.timestamp_pattern, input_offset_s);
    if (!ts) {
        out.rejected.push_back({row_index, "bad-timestamp", cells[idx.timestamp]});
        return;
    }
    double lat, lon;
    if (!parse_number(cells[idx.latitude], lat) || !parse_number(cells[idx.longitude], lon)) {
        out.rejected.push_back({row_index, "bad-coordinate",
                                cells[idx.latitude] + "," + cells[idx.longitude]});
        return;
    }
    if (!valid_latitude(lat) || !valid_longitude(lon)) {
        out.rejected.push_back({row_index, "coordinate-range",
                                cells[idx.latitude] + "," + cells[idx.longitude]});
        return;
    }
    double speed;
    if (!parse_number(cells[idx.speed], speed) ||
        speed_to_kmh(speed, mapping.speed_unit) < 0.0) {
        out.rejected.push_back({row_index, "bad-speed", cells[idx.speed]});
        return;
    }
    std::string route = idx.route_id == SIZE_MAX ? std::string{} : cells[idx.route_id];
    out.records.emplace_back(device, *ts, lat, lon, speed_to_kmh(speed, mapping.speed_unit),
                             std::move(route));
    out.accepted_indices.push_back(row_index);
}

}  // namespace

GpsLoadResult load_gps(const std::filesystem::path& path, const FieldMapping& mapping,
                       const PipelineConfig& config) {
    validate_mapping(mapping);
    const std::string content = read_file(path);

    // Line offsets, header first. Blank lines are skipped, not counted as rows.
    std::vector<std::pair<std::size_t, std::size_t>> lines;  // [begin, end)
    for (std::size_t pos = 0; pos < content.size();) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::size_t end = eol;
        if (end > pos && content[end - 1] == '\r') --end;
        if (end > pos) lines.emplace_back(pos, end);
        pos = eol + 1;
    }
    if (lines.empty()) throw SchemaError("file has no header row: " + path.string());

    const std::string header_line = content.substr(lines[0].first,
                                                   lines[0].second - lines[0].first);
    const auto header = split_csv_line(header_line, config.delimiter);
    const ColumnIndex idx = resolve_columns(header, mapping);

    const std::size_t data_rows = lines.size() - 1;
    const std::int64_t input_offset_s =
        mapping.input_utc_offset.empty() ? 0 : parse_utc_offset(mapping.input_utc_offset);
    const unsigned workers = config.resolved_workers();
    std::size_t chunk_count = std::min<std::size_t>(data_rows, std::size_t{workers} * 4);
    if (chunk_count == 0) chunk_count = 1;
    const std::size_t chunk_size = (data_rows + chunk_count - 1) / chunk_count;

    std::vector<ChunkResult> chunks(chunk_count);
    parallel_for(chunk_count, workers, [&](std::size_t c) {
        const std::size_t begin = c * chunk_size;
        const std::size_t end = std::min(begin + chunk_size, data_rows);
        ChunkResult& out = chunks[c];
        for (std::size_t r = begin; r < end; ++r) {
            const auto [lb, le] = lines[r + 1];
            parse_row(content.substr(lb, le - lb), r, config.delimiter, idx, mapping,
                      input_offset_s, out);
        }
    });

    GpsLoadResult result;
    result.total_rows = data_rows;
    for (auto& chunk : chunks) {
        result.records.insert(result.records.end(),
                              std::make_move_iterator(chunk.records.begin()),
                              std::make_move_iterator(chunk.records.end()));
        result.accepted_indices.insert(result.accepted_indices.end(),
                                       chunk.accepted_indices.begin(),
                                       chunk.accepted_indices.end());
        result.rejected.insert(result.rejected.end(),
                               std::make_move_iterator(chunk.rejected.begin()),
                               std::make_move_iterator(chunk.rejected.end()));
    }

    // Mass rejection signals a wrong field mapping; compare in basis points
    // so a corpus at exactly the ceiling still loads.
    const std::int64_t ceiling_bp = std::llround(config.reject_ratio_ceiling * 10000.0);
    if (static_cast<std::int64_t>(result.rejected.size()) * 10000 >
        ceiling_bp * static_cast<std::int64_t>(result.total_rows)) {
        throw IoError("reject ratio " + std::to_string(result.rejected.size()) + "/" +
                      std::to_string(result.total_rows) + " exceeds ceiling in " + path.string());
    }
    return result;
}

std::pair<TerminalPoint, TerminalPoint> load_terminals(const std::filesystem::path& path,
                                                       const PipelineConfig& config) {
    const RawTable table = read_table(path, config.delimiter);
    const std::size_t id = find_column(table.header, "terminal_id");
    const std::size_t name = find_column(table.header, "name");
    const std::size_t lat = find_column(table.header, "latitude");
    const std::size_t lon = find_column(table.header, "longitude");

    if (table.rows.size() != 2)
        throw ValidationError("terminals file must have exactly 2 rows, got " +
                              std::to_string(table.rows.size()));

    auto make_terminal = [&](const std::vector<std::string>& row) {
        if (row.size() != table.header.size())
            throw SchemaError("terminal row has wrong cell count");
        double la, lo;
        if (!parse_number(row[lat], la) || !parse_number(row[lon], lo))
            throw ValidationError("terminal row has non-numeric coordinates");
        return TerminalPoint(row[id], row[name], la, lo, config.terminals_buffer_radius_m);
    };
    TerminalPoint a = make_terminal(table.rows[0]);
    TerminalPoint b = make_terminal(table.rows[1]);
    if (a.terminal_id == b.terminal_id)
        throw ValidationError("terminals must have distinct ids");
    return {std::move(a), std::move(b)};
}

RouteDefinition load_route(const std::filesystem::path& terminals_path,
                           const std::filesystem::path& stops_path,
                           const PipelineConfig& config) {
    auto [terminal_a, terminal_b] = load_terminals(terminals_path, config);

    const RawTable table = read_table(stops_path, config.delimiter);
    const std::size_t id = find_column(table.header, "stop_id");
    const std::size_t name = find_column(table.header, "name");
    const std::size_t lat = find_column(table.header, "latitude");
    const std::size_t lon = find_column(table.header, "longitude");
    const std::size_t dir = find_column(table.header, "direction_id");
    const std::size_t seq = find_column(table.header, "sequence_index");

    std::vector<StopPoint> outbound, inbound;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.header.size())
            throw SchemaError("stops row " + std::to_string(r) + " has wrong cell count");
        double la, lo;
        if (!parse_number(row[lat], la) || !parse_number(row[lon], lo))
            throw ValidationError("stops row " + std::to_string(r) +
                                  " has non-numeric coordinates");
        Direction direction;
        if (row[dir] == "outbound" || row[dir] == "0") direction = Direction::outbound;
        else if (row[dir] == "inbound" || row[dir] == "1") direction = Direction::inbound;
        else
            throw ValidationError("stops row " + std::to_string(r) +
                                  " has unknown direction_id '" + row[dir] + "'");
        double seq_value;
        if (!parse_number(row[seq], seq_value) || seq_value < 1.0 ||
            seq_value != std::floor(seq_value))
            throw ValidationError("stops row " + std::to_string(r) +
                                  " has bad sequence_index '" + row[seq] + "'");
        auto& list = direction == Direction::outbound ? outbound : inbound;
        list.emplace_back(row[id], row[name], la, lo, direction,
                          static_cast<int>(seq_value));
    }

    auto sort_and_check = [](std::vector<StopPoint>& stops, const char* label) {
        std::sort(stops.begin(), stops.end(), [](const StopPoint& a, const StopPoint& b) {
            return a.sequence_index < b.sequence_index;
        });
        for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
            if (stops[i].sequence_index == stops[i + 1].sequence_index)
                throw ValidationError(std::string("duplicate sequence_index ") +
                                      std::to_string(stops[i].sequence_index) + " in " + label +
                                      " stops");
        }
        for (std::size_t i = 0; i < stops.size(); ++i) {
            if (stops[i].sequence_index != static_cast<int>(i) + 1)
                throw ValidationError(std::string(label) +
                                      " stop sequence_index values must be consecutive from 1");
        }
    };
    sort_and_check(outbound, "outbound");
    sort_and_check(inbound, "inbound");

    const std::string route_id = terminal_a.terminal_id + "-" + terminal_b.terminal_id;
    return RouteDefinition(route_id, std::move(terminal_a), std::move(terminal_b),
                           std::move(outbound), std::move(inbound));
}

}  // namespace tracefeed
