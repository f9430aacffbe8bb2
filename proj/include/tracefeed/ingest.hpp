#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "tracefeed/config.hpp"
#include "tracefeed/model.hpp"

namespace tracefeed {

struct RejectedRow {
    std::size_t row_index = 0;  // 0-based position among data rows
    std::string reason;         // kebab-case class, e.g. "coordinate-range"
    std::string detail;
};

struct GpsLoadResult {
    std::vector<GpsRecord> records;
    std::vector<std::size_t> accepted_indices;  // parallel to records
    std::vector<RejectedRow> rejected;
    std::size_t total_rows = 0;
};

/// Reads a delimited GPS file through the field mapping. Every parseable row
/// becomes a record; the rest come back as RejectedRow, never silently
/// dropped. Input order is preserved. Parsing is chunked across the
/// configured workers with a deterministic merge.
///
/// Throws IoError when the file is unreadable, SchemaError when the header
/// misses a mapped column, and IoError("reject ratio ...") when the rejected
/// share exceeds config.reject_ratio_ceiling.
GpsLoadResult load_gps(const std::filesystem::path& path, const FieldMapping& mapping,
                       const PipelineConfig& config);

/// Terminals file: terminal_id,name,latitude,longitude with exactly 2 rows.
std::pair<TerminalPoint, TerminalPoint> load_terminals(const std::filesystem::path& path,
                                                       const PipelineConfig& config);

/// Stops file: stop_id,name,latitude,longitude,direction_id,sequence_index.
/// direction_id accepts outbound/inbound or 0/1. Stops come back sorted by
/// sequence_index within each direction.
RouteDefinition load_route(const std::filesystem::path& terminals_path,
                           const std::filesystem::path& stops_path,
                           const PipelineConfig& config);

}  // namespace tracefeed
